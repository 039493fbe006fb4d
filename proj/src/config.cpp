#include "forest/config.hpp"

#include "forest/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace forest {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using EntryMap = std::map<std::string, Entry>;

[[noreturn]] void fail(int line, const std::string& key,
                       const std::string& message) {
    std::ostringstream out;
    out << "line " << line << ": key '" << key << "': " << message;
    throw ConfigError(out.str());
}

[[noreturn]] void fail_line(int line, const std::string& message) {
    std::ostringstream out;
    out << "line " << line << ": " << message;
    throw ConfigError(out.str());
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

double parse_number(std::string_view token, int line, const std::string& key) {
    const std::string_view body = trim(token);
    double value = 0.0;
    const auto* first = body.data();
    const auto* last = body.data() + body.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || body.empty())
        fail(line, key, "expected a number, got '" + std::string(body) + "'");
    if (!std::isfinite(value))
        fail(line, key, "value must be finite");
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<double> parse_number_list(std::string_view text, int line,
                                      const std::string& key) {
    std::vector<double> values;
    for (const auto part : split(text, ','))
        values.push_back(parse_number(part, line, key));
    return values;
}

EntryMap tokenize(std::string_view text) {
    static const std::vector<std::string> known_sections = {"beta", "g",
                                                            "history"};
    EntryMap entries;
    std::string section;
    int line_no = 0;
    std::size_t cursor = 0;
    while (cursor <= text.size()) {
        const auto newline = text.find('\n', cursor);
        std::string_view line =
            text.substr(cursor, newline == std::string_view::npos
                                    ? std::string_view::npos
                                    : newline - cursor);
        cursor = newline == std::string_view::npos ? text.size() + 1
                                                   : newline + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                fail_line(line_no, "unterminated section header");
            const std::string name(trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (const auto& candidate : known_sections)
                known = known || candidate == name;
            if (!known)
                fail_line(line_no, "unknown section '[" + name + "]'");
            section = name;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail_line(line_no, "expected 'key = value'");
        const std::string bare(trim(line.substr(0, eq)));
        if (bare.empty())
            fail_line(line_no, "empty key");
        const std::string key = section.empty() ? bare : section + "." + bare;
        const std::string value(trim(line.substr(eq + 1)));
        const auto [it, inserted] = entries.emplace(key, Entry{value, line_no});
        if (!inserted)
            fail(line_no, key,
                 "specified twice (first at line " +
                     std::to_string(it->second.line) + ")");
    }
    return entries;
}

Entry& require(EntryMap& entries, const std::string& key) {
    const auto it = entries.find(key);
    if (it == entries.end())
        throw ConfigError("key '" + key + "': required but missing");
    it->second.used = true;
    return it->second;
}

Entry* lookup(EntryMap& entries, const std::string& key) {
    const auto it = entries.find(key);
    if (it == entries.end())
        return nullptr;
    it->second.used = true;
    return &it->second;
}

std::vector<std::pair<double, double>>
parse_pair_list(std::string_view text, int line, const std::string& key) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto part : split(text, ',')) {
        const auto pieces = split(part, ':');
        if (pieces.size() != 2)
            fail(line, key,
                 "expected 'x:y' pairs, got '" + std::string(trim(part)) + "'");
        pairs.emplace_back(parse_number(pieces[0], line, key),
                           parse_number(pieces[1], line, key));
    }
    return pairs;
}

RateSpec build_rate(EntryMap& entries, const std::string& section,
                    RateRole role, double x_m) {
    Entry& family_entry = require(entries, section + ".family");
    Entry& params_entry = require(entries, section + ".params");
    const std::string& family = family_entry.value;
    const std::string params_key = section + ".params";

    const auto expect_count = [&](std::size_t n, const char* shape) {
        const auto values =
            parse_number_list(params_entry.value, params_entry.line, params_key);
        if (values.size() != n)
            fail(params_entry.line, params_key,
                 std::string("family '") + family + "' takes " + shape);
        return values;
    };

    try {
        if (family == "table") {
            const auto pairs =
                parse_pair_list(params_entry.value, params_entry.line, params_key);
            std::vector<double> xs, ys;
            for (const auto& [x, y] : pairs) {
                xs.push_back(x);
                ys.push_back(y);
            }
            return RateSpec::table(role, std::move(xs), std::move(ys));
        }
        if (role == RateRole::reproduction) {
            if (family == "ramp") {
                const auto v = expect_count(2, "2 params: c, x_knee");
                return RateSpec::ramp(v[0], v[1]);
            }
            if (family == "affine") {
                const auto v = expect_count(2, "2 params: slope, intercept");
                return RateSpec::affine(role, v[0], v[1], x_m);
            }
            fail(family_entry.line, section + ".family",
                 "'" + family +
                     "' is not a reproduction profile (use ramp, affine, or "
                     "table)");
        }
        if (family == "exp_decay") {
            const auto v = expect_count(2, "2 params: level0, decay");
            return RateSpec::exp_decay(v[0], v[1]);
        }
        if (family == "rational_decay") {
            const auto v = expect_count(2, "2 params: level0, decay");
            return RateSpec::rational_decay(v[0], v[1]);
        }
        if (family == "affine") {
            const auto v = expect_count(2, "2 params: slope, intercept");
            return RateSpec::affine(role, v[0], v[1], x_m);
        }
        if (family == "ramp")
            fail(family_entry.line, section + ".family",
                 "'ramp' is a reproduction profile; the growth rate must stay "
                 "positive (use affine, table, exp_decay, or rational_decay)");
        fail(family_entry.line, section + ".family",
             "'" + family +
                 "' is not a growth profile (use affine, table, exp_decay, or "
                 "rational_decay)");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(params_entry.line, params_key, e.what());
    }
}

History build_history(EntryMap& entries) {
    Entry& span_entry = require(entries, "history.S");
    Entry& step_entry = require(entries, "history.h");
    const double span = parse_number(span_entry.value, span_entry.line,
                                     "history.S");
    const double step = parse_number(step_entry.value, step_entry.line,
                                     "history.h");
    if (!(span > 0.0))
        fail(span_entry.line, "history.S", "span must be positive");
    if (!(step > 0.0))
        fail(step_entry.line, "history.h", "step must be positive");
    const double cells = span / step;
    if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells))
        fail(step_entry.line, "history.h",
             "S must be an integer multiple of h");
    const auto node_count = static_cast<std::size_t>(std::lround(cells)) + 1;

    Entry* samples_entry = lookup(entries, "history.samples");
    Entry* constant_entry = lookup(entries, "history.constant");
    if (samples_entry && constant_entry)
        fail(constant_entry->line, "history.constant",
             "give either samples or constant, not both");
    if (!samples_entry && !constant_entry)
        throw ConfigError(
            "key 'history.samples': required (or use history.constant)");

    std::vector<double> samples;
    TailKind tail = TailKind::zero;
    if (constant_entry) {
        const double level = parse_number(constant_entry->value,
                                          constant_entry->line,
                                          "history.constant");
        if (level < 0.0)
            fail(constant_entry->line, "history.constant",
                 "history values must be nonnegative");
        samples.assign(node_count, level);
        tail = TailKind::constant;
    } else {
        samples = parse_number_list(samples_entry->value, samples_entry->line,
                                    "history.samples");
        if (samples.size() != node_count)
            fail(samples_entry->line, "history.samples",
                 "expected " + std::to_string(node_count) +
                     " samples on [-S, 0] at step h, got " +
                     std::to_string(samples.size()));
    }

    if (Entry* tail_entry = lookup(entries, "history.tail")) {
        if (tail_entry->value == "zero")
            tail = TailKind::zero;
        else if (tail_entry->value == "constant")
            tail = TailKind::constant;
        else
            fail(tail_entry->line, "history.tail",
                 "expected 'zero' or 'constant', got '" + tail_entry->value +
                     "'");
    }

    double tail_value = tail == TailKind::constant ? samples.front() : 0.0;
    if (Entry* tail_value_entry = lookup(entries, "history.tail_value")) {
        if (tail != TailKind::constant)
            fail(tail_value_entry->line, "history.tail_value",
                 "only meaningful with tail = constant");
        tail_value = parse_number(tail_value_entry->value,
                                  tail_value_entry->line,
                                  "history.tail_value");
    }

    try {
        return History::sampled(std::move(samples), span, step, tail,
                                tail_value);
    } catch (const std::exception& e) {
        fail(span_entry.line, "history.S", e.what());
    }
}

} // namespace

LoadedConfig parse_config_text(std::string_view text) {
    EntryMap entries = tokenize(text);

    Entry& mu_entry = require(entries, "mu");
    Entry& xm_entry = require(entries, "x_m");
    Entry& rho_entry = require(entries, "rho");
    const double mu = parse_number(mu_entry.value, mu_entry.line, "mu");
    const double x_m = parse_number(xm_entry.value, xm_entry.line, "x_m");
    const double rho = parse_number(rho_entry.value, rho_entry.line, "rho");
    if (!(mu > 0.0))
        fail(mu_entry.line, "mu", "must be positive");
    if (x_m < 0.0)
        fail(xm_entry.line, "x_m", "must be nonnegative");
    if (!(rho > 0.0 && rho < mu))
        fail(rho_entry.line, "rho", "must satisfy 0 < rho < mu");

    RateSpec beta = build_rate(entries, "beta", RateRole::reproduction, x_m);
    RateSpec g = build_rate(entries, "g", RateRole::growth, x_m);
    History phi = build_history(entries);

    for (const auto& [key, entry] : entries)
        if (!entry.used)
            fail(entry.line, key, "unknown key");

    try {
        ModelParams params(mu, x_m, rho, std::move(beta), std::move(g));
        return LoadedConfig{std::move(params), std::move(phi),
                            hex16(fnv1a64(text))};
    } catch (const std::exception& e) {
        throw ConfigError(std::string("model validation: ") + e.what());
    }
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

} // namespace forest
