#include "forest/report.hpp"

#include <cstdio>
#include <sstream>

namespace forest {

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char byte : text) {
        hash ^= static_cast<std::uint64_t>(byte);
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string hex16(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx",
                  static_cast<unsigned long long>(value));
    return buffer;
}

std::string format_sci(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.11e", value);
    return buffer;
}

std::string file_preamble(std::string_view digest_hex,
                          std::optional<std::uint64_t> seed) {
    std::ostringstream out;
    out << "# tool: " << k_tool_version << '\n';
    out << "# config_digest: " << digest_hex << '\n';
    if (seed)
        out << "# seed: " << *seed << '\n';
    return out.str();
}

std::string serialize_analysis(const AnalysisReport& report,
                               const ModelParams& params) {
    std::ostringstream out;
    out << "R0 = " << format_sci(report.R0) << '\n';
    out << "beta_xm = " << format_sci(report.beta_at_xm) << '\n';
    out << "mu = " << format_sci(report.mu) << '\n';
    out << "case = " << to_string(report.kind) << '\n';
    if (report.b_star)
        out << "b_star = " << format_sci(*report.b_star) << '\n';
    if (report.theta2)
        out << "theta2 = " << format_sci(*report.theta2) << '\n';
    if (report.beta_at_xm < report.mu) {
        try {
            const EnvelopeBundle env = growth_envelope(params, 0.0, 0.0);
            out << "envelope.eps = " << format_sci(env.eps) << '\n';
            out << "envelope.C_eps = " << format_sci(env.C_eps) << '\n';
            out << "envelope.alpha1 = " << format_sci(env.alpha1) << '\n';
            out << "envelope.lambda_plus = " << format_sci(env.lambda_plus)
                << '\n';
            out << "envelope.lambda_minus = " << format_sci(env.lambda_minus)
                << '\n';
        } catch (const std::exception&) {
            // No admissible margin for this growth profile; omit the block.
        }
    }
    if (!report.notes.empty())
        out << "notes = " << report.notes << '\n';
    return out.str();
}

std::string one_line_classification(const AnalysisReport& report) {
    std::ostringstream out;
    out << "case=" << to_string(report.kind) << " R0=" << format_sci(report.R0);
    if (report.b_star)
        out << " b_star=" << format_sci(*report.b_star);
    if (report.theta2)
        out << " theta2=" << format_sci(*report.theta2);
    return out.str();
}

std::string serialize_certifications(
    const std::vector<CertificationResult>& results) {
    std::ostringstream out;
    out << "check | verdict | margin | witness_t | witness_lhs | witness_rhs | "
           "note\n";
    for (const auto& r : results) {
        out << r.check_name << " | " << to_string(r.verdict) << " | "
            << format_sci(r.margin) << " | " << format_sci(r.witness_t) << " | "
            << format_sci(r.witness_lhs) << " | " << format_sci(r.witness_rhs)
            << " | ";
        if (!r.reason.empty())
            out << r.reason;
        if (!r.reason.empty() && !r.detail.empty())
            out << "; ";
        if (!r.detail.empty())
            out << r.detail;
        out << '\n';
    }
    return out.str();
}

std::string serialize_convergence(const std::vector<ConvergenceRow>& rows) {
    std::ostringstream out;
    out << "h,max_err,ratio\n";
    for (const auto& row : rows) {
        out << format_sci(row.h) << ',' << format_sci(row.max_err) << ',';
        if (row.ratio_defined)
            out << format_sci(row.ratio);
        else
            out << "NA";
        out << '\n';
    }
    return out.str();
}

} // namespace forest
