#pragma once

#include "forest/model.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace forest {

/// Raised on malformed configuration text; the message carries the key path
/// (e.g. "beta.family") and the line number where the problem sits.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fully validated model + initial history, plus the fingerprint of the
/// exact text it came from (embedded in every emitted file).
struct LoadedConfig {
    ModelParams params;
    History phi;
    std::string digest_hex;
};

/// Parses configuration text. Layout: top-level keys `mu`, `x_m`, `rho`,
/// then sections `[beta]`, `[g]` (keys `family`, `params`) and `[history]`
/// (keys `S`, `h`, `samples` or `constant`, optional `tail`, `tail_value`).
/// `#` starts a comment. See README for the full schema.
LoadedConfig parse_config_text(std::string_view text);

/// Reads and parses a configuration file.
LoadedConfig load_config_file(const std::string& path);

} // namespace forest
