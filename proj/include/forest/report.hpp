#pragma once

#include "forest/diagnostics.hpp"
#include "forest/equilibrium.hpp"
#include "forest/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forest {

inline constexpr std::string_view k_tool_version = "forestsim 0.1.0";

/// FNV-1a 64-bit hash, used to fingerprint configuration text.
std::uint64_t fnv1a64(std::string_view text);

/// 16-character lowercase hex rendering of a 64-bit value.
std::string hex16(std::uint64_t value);

/// Scientific notation with 12 significant digits ("%.11e").
std::string format_sci(double value);

/// Comment preamble embedded at the top of every emitted file: tool version,
/// configuration digest, and (when scenario generation is involved) the seed.
std::string file_preamble(std::string_view digest_hex,
                          std::optional<std::uint64_t> seed = std::nullopt);

/// Key/value rendering of an analysis: R0, beta_xm, mu, case, b_star, theta2,
/// and the envelope.* block when the envelope construction applies.
std::string serialize_analysis(const AnalysisReport& report,
                               const ModelParams& params);

/// Single-line summary suitable for terminal output.
std::string one_line_classification(const AnalysisReport& report);

/// Pipe-delimited certification table, one row per check.
std::string serialize_certifications(
    const std::vector<CertificationResult>& results);

/// Delimited refinement table with "NA" for undefined ratios.
std::string serialize_convergence(const std::vector<ConvergenceRow>& rows);

} // namespace forest
