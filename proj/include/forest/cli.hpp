#pragma once

#include "forest/config.hpp"
#include "forest/diagnostics.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace forest {

/// Everything a batch run needs, assembled by the front-end parser and kept
/// testable without a process boundary.
struct RunManifest {
    std::string config_path;
    std::string command; // analyze | simulate | verify | convergence
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 12345;
    std::optional<double> h;
    std::optional<double> T;
    std::map<std::string, double> tol_overrides;
};

/// Classifies the configured model and writes analysis.txt.
int run_analyze(const RunManifest& manifest, std::ostream& log);

/// Integrates the configured scenario and writes path.csv (plus envelope.csv
/// when the growth envelope applies to the model).
int run_simulate(const RunManifest& manifest, std::ostream& log);

/// Runs the certifier battery and writes certification.txt; returns 1 when
/// any non-skipped check fails.
int run_verify(const RunManifest& manifest, std::ostream& log);

/// Runs the step-refinement study and writes convergence.csv.
int run_convergence(const RunManifest& manifest, std::ostream& log);

/// Dispatches on manifest.command; maps configuration and usage problems to
/// exit code 2.
int run_command(const RunManifest& manifest, std::ostream& log);

} // namespace forest
