#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wassmob/config.hpp"
#include "wassmob/density.hpp"
#include "wassmob/energy.hpp"
#include "wassmob/mobility.hpp"

namespace wassmob {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentResult {
    std::vector<CheckResult> checks;
    std::vector<std::filesystem::path> files;  // everything written under outdir
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// config -> domain objects (shared by the CLI and the python bindings)
Grid grid_from_config(const ExperimentConfig& cfg);
MobilityField mobility_from_config(const ExperimentConfig& cfg, const Grid& g,
                                   const std::filesystem::path& base_dir);
EnergySpec psi_from_config(const ExperimentConfig& cfg, const Grid& g,
                           const std::filesystem::path& base_dir);
Density density_from_config(const ExperimentConfig& cfg, const Grid& g,
                            const std::string& section,
                            const std::filesystem::path& base_dir);

// Runs the configured experiment, writes config.echo, densities/, ledgers/,
// plots/ and MANIFEST.json under outdir. Returns the check list; exit code is
// 0 iff every check passed.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& outdir,
                                const std::filesystem::path& base_dir = ".");

// Writes MANIFEST.json (relative path -> fnv1a hash, plus the check ledger).
void emit_manifest(const std::filesystem::path& outdir, const ExperimentResult& result);

}  // namespace wassmob
