#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "wassmob/config.hpp"
#include "wassmob/errors.hpp"
#include "wassmob/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"weighted-Wasserstein experiment runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;

    for (const auto& kind : wassmob::ExperimentConfig::known_kinds()) {
        auto* sub = app.add_subcommand(kind);
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed for sampled property checks")
            ->each([&](const std::string&) { seed_set = true; });
    }

    CLI11_PARSE(app, argc, argv);
    const std::string kind = app.get_subcommands().front()->get_name();

    try {
        wassmob::ExperimentConfig cfg = wassmob::parse_config(config_path);
        if (!cfg.kind.empty() && cfg.kind != kind) {
            std::cerr << "config declares kind '" << cfg.kind << "' but '" << kind
                      << "' was requested\n";
            return 2;
        }
        cfg.set("experiment.kind", kind);
        if (seed_set) cfg.set("experiment.seed", std::to_string(seed));
        std::string out = !out_dir.empty() ? out_dir
                          : !cfg.out_dir.empty() ? cfg.out_dir
                                                 : "out_" + kind;

        auto base = std::filesystem::path(config_path).parent_path();
        auto result = wassmob::run_experiment(cfg, out, base.empty() ? "." : base);
        for (const auto& c : result.checks)
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
                      << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
        std::cout << (result.all_pass() ? "ok" : "FAILED") << ": " << out << "/MANIFEST.json\n";
        return result.all_pass() ? 0 : 1;
    } catch (const wassmob::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
