// kcut — numerical workbench for Kähler cuts: radial potentials, cut-space
// metrics and curvature checks, moment polytope combinatorics, stability.
//
// Usage: kcut --config run.json [--out PATH] [--format json|csv]
//             [--tolerance X] [--seed N] [--workers N]

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "kcut/cli.hpp"
#include "kcut/errors.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"kcut: Kahler cut verification workbench"};
    std::string config_path;
    std::string out_path;
    std::string format;
    double tolerance = -1.0;
    std::uint64_t seed = 0;
    int workers = 0;

    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_path, "artifact path (overrides config)");
    app.add_option("--format", format, "json or csv (overrides config)");
    app.add_option("--tolerance", tolerance, "pass/fail tolerance override");
    app.add_option("--seed", seed, "random seed override");
    app.add_option("--workers", workers, "worker pool size override");

    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "io-error: cannot read config " << config_path << "\n";
            return 2;
        }
        auto doc = kcut::cli::Json::parse(in, nullptr, false);
        if (doc.is_discarded()) {
            std::cerr << "config-error: invalid JSON in " << config_path << "\n";
            return 2;
        }
        kcut::cli::RunConfig cfg = kcut::cli::parse_config(doc);
        if (!out_path.empty()) cfg.out_path = out_path;
        if (!format.empty()) cfg.format = format;
        if (tolerance > 0.0) cfg.tolerance = tolerance;
        if (seed != 0) cfg.seed = seed;
        if (workers > 0) cfg.workers = workers;

        kcut::cli::RunReport report = kcut::cli::run(cfg);
        std::string bytes = kcut::cli::emit(report, cfg.format);
        if (!cfg.out_path.empty())
            kcut::cli::write_artifact(bytes, cfg.out_path);
        else
            std::cout << bytes;
        std::cerr << report.command << ": " << (report.pass ? "pass" : "FAIL")
                  << " (" << report.records.size() << " records, "
                  << report.wall_ms << " ms)\n";
        return kcut::cli::exit_code_for(report);
    } catch (const kcut::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
