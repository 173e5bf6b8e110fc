#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "ecado/errors.hpp"
#include "ecado/experiment.hpp"

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ecado: distributed optimization via equivalent-circuit Gauss-Seidel"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir;
    int workers = 0;
    auto* run = app.add_subcommand("run", "run the configured solver and write traces");
    run->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (overrides spec 'output')");
    run->add_option("--workers", workers, "worker threads for sub-problems")->check(CLI::PositiveNumber);

    std::string analyze_path;
    std::string analyze_csv;
    auto* analyze = app.add_subcommand("analyze", "print iteration-matrix spectral radii and bounds");
    analyze->add_option("spec", analyze_path, "experiment spec (JSON)")->required();
    analyze->add_option("--csv", analyze_csv, "also write the table as CSV");

    std::string gen_path;
    std::string gen_out = "data.json";
    auto* gen = app.add_subcommand("gen-data", "write the synthetic problem data as JSON");
    gen->add_option("spec", gen_path, "experiment spec (JSON)")->required();
    gen->add_option("-o,--output", gen_out, "destination file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    ecado::ExperimentSpec spec;
    try {
        const std::string& path = run->parsed() ? spec_path : analyze->parsed() ? analyze_path : gen_path;
        spec = ecado::parse_spec_file(path);
    } catch (const ecado::SchemaError& e) {
        std::cerr << "spec error at '" << e.key() << "': " << e.what() << "\n";
        return kExitUsage;
    } catch (const ecado::Error& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (run->parsed()) {
            if (workers > 0) spec.workers = workers;
            const std::string dir = out_dir.empty() ? spec.output : out_dir;
            const auto oc = ecado::run_experiment(spec, dir);
            std::cout << oc.summary.dump(1) << "\n";
            return oc.exit_code;
        }
        if (analyze->parsed()) {
            std::string csv;
            std::cout << ecado::analyze_experiment(spec, &csv);
            if (!analyze_csv.empty()) ecado::write_file_atomic(analyze_csv, csv);
            return 0;
        }
        ecado::generate_data(spec, gen_out);
        std::cout << "wrote " << gen_out << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailed;
    }
}
