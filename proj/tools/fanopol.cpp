// fanopol: configuration-driven front end.
//
//   fanopol run <config.json> [--output-dir DIR] [--threads N]
//   fanopol validate <config.json> [--threads N]
//
// Exit status: 0 ok, 2 config error, 3 parameter or invariant violation,
// 4 numerical failure, 5 I/O failure.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fanopol/app/pipeline.hpp"

int main(int argc, char** argv) {
    using namespace fanopol::app;

    CLI::App cli{"Dressed-electron spectra and electroluminescence of a microcavity 2DEG"};
    cli.require_subcommand(1);

    std::string config_path;
    std::string output_dir = ".";
    unsigned threads = 1;
    long long seed = 0;
    auto* out_opt = cli.add_option("--output-dir,-o", output_dir, "directory for all products")->capture_default_str();
    cli.add_option("--threads,-j", threads, "worker threads")->check(CLI::Range(1U, 256U))->capture_default_str();
    cli.add_option("--seed", seed, "reserved; the pipeline is deterministic");

    auto* run_cmd = cli.add_subcommand("run", "compute the products listed in the config");
    run_cmd->add_option("config", config_path, "JSON run configuration")->required();
    auto* val_cmd = cli.add_subcommand("validate", "run the invariant suite and report pass/fail per check");
    val_cmd->add_option("config", config_path, "JSON run configuration")->required();
    for (auto* sub : {run_cmd, val_cmd}) sub->fallthrough();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : config_error;
    }

    try {
        const RunConfig cfg = load_config(config_path);
        RunOptions opt;
        opt.output_dir = output_dir;
        opt.threads = threads;
        opt.validate_only = val_cmd->parsed();
        // validate prints its report; it writes a file only when asked to
        opt.write_report = out_opt->count() > 0;
        const RunResult res = run(cfg, opt, std::cout);
        if (res.exit_code != ok) {
            for (const auto& c : res.report.checks)
                if (!c.passed) std::cerr << "fanopol: [" << c.module << "] check " << c.name << " failed\n";
        }
        return res.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "fanopol: " << describe(e) << '\n';
        return exit_code_for(e);
    }
}
