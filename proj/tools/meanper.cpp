#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "meanper/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    double radius_override = 0.0;
    std::size_t k_override = 0;
    double tol_override = 0.0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--radius", args.radius_override, "override the zero-search radius");
    cmd->add_option("--K", args.k_override, "override the truncation length");
    cmd->add_option("--tol", args.tol_override, "override the residual tolerance");
}

meanper::ExperimentConfig load(const CommonArgs& args) {
    auto cfg = meanper::load_config(args.config_path);
    if (args.radius_override > 0.0) {
        cfg.radius = args.radius_override;
    }
    if (args.k_override > 0) {
        cfg.K = args.k_override;
    }
    if (args.tol_override > 0.0) {
        cfg.tolerances["residual"] = args.tol_override;
        cfg.tolerances["identity"] = args.tol_override;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-periodic expansion toolkit"};
    app.require_subcommand(1);

    CommonArgs analyze_args, decompose_args, reconstruct_args, verify_args;
    auto* analyze = app.add_subcommand("analyze", "locate zeros and test the interpolation criteria");
    add_common(analyze, analyze_args);
    auto* decompose = app.add_subcommand("decompose", "extract expansion coefficients");
    add_common(decompose, decompose_args);
    auto* reconstruct = app.add_subcommand("reconstruct", "synthesize the expansion on a grid");
    add_common(reconstruct, reconstruct_args);
    auto* verify = app.add_subcommand("verify", "check transform identities and residuals");
    add_common(verify, verify_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return meanper::cli::kConfig;
    }

    try {
        if (*analyze) {
            meanper::cli::cmd_analyze(load(analyze_args), analyze_args.out_dir);
        } else if (*decompose) {
            meanper::cli::cmd_decompose(load(decompose_args), decompose_args.out_dir);
        } else if (*reconstruct) {
            meanper::cli::cmd_reconstruct(load(reconstruct_args), reconstruct_args.out_dir);
        } else if (*verify) {
            const auto res = meanper::cli::cmd_verify(load(verify_args), verify_args.out_dir);
            if (res.breached) {
                std::fprintf(stderr, "verify: residual tolerance breached\n");
                return meanper::cli::kTolerance;
            }
        }
    } catch (const meanper::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return meanper::cli::kConfig;
    } catch (const meanper::NoZerosError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return meanper::cli::kStructural;
    } catch (const meanper::EmptyVarietyError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return meanper::cli::kStructural;
    } catch (const meanper::DivergentPairingError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return meanper::cli::kTolerance;
    } catch (const meanper::DeflationResidualError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return meanper::cli::kTolerance;
    } catch (const meanper::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return meanper::cli::kOk;
}
