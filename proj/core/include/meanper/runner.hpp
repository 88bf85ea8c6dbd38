#ifndef MEANPER_RUNNER_HPP
#define MEANPER_RUNNER_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "meanper/config.hpp"
#include "meanper/expansion.hpp"
#include "meanper/variety.hpp"

namespace meanper::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kStructural = 2, // no zeros / empty variety
    kTolerance = 3,  // a numerical tolerance was breached
    kConfig = 4,     // config parse or validation failure
};

struct AnalyzeResult {
    MultiplicityVariety variety;
    AnalyticReport analytic;
    GeometricReport geometric;
    bool pass = false;
};

struct DecomposeResult {
    AnalyzeResult analysis;
    ExpansionCoefficients general;
    std::optional<ExpansionCoefficients> interpolating;
};

struct VerifyResult {
    double worst_identity = 0.0;
    double worst_monomial = 0.0;
    double worst_reconstruction = 0.0;
    bool breached = false;
};

/// analyze: zeros CSV, counting-function CSV, criteria verdict JSON.
AnalyzeResult cmd_analyze(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// decompose: coefficient CSVs plus sequence-norm tables.
DecomposeResult cmd_decompose(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// reconstruct: grid CSV of f vs the synthesized series, packet convergence JSON.
DecomposeResult cmd_reconstruct(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// verify: transform identity residuals over the variety prefix plus the
/// mean-periodicity residual of the reconstruction on the grid.
VerifyResult cmd_verify(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Shared formatting (deterministic, locale-independent).
std::string format_double(double v);

} // namespace meanper::cli

#endif
