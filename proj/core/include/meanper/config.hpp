#ifndef MEANPER_CONFIG_HPP
#define MEANPER_CONFIG_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meanper/entire.hpp"
#include "meanper/growth.hpp"

namespace meanper {

/// z-sample grid: an interval on the real axis, a circle, or explicit points.
struct GridSpec {
    enum class Kind { RealInterval, Circle, Points };
    Kind kind = Kind::RealInterval;
    double min = -1.0;
    double max = 1.0;
    double radius = 1.0;
    std::size_t count = 65;
    std::vector<cplx> points;

    std::vector<cplx> materialize() const;
};

struct ExperimentConfig {
    EntireFunctionSpec phi = EntireFunctionSpec::polynomial({cplx{0.0, 0.0}, cplx{1.0, 0.0}});
    std::optional<EntireFunctionSpec> f;
    YoungSpec theta = YoungSpec::linear();
    double radius = 10.0;
    double zero_tol = 1e-10;
    std::optional<std::size_t> K; // truncation; all zeros in the disk when absent
    GridSpec grid;
    std::vector<double> m_grid{1.0, 2.0};
    std::vector<double> norm_p{1.0, 2.0, 3.0};
    std::map<std::string, double> tolerances; // residual, identity defaults applied
    enum class Flavor { Auto, General, Interpolating };
    Flavor flavor = Flavor::Auto;
    std::map<std::string, std::string> outputs; // logical name -> file name

    double tolerance(const std::string& name, double fallback) const;
    std::string output_name(const std::string& logical, const std::string& fallback) const;
};

/// Parses the JSON document; throws ConfigError with a field path on bad input.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Complex numbers in configs and reports are {"re": ..., "im": ...}.
std::string format_complex_json(cplx z);

} // namespace meanper

#endif
