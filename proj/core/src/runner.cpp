#include "meanper/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "meanper/functionals.hpp"
#include "meanper/newton.hpp"
#include "meanper/parallel.hpp"

namespace meanper::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary); // binary keeps line endings fixed
    if (!out) {
        throw Error("cannot open output file " + (dir / name).string());
    }
    return out;
}

void write_zeros_csv(std::ofstream& out, const MultiplicityVariety& V) {
    out << "k,re_alpha,im_alpha,m\n";
    for (std::size_t k = 0; k < V.size(); ++k) {
        out << k << ',' << format_double(V[k].location.real()) << ','
            << format_double(V[k].location.imag()) << ',' << V[k].multiplicity << '\n';
    }
}

void write_counting_csv(std::ofstream& out, const CountingProfile& profile) {
    out << "r,n,N\n";
    for (const auto& s : profile.samples) {
        out << format_double(s.r) << ',' << s.n << ',' << format_double(s.N) << '\n';
    }
}

void write_fit_json(std::ofstream& out, const char* criterion, const CriterionFit& fit,
                    double fitted_value, const std::vector<std::pair<double, double>>& samples,
                    bool last) {
    out << "  {\"criterion\":\"" << criterion << "\",\"fitted_m\":" << format_double(fit.m)
        << ",\"fitted_A_or_eps\":" << format_double(fitted_value) << ",\"stable\":"
        << (fit.stable ? "true" : "false") << ",\"samples\":[";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << (i ? "," : "") << "[" << format_double(samples[i].first) << ','
            << format_double(samples[i].second) << "]";
    }
    out << "]}" << (last ? "\n" : ",\n");
}

ExpansionCoefficients pick_flavor(const ExperimentConfig& cfg, const DecomposeResult& dec) {
    const bool want_interp =
        cfg.flavor == ExperimentConfig::Flavor::Interpolating ||
        (cfg.flavor == ExperimentConfig::Flavor::Auto && dec.interpolating.has_value());
    if (want_interp) {
        if (!dec.interpolating) {
            throw Error("interpolating flavor requested but the criteria did not pass");
        }
        return *dec.interpolating;
    }
    return dec.general;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

AnalyzeResult cmd_analyze(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    AnalyzeResult res;
    res.variety = find_zeros(cfg.phi, cfg.radius, cfg.zero_tol);
    if (cfg.K) {
        res.variety = res.variety.prefix(*cfg.K);
    }
    res.analytic = analytic_test(cfg.phi, res.variety, cfg.theta, cfg.m_grid);
    res.geometric = geometric_test(res.variety, cfg.theta, cfg.m_grid);
    res.pass = res.analytic.verdict == CriterionVerdict::Pass &&
               res.geometric.verdict == CriterionVerdict::Pass;

    auto zeros_out = open_out(out_dir, cfg.output_name("zeros", "zeros.csv"));
    write_zeros_csv(zeros_out, res.variety);

    auto counting_out = open_out(out_dir, cfg.output_name("counting", "counting.csv"));
    write_counting_csv(counting_out, res.geometric.profile);

    auto verdict_out = open_out(out_dir, cfg.output_name("verdict", "verdict.json"));
    verdict_out << "{\n\"verdict\":\"" << (res.pass ? "pass" : "inconclusive")
                << "\",\n\"criteria\":[\n";
    std::vector<std::pair<double, double>> analytic_samples;
    for (const auto& p : res.variety.points()) {
        double fact = 1.0;
        for (int i = 2; i <= p.multiplicity; ++i) {
            fact *= i;
        }
        analytic_samples.emplace_back(std::abs(p.location),
                                      std::abs(eval(cfg.phi, p.location, p.multiplicity)) / fact);
    }
    write_fit_json(verdict_out, "analytic", res.analytic.fit, res.analytic.eps, analytic_samples,
                   false);
    std::vector<std::pair<double, double>> origin_samples;
    for (const auto& s : res.geometric.profile.samples) {
        origin_samples.emplace_back(s.r, s.N);
    }
    write_fit_json(verdict_out, "N(0,R)", res.geometric.origin, res.geometric.origin.A,
                   origin_samples, false);
    std::vector<std::pair<double, double>> diag_samples;
    for (const auto& p : res.variety.points()) {
        const double r = std::abs(p.location);
        if (r > 0.0) {
            diag_samples.emplace_back(r, big_N(res.variety, p.location, r));
        }
    }
    write_fit_json(verdict_out, "N(z,z)", res.geometric.diagonal, res.geometric.diagonal.A,
                   diag_samples, false);
    const auto mult_fit = multiplicity_bound_check(res.variety, cfg.theta, cfg.m_grid);
    std::vector<std::pair<double, double>> mult_samples;
    for (const auto& p : res.variety.points()) {
        mult_samples.emplace_back(std::abs(p.location), static_cast<double>(p.multiplicity));
    }
    write_fit_json(verdict_out, "multiplicity_bound", mult_fit, std::exp(mult_fit.A), mult_samples,
                   true);
    verdict_out << "]\n}\n";
    return res;
}

DecomposeResult cmd_decompose(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    DecomposeResult res;
    res.analysis = cmd_analyze(cfg, out_dir);
    if (!cfg.f) {
        throw ConfigError("decompose: the config must provide \"f\"");
    }
    const auto stream = taylor_stream_of(*cfg.f, cfg.theta, 1.0);
    const std::size_t K = cfg.K.value_or(res.analysis.variety.size());
    res.general = extract_general(cfg.phi, res.analysis.variety, stream, K);
    if (res.analysis.analytic.verdict == CriterionVerdict::Pass ||
        cfg.flavor == ExperimentConfig::Flavor::Interpolating) {
        res.interpolating = extract_interpolating(cfg.phi, res.analysis.variety, stream, K);
    }

    const auto write_coeffs = [&](const ExpansionCoefficients& coeffs, const std::string& name) {
        auto out = open_out(out_dir, name);
        out << "k,l,re,im,abs_alpha,norm_weight\n";
        for (std::size_t k = 0; k < coeffs.node_count(); ++k) {
            const double mod = std::abs(coeffs.variety[k].location);
            const int prefix = coeffs.variety.multiplicity_prefix(k);
            for (std::size_t l = 0; l < coeffs.values[k].size(); ++l) {
                const double weight =
                    coeffs.flavor == ExpansionCoefficients::Flavor::General
                        ? std::pow(mod + 1.0, -static_cast<double>(prefix + static_cast<int>(l)))
                        : 1.0;
                out << k << ',' << l << ',' << format_double(coeffs.values[k][l].real()) << ','
                    << format_double(coeffs.values[k][l].imag()) << ',' << format_double(mod) << ','
                    << format_double(weight) << '\n';
            }
        }
    };
    write_coeffs(res.general, cfg.output_name("coeffs_general", "coeffs_general.csv"));
    if (res.interpolating) {
        write_coeffs(*res.interpolating,
                     cfg.output_name("coeffs_interpolating", "coeffs_interpolating.csv"));
    }

    auto norms = open_out(out_dir, cfg.output_name("norms", "norms.csv"));
    norms << "flavor,p,norm\n";
    for (double p : cfg.norm_p) {
        norms << "general," << format_double(p) << ','
              << format_double(coeff_norm_general(res.general, cfg.theta, p)) << '\n';
    }
    if (res.interpolating) {
        for (double p : cfg.norm_p) {
            norms << "interpolating," << format_double(p) << ','
                  << format_double(coeff_norm_interpolating(*res.interpolating, cfg.theta, p)) << '\n';
        }
    }
    return res;
}

DecomposeResult cmd_reconstruct(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    DecomposeResult res = cmd_decompose(cfg, out_dir);
    const auto coeffs = pick_flavor(cfg, res);
    const auto grid = cfg.grid.materialize();

    std::vector<cplx> truth(grid.size());
    std::vector<cplx> synthesized(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        truth[i] = eval(*cfg.f, grid[i], 0);
        synthesized[i] = coeffs.flavor == ExpansionCoefficients::Flavor::Interpolating
                             ? synthesize_interpolating(coeffs, grid[i])
                             : synthesize_general(coeffs, grid[i]).value;
    });

    auto out = open_out(out_dir, cfg.output_name("reconstruction", "reconstruction.csv"));
    out << "re_z,im_z,re_f,im_f,re_fhat,im_fhat,abs_error\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << format_double(grid[i].real()) << ',' << format_double(grid[i].imag()) << ','
            << format_double(truth[i].real()) << ',' << format_double(truth[i].imag()) << ','
            << format_double(synthesized[i].real()) << ',' << format_double(synthesized[i].imag())
            << ',' << format_double(std::abs(truth[i] - synthesized[i])) << '\n';
    }

    // Packet convergence at a reference point: magnitudes and a fitted decay
    // rate of the per-packet increments.
    const cplx z_ref = grid[grid.size() / 2];
    const auto partials = synthesize_general(res.general, z_ref).packet_partials;
    auto conv = open_out(out_dir, cfg.output_name("convergence", "convergence.json"));
    conv << "{\n\"z\":" << format_complex_json(z_ref) << ",\n\"packet_partials\":[";
    for (std::size_t i = 0; i < partials.size(); ++i) {
        conv << (i ? "," : "") << format_double(std::abs(partials[i]));
    }
    conv << "],\n\"packet_increments\":[";
    double decay_num = 0.0, decay_den = 0.0;
    cplx prev{0.0, 0.0};
    std::vector<double> increments;
    for (std::size_t i = 0; i < partials.size(); ++i) {
        increments.push_back(std::abs(partials[i] - prev));
        prev = partials[i];
        conv << (i ? "," : "") << format_double(increments.back());
    }
    for (std::size_t i = 1; i < increments.size(); ++i) {
        if (increments[i - 1] > 0.0 && increments[i] > 0.0) {
            decay_num += std::log(increments[i] / increments[i - 1]);
            decay_den += 1.0;
        }
    }
    conv << "],\n\"fitted_log_decay\":"
         << format_double(decay_den > 0.0 ? decay_num / decay_den : 0.0) << "\n}\n";
    return res;
}

VerifyResult cmd_verify(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    DecomposeResult dec = cmd_decompose(cfg, out_dir);
    VerifyResult res;
    const auto& V = dec.analysis.variety;

    AnalyticFunctional T;
    T.fb = cfg.phi;
    T.label = "T";

    // Transform identity over the variety prefix: all jet slots below the
    // multiplicity must pair to (numerical) zero.
    for (std::size_t k = 0; k < V.size(); ++k) {
        for (int l = 0; l < std::min(V[k].multiplicity, 10); ++l) {
            res.worst_identity =
                std::max(res.worst_identity, verify_monomial_identity(T, cfg.phi, V[k].location, l));
        }
    }

    const auto grid = cfg.grid.materialize();

    // Mean-periodicity of each exponential monomial on the grid.
    std::vector<double> monomial_worst(V.size(), 0.0);
    parallel_for(V.size(), [&](std::size_t k) {
        for (int l = 0; l < V[k].multiplicity; ++l) {
            const auto monomial = exponential_monomial(l, V[k].location);
            monomial_worst[k] =
                std::max(monomial_worst[k], residual_mean_periodic(T, monomial, grid));
        }
    });
    for (double w : monomial_worst) {
        res.worst_monomial = std::max(res.worst_monomial, w);
    }

    // Residual of the synthesized expansion.
    const auto coeffs = pick_flavor(cfg, dec);
    res.worst_reconstruction = residual_mean_periodic(T, to_exponential_polynomial(coeffs), grid);

    const double tol_identity = cfg.tolerance("identity", 1e-9);
    const double tol_residual = cfg.tolerance("residual", 1e-8);
    res.breached = res.worst_identity > tol_identity || res.worst_monomial > tol_residual ||
                   res.worst_reconstruction > tol_residual;

    auto out = open_out(out_dir, cfg.output_name("verify", "verify.json"));
    out << "{\n\"worst_identity\":" << format_double(res.worst_identity)
        << ",\n\"worst_monomial_residual\":" << format_double(res.worst_monomial)
        << ",\n\"worst_reconstruction_residual\":" << format_double(res.worst_reconstruction)
        << ",\n\"tolerance_identity\":" << format_double(tol_identity)
        << ",\n\"tolerance_residual\":" << format_double(tol_residual) << ",\n\"ok\":"
        << (res.breached ? "false" : "true") << "\n}\n";
    return res;
}

} // namespace meanper::cli
