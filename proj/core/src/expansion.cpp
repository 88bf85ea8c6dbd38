#include "meanper/expansion.hpp"

#include <algorithm>
#include <cmath>

#include "meanper/newton.hpp"

namespace meanper {

namespace {

std::vector<std::pair<cplx, int>> product_factors(const MultiplicityVariety& V, std::size_t upto,
                                                  std::size_t skip, cplx extra_node, int extra_power) {
    std::vector<std::pair<cplx, int>> factors;
    for (std::size_t n = 0; n < upto; ++n) {
        if (n != skip) {
            factors.emplace_back(V[n].location, V[n].multiplicity);
        }
    }
    if (extra_power != 0) {
        factors.emplace_back(extra_node, extra_power);
    }
    return factors;
}

} // namespace

ExpansionCoefficients extract_general(const EntireFunctionSpec& phi, const MultiplicityVariety& V,
                                      const TaylorStream& f, std::size_t K) {
    (void)phi; // the general functionals depend on the zeros alone
    K = std::min(K, V.size());
    ExpansionCoefficients c;
    c.flavor = ExpansionCoefficients::Flavor::General;
    c.variety = V.prefix(K);
    c.values.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t mk = static_cast<std::size_t>(V[k].multiplicity);
        c.values[k].resize(mk);
        for (std::size_t l = 0; l < mk; ++l) {
            c.values[k][l] = pair(s_functional(V, k, l), f).value;
        }
    }
    return c;
}

ExpansionCoefficients extract_interpolating(const EntireFunctionSpec& phi,
                                            const MultiplicityVariety& V, const TaylorStream& f,
                                            std::size_t K) {
    K = std::min(K, V.size());
    ExpansionCoefficients d;
    d.flavor = ExpansionCoefficients::Flavor::Interpolating;
    d.variety = V.prefix(K);
    d.values.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t mk = static_cast<std::size_t>(V[k].multiplicity);
        d.values[k].resize(mk);
        for (std::size_t l = 0; l < mk; ++l) {
            d.values[k][l] = pair(t_functional(phi, V, k, l), f).value;
        }
    }
    return d;
}

SynthesisResult synthesize_general(const ExpansionCoefficients& c, cplx z) {
    if (c.flavor != ExpansionCoefficients::Flavor::General) {
        throw DomainError("synthesize_general: coefficients are not general flavor");
    }
    SynthesisResult out;
    const std::size_t K = c.node_count();
    if (K == 0) {
        return out;
    }
    const auto table = exponential_divided_differences(c.variety, K, z);
    for (std::size_t k = 0; k < K; ++k) {
        cplx packet{0.0, 0.0};
        for (std::size_t l = 0; l < c.values[k].size(); ++l) {
            packet += c.values[k][l] * table.rows[k][l];
        }
        out.value += packet;
        out.packet_partials.push_back(out.value);
    }
    return out;
}

cplx synthesize_interpolating(const ExpansionCoefficients& d, cplx z) {
    if (d.flavor != ExpansionCoefficients::Flavor::Interpolating) {
        throw DomainError("synthesize_interpolating: coefficients are not interpolating flavor");
    }
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < d.node_count(); ++k) {
        cplx inner{0.0, 0.0};
        cplx zp{1.0, 0.0};
        double inv_fact = 1.0;
        for (std::size_t l = 0; l < d.values[k].size(); ++l) {
            if (l > 0) {
                zp *= z;
                inv_fact /= static_cast<double>(l);
            }
            inner += d.values[k][l] * zp * inv_fact;
        }
        acc += inner * std::exp(z * d.variety[k].location);
    }
    return acc;
}

double coeff_norm_general(const ExpansionCoefficients& c, const YoungSpec& theta, double p) {
    double acc = 0.0;
    for (std::size_t k = 0; k < c.node_count(); ++k) {
        const double mod = std::abs(c.variety[k].location);
        const int prefix = c.variety.multiplicity_prefix(k);
        double inner = 0.0;
        for (std::size_t l = 0; l < c.values[k].size(); ++l) {
            inner += std::abs(c.values[k][l]) *
                     std::pow(mod + 1.0, -static_cast<double>(prefix + static_cast<int>(l)));
        }
        acc += std::exp(eval_theta(theta, p * mod)) * inner;
    }
    return acc;
}

double coeff_norm_interpolating(const ExpansionCoefficients& d, const YoungSpec& theta, double p) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d.node_count(); ++k) {
        double inner = 0.0;
        for (std::size_t l = 0; l < d.values[k].size(); ++l) {
            inner += std::abs(d.values[k][l]);
        }
        acc += std::exp(eval_theta(theta, p * std::abs(d.variety[k].location))) * inner;
    }
    return acc;
}

NormStability norm_stability(const ExpansionCoefficients& coeffs, const YoungSpec& theta, double p,
                             std::size_t K_half) {
    ExpansionCoefficients half = coeffs;
    K_half = std::min(K_half, coeffs.node_count());
    half.values.resize(K_half);
    half.variety = coeffs.variety.prefix(K_half);
    NormStability out;
    if (coeffs.flavor == ExpansionCoefficients::Flavor::General) {
        out.norm_half = coeff_norm_general(half, theta, p);
        out.norm_full = coeff_norm_general(coeffs, theta, p);
    } else {
        out.norm_half = coeff_norm_interpolating(half, theta, p);
        out.norm_full = coeff_norm_interpolating(coeffs, theta, p);
    }
    out.delta = std::abs(out.norm_full - out.norm_half);
    out.stable = out.delta < 1e-6;
    return out;
}

ExpansionCoefficients c_to_d(const ExpansionCoefficients& c) {
    if (c.flavor != ExpansionCoefficients::Flavor::General) {
        throw DomainError("c_to_d: input must be general flavor");
    }
    const MultiplicityVariety& V = c.variety;
    const std::size_t K = c.node_count();

    ExpansionCoefficients d;
    d.flavor = ExpansionCoefficients::Flavor::Interpolating;
    d.variety = V;
    d.values.resize(K);

    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t mk = static_cast<std::size_t>(V[k].multiplicity);
        d.values[k].assign(mk, cplx{0.0, 0.0});
        for (std::size_t l = 0; l < mk; ++l) {
            cplx acc{0.0, 0.0};
            // Same-node block: sum_{i>=l} c_{k,i} D^{i-l}[ prod_{n<k} (a_k - a_n)^{-m_n} ].
            {
                const auto factors = product_factors(V, k, k, cplx{}, 0);
                const auto t = detail::inverse_power_product_jet(V[k].location, factors, mk - 1);
                for (std::size_t i = l; i < mk; ++i) {
                    acc += c.values[k][i] * t[i - l];
                }
            }
            // Later nodes: sum_{j>k} sum_i c_{j,i} D^{m_k-1-l}[ prod_{n<j, n != k}
            //   (a_k - a_n)^{-m_n} (a_k - a_j)^{-(i+1)} ].
            double last_term = 0.0;
            for (std::size_t j = k + 1; j < K; ++j) {
                cplx tail{0.0, 0.0};
                for (std::size_t i = 0; i < c.values[j].size(); ++i) {
                    const auto factors =
                        product_factors(V, j, k, V[j].location, static_cast<int>(i) + 1);
                    const auto t =
                        detail::inverse_power_product_jet(V[k].location, factors, mk - 1 - l);
                    tail += c.values[j][i] * t[mk - 1 - l];
                }
                acc += tail;
                last_term = std::abs(tail);
            }
            d.values[k][l] = acc;
            if (K > k + 1 && last_term > 1e-10 * std::abs(acc)) {
                d.truncation_warning = true;
            }
        }
    }
    return d;
}

EntireFunctionSpec to_exponential_polynomial(const ExpansionCoefficients& coeffs) {
    const MultiplicityVariety& V = coeffs.variety;
    const std::size_t K = coeffs.node_count();
    if (K == 0) {
        throw EmptyVarietyError{};
    }
    std::vector<PolyExpSumSpec::Term> terms(K);
    for (std::size_t j = 0; j < K; ++j) {
        terms[j].frequency = V[j].location;
        terms[j].poly.assign(static_cast<std::size_t>(V[j].multiplicity), cplx{0.0, 0.0});
    }
    if (coeffs.flavor == ExpansionCoefficients::Flavor::Interpolating) {
        for (std::size_t k = 0; k < K; ++k) {
            double inv_fact = 1.0;
            for (std::size_t l = 0; l < coeffs.values[k].size(); ++l) {
                if (l > 0) {
                    inv_fact /= static_cast<double>(l);
                }
                terms[k].poly[l] = coeffs.values[k][l] * inv_fact;
            }
        }
    } else {
        // Each packet contributes e^{z alpha_j} P_{k,j,l}(z) for j <= k.
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t l = 0; l < coeffs.values[k].size(); ++l) {
                const cplx w = coeffs.values[k][l];
                if (w == cplx{0.0, 0.0}) {
                    continue;
                }
                for (std::size_t j = 0; j <= k; ++j) {
                    const auto poly = expansion_poly(V, k, j, l);
                    for (std::size_t i = 0; i < poly.size(); ++i) {
                        terms[j].poly[i] += w * poly[i];
                    }
                }
            }
        }
    }
    return EntireFunctionSpec::poly_exp_sum(std::move(terms));
}

double residual_mean_periodic(const AnalyticFunctional& T, const EntireFunctionSpec& f_synth,
                              const std::vector<cplx>& grid) {
    if (grid.empty()) {
        throw DomainError("residual_mean_periodic: empty grid");
    }
    const auto stream = taylor_stream_of(f_synth, YoungSpec::linear(), 1.0);
    double worst = 0.0;
    for (const cplx z : grid) {
        worst = std::max(worst, std::abs(convolve(T, stream, z)));
    }
    return worst;
}

} // namespace meanper
