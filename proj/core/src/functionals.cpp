#include "meanper/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "meanper/newton.hpp"

namespace meanper {

namespace {

constexpr std::size_t kDefaultPairTerms = 128;
constexpr std::size_t kMaxPairTerms = 1024;

// 64-point Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on the
// Legendre recurrence.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss64() {
    static const GaussRule rule = [] {
        constexpr int n = 64;
        GaussRule r;
        r.nodes.resize(n);
        r.weights.resize(n);
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) {
                    break;
                }
            }
            r.nodes[i] = -x;
            r.nodes[n - 1 - i] = x;
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            r.weights[i] = w;
            r.weights[n - 1 - i] = w;
        }
        return r;
    }();
    return rule;
}

// Geometric tail estimate from the trailing nonzero term magnitudes. Zero
// terms (sparse series) do not count toward the window.
class TailEstimator {
  public:
    void push(double magnitude) {
        if (magnitude > 0.0) {
            if (window_.size() == 5) {
                window_.erase(window_.begin());
            }
            window_.push_back(magnitude);
        }
    }
    double ratio() const {
        double r = 0.0;
        for (std::size_t i = 1; i < window_.size(); ++i) {
            r = std::max(r, window_[i] / window_[i - 1]);
        }
        return r;
    }
    bool divergent() const { return window_.size() >= 2 && ratio() >= 1.0; }
    double tail() const {
        if (window_.empty()) {
            return 0.0;
        }
        const double r = ratio();
        if (r >= 1.0) {
            return window_.back();
        }
        return window_.back() * r / (1.0 - r);
    }

  private:
    std::vector<double> window_;
};

// Sum of f's Taylor series at a point, with geometric tail control.
struct SeriesEval {
    cplx value{0.0, 0.0};
    double tail = 0.0;
    bool converged = true;
};

SeriesEval sum_stream_at(const TaylorStream& f, cplx z, std::size_t n_max) {
    SeriesEval out;
    cplx zp{1.0, 0.0};
    TailEstimator est;
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (n > 0) {
            zp *= z;
        }
        const cplx term = f.coeff(n) * zp;
        out.value += term;
        est.push(std::abs(term));
    }
    out.converged = !est.divergent();
    out.tail = est.tail();
    return out;
}

// Closed-form f(z), derivatives included, when the stream has a source spec.
cplx stream_value(const TaylorStream& f, cplx z, int order = 0) {
    if (f.has_source()) {
        return eval(f.source(), z, order);
    }
    if (order != 0) {
        throw DomainError("derivative of a sourceless stream requested");
    }
    std::size_t n = kDefaultPairTerms;
    while (true) {
        const auto s = sum_stream_at(f, z, n);
        if (s.converged && s.tail < 1e-12 * (1.0 + std::abs(s.value))) {
            return s.value;
        }
        if (n >= kMaxPairTerms) {
            if (!s.converged) {
                throw DivergentPairingError("stream evaluation diverges");
            }
            return s.value;
        }
        n *= 2;
    }
}

std::vector<cplx> series_taylor(const SyntheticSeries& s, std::size_t n_max) {
    std::vector<cplx> out(n_max + 1, cplx{0.0, 0.0});
    for (std::size_t n = 0; n <= n_max && n < s.coeffs.size(); ++n) {
        out[n] = s.coeffs[n];
    }
    return out;
}

// Jet of the truncated series at xi (scaled derivatives up to `order`), by
// repeated synthetic division: round j's remainder is the order-j Taylor
// coefficient of the recentered polynomial.
std::vector<cplx> series_jet(const std::vector<cplx>& coeffs, cplx xi, int order) {
    std::vector<cplx> jet(static_cast<std::size_t>(order) + 1, cplx{0.0, 0.0});
    std::vector<cplx> work = coeffs;
    for (int j = 0; j <= order; ++j) {
        if (work.empty()) {
            break;
        }
        if (work.size() == 1) {
            jet[static_cast<std::size_t>(j)] = work[0];
            work.clear();
            continue;
        }
        const std::size_t d = work.size() - 1;
        std::vector<cplx> q(d);
        q[d - 1] = work[d];
        for (std::size_t i = d - 1; i >= 1; --i) {
            q[i - 1] = work[i] + xi * q[i];
        }
        jet[static_cast<std::size_t>(j)] = work[0] + xi * q[0];
        work = std::move(q);
    }
    return jet;
}

// Jet of (xi - node)^power at xi for negative power, scaled derivatives.
std::vector<cplx> negative_power_jet(cplx xi, cplx node, int power, int order) {
    std::vector<std::pair<cplx, int>> factors{{node, -power}};
    return detail::inverse_power_product_jet(xi, factors, static_cast<std::size_t>(order));
}

bool product_form_usable(const ProductForm& pf, cplx xi) {
    for (const auto& [node, power] : pf.factors) {
        if (power < 0 && std::abs(xi - node) < 0.05 * (1.0 + std::abs(node))) {
            return false;
        }
    }
    return true;
}

cplx product_form_eval(const ProductForm& pf, cplx xi, int order) {
    std::vector<cplx> jet(static_cast<std::size_t>(order) + 1, cplx{0.0, 0.0});
    jet[0] = pf.scale;
    if (pf.entire) {
        std::vector<cplx> ejet(static_cast<std::size_t>(order) + 1);
        double fact = 1.0;
        for (int i = 0; i <= order; ++i) {
            if (i > 0) {
                fact *= static_cast<double>(i);
            }
            ejet[static_cast<std::size_t>(i)] = eval(*pf.entire, xi, i) / fact;
        }
        jet = detail::jet_mul(jet, ejet, static_cast<std::size_t>(order));
    }
    for (const auto& [node, power] : pf.factors) {
        const auto fjet = power >= 0
                              ? detail::linear_power_jet(xi, node, power, static_cast<std::size_t>(order))
                              : negative_power_jet(xi, node, power, order);
        jet = detail::jet_mul(jet, fjet, static_cast<std::size_t>(order));
    }
    double fact = 1.0;
    for (int i = 2; i <= order; ++i) {
        fact *= static_cast<double>(i);
    }
    return jet[static_cast<std::size_t>(order)] * fact;
}

// Taylor pairing over explicit transform coefficients. `finite_exact` marks
// a transform whose coefficient list is complete (polynomials): the sum
// terminates and the divergence guard does not apply.
PairResult taylor_pairing(const std::vector<cplx>& g, const TaylorStream& f, std::size_t n_max,
                          double declared_tail, bool finite_exact = false) {
    PairResult out;
    // n! overflows double near n = 171 while g_n underflows; the product is
    // formed in long double so deep truncations stay finite.
    long double fact = 1.0L;
    TailEstimator est;
    const std::size_t top = std::min(n_max, g.empty() ? n_max : g.size() - 1);
    for (std::size_t n = 0; n <= top; ++n) {
        if (n > 0) {
            fact *= static_cast<long double>(n);
        }
        const std::complex<long double> wide =
            fact * std::complex<long double>(g[n]) * std::complex<long double>(f.coeff(n));
        const cplx term{static_cast<double>(wide.real()), static_cast<double>(wide.imag())};
        out.value += term;
        est.push(std::abs(term));
    }
    if (finite_exact) {
        out.tail_estimate = declared_tail;
        return out;
    }
    if (est.divergent()) {
        throw DivergentPairingError("pair: term ratio did not fall below 1");
    }
    out.tail_estimate = declared_tail + est.tail();
    return out;
}

PairResult pair_fixed(const AnalyticFunctional& S, const TaylorStream& f, std::size_t n_max) {
    if (const auto* spec = std::get_if<EntireFunctionSpec>(&S.fb)) {
        if (spec->is<ExpSumSpec>()) {
            // Point masses: <S, f> = sum_j w_j f(lambda_j).
            PairResult out;
            for (const auto& t : spec->as<ExpSumSpec>().terms) {
                if (f.has_source()) {
                    out.value += t.weight * eval(f.source(), t.frequency, 0);
                } else {
                    const auto s = sum_stream_at(f, t.frequency, n_max);
                    if (!s.converged) {
                        throw DivergentPairingError("pair: stream series diverges at a point mass");
                    }
                    out.value += t.weight * s.value;
                    out.tail_estimate += std::abs(t.weight) * s.tail;
                }
            }
            return out;
        }
        if (spec->is<SegmentAverageSpec>()) {
            // Mean over the segment, by Gauss-Legendre quadrature.
            const double t = spec->as<SegmentAverageSpec>().length;
            const auto& rule = gauss64();
            PairResult out;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const cplx x{0.5 * t * rule.nodes[i], 0.0};
                if (f.has_source()) {
                    out.value += 0.5 * rule.weights[i] * eval(f.source(), x, 0);
                } else {
                    const auto s = sum_stream_at(f, x, n_max);
                    if (!s.converged) {
                        throw DivergentPairingError("pair: stream series diverges at a quadrature node");
                    }
                    out.value += 0.5 * rule.weights[i] * s.value;
                    out.tail_estimate += 0.5 * rule.weights[i] * s.tail;
                }
            }
            return out;
        }
        if (spec->is<PolynomialSpec>()) {
            const auto& coeffs = spec->as<PolynomialSpec>().coeffs;
            if (n_max + 1 < coeffs.size()) {
                throw DomainError("pair: n_max below the polynomial degree");
            }
            return taylor_pairing(coeffs, f, coeffs.size() - 1, 0.0, /*finite_exact=*/true);
        }
        return taylor_pairing(taylor(*spec, n_max), f, n_max, 0.0);
    }
    const auto& series = std::get<SyntheticSeries>(S.fb);
    return taylor_pairing(series.coeffs, f, n_max, series.tail_bound);
}

// Closed-form pairing for streams backed by exponential-polynomial specs:
// <S, z^i e^{lambda z}> = L(S)^(i)(lambda).
std::optional<PairResult> pair_exponential_source(const AnalyticFunctional& S, const TaylorStream& f) {
    if (!f.has_source()) {
        return std::nullopt;
    }
    const auto& src = f.source();
    PairResult out;
    if (src.is<ExpSumSpec>()) {
        for (const auto& t : src.as<ExpSumSpec>().terms) {
            out.value += t.weight * fb_eval(S, t.frequency, 0);
        }
        return out;
    }
    if (src.is<PolyExpSumSpec>()) {
        for (const auto& t : src.as<PolyExpSumSpec>().terms) {
            for (std::size_t i = 0; i < t.poly.size(); ++i) {
                if (t.poly[i] != cplx{0.0, 0.0}) {
                    out.value += t.poly[i] * fb_eval(S, t.frequency, static_cast<int>(i));
                }
            }
        }
        return out;
    }
    if (src.is<PolynomialSpec>()) {
        // Finite stream: the Taylor pairing is exact.
        const auto& fc = src.as<PolynomialSpec>().coeffs;
        const std::size_t deg = fc.size() - 1;
        const auto g = fb_taylor(S, deg);
        long double fact = 1.0L;
        for (std::size_t n = 0; n <= deg; ++n) {
            if (n > 0) {
                fact *= static_cast<long double>(n);
            }
            const std::complex<long double> wide =
                fact * std::complex<long double>(g[n]) * std::complex<long double>(fc[n]);
            out.value += cplx{static_cast<double>(wide.real()), static_cast<double>(wide.imag())};
        }
        return out;
    }
    return std::nullopt;
}

} // namespace

cplx fb_eval(const AnalyticFunctional& S, cplx xi, int order) {
    if (S.closed_form && product_form_usable(*S.closed_form, xi)) {
        return product_form_eval(*S.closed_form, xi, order);
    }
    if (const auto* spec = std::get_if<EntireFunctionSpec>(&S.fb)) {
        return eval(*spec, xi, order);
    }
    const auto& series = std::get<SyntheticSeries>(S.fb);
    const auto jet = series_jet(series.coeffs, xi, order);
    double fact = 1.0;
    for (int i = 2; i <= order; ++i) {
        fact *= static_cast<double>(i);
    }
    return jet[static_cast<std::size_t>(order)] * fact;
}

std::vector<cplx> fb_taylor(const AnalyticFunctional& S, std::size_t n_max) {
    if (const auto* spec = std::get_if<EntireFunctionSpec>(&S.fb)) {
        return taylor(*spec, n_max);
    }
    return series_taylor(std::get<SyntheticSeries>(S.fb), n_max);
}

PairResult pair(const AnalyticFunctional& S, const TaylorStream& f, std::size_t n_max) {
    return pair_fixed(S, f, n_max);
}

PairResult pair(const AnalyticFunctional& S, const TaylorStream& f) {
    if (auto exact = pair_exponential_source(S, f)) {
        return *exact;
    }
    std::size_t n = kDefaultPairTerms;
    while (true) {
        PairResult r = pair_fixed(S, f, n);
        if (r.tail_estimate < 1e-10 * (1.0 + std::abs(r.value))) {
            return r;
        }
        if (n >= kMaxPairTerms) {
            r.converged = false;
            return r;
        }
        n *= 2;
    }
}

AnalyticFunctional s_functional(const MultiplicityVariety& V, std::size_t k, std::size_t l) {
    if (k >= V.size() || l >= static_cast<std::size_t>(V[k].multiplicity)) {
        throw IndexError("s_functional: indices out of range");
    }
    // Expand (xi - alpha_k)^l prod_{n<k} (xi - alpha_n)^{m_n} by coefficient
    // convolution of the linear factors.
    std::vector<cplx> coeffs{cplx{1.0, 0.0}};
    const auto mul_linear = [&coeffs](cplx alpha) {
        std::vector<cplx> next(coeffs.size() + 1, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            next[i + 1] += coeffs[i];
            next[i] -= alpha * coeffs[i];
        }
        coeffs = std::move(next);
    };
    ProductForm pf;
    for (std::size_t n = 0; n < k; ++n) {
        for (int i = 0; i < V[n].multiplicity; ++i) {
            mul_linear(V[n].location);
        }
        pf.factors.emplace_back(V[n].location, V[n].multiplicity);
    }
    for (std::size_t i = 0; i < l; ++i) {
        mul_linear(V[k].location);
    }
    if (l > 0) {
        pf.factors.emplace_back(V[k].location, static_cast<int>(l));
    }

    AnalyticFunctional S;
    S.fb = EntireFunctionSpec::polynomial(std::move(coeffs));
    S.closed_form = std::move(pf);
    S.label = "S[" + std::to_string(k) + "," + std::to_string(l) + "]";
    return S;
}

AnalyticFunctional t_functional(const EntireFunctionSpec& phi, const MultiplicityVariety& V,
                                std::size_t k, std::size_t l, std::size_t n_max) {
    if (k >= V.size()) {
        throw IndexError("t_functional: node index out of range");
    }
    const int mk = V[k].multiplicity;
    if (l >= static_cast<std::size_t>(mk)) {
        throw IndexError("t_functional: derivative slot must satisfy l < m_k");
    }
    const cplx alpha = V[k].location;
    const int deflations = mk - static_cast<int>(l);

    double fact = 1.0;
    for (int i = 2; i <= mk; ++i) {
        fact *= static_cast<double>(i);
    }
    const cplx lead = eval(phi, alpha, mk);
    if (std::abs(lead) < 1e-14) {
        throw DerivativeVanishesError("t_functional: phi^(m_k)(alpha_k) vanishes");
    }
    const cplx scale = fact / lead;

    std::vector<cplx> work = taylor(phi, n_max + static_cast<std::size_t>(deflations));
    for (int d = 0; d < deflations; ++d) {
        // Residual of the division: the series value at alpha must vanish.
        cplx value{0.0, 0.0};
        double scale_abs = 1.0;
        cplx ap{1.0, 0.0};
        for (std::size_t n = 0; n < work.size(); ++n) {
            if (n > 0) {
                ap *= alpha;
            }
            value += work[n] * ap;
            scale_abs = std::max(scale_abs, std::abs(work[n] * ap));
        }
        if (std::abs(value) > 1e-8 * scale_abs) {
            throw DeflationResidualError("t_functional: deflation residual too large at alpha_k");
        }
        // q_i = phi_{i+1} + alpha q_{i+1}, downward from the top.
        std::vector<cplx> quotient(work.size() - 1, cplx{0.0, 0.0});
        cplx carry{0.0, 0.0};
        for (std::size_t i = work.size() - 1; i-- > 0;) {
            carry = work[i + 1] + alpha * carry;
            quotient[i] = carry;
        }
        work = std::move(quotient);
    }
    for (auto& c : work) {
        c *= scale;
    }

    SyntheticSeries series;
    double tail = 0.0;
    if (work.size() >= 2) {
        const double a = std::abs(work[work.size() - 2]);
        const double b = std::abs(work.back());
        if (a > 0.0 && b / a < 1.0) {
            tail = b * (b / a) / (1.0 - b / a);
        } else {
            tail = b;
        }
    }
    series.coeffs = std::move(work);
    series.tail_bound = tail;

    ProductForm pf;
    pf.scale = scale;
    pf.entire = phi;
    pf.factors.emplace_back(alpha, -deflations);

    AnalyticFunctional T;
    T.fb = std::move(series);
    T.closed_form = std::move(pf);
    T.label = "T[" + std::to_string(k) + "," + std::to_string(l) + "]";
    return T;
}

cplx convolve(const AnalyticFunctional& T, const TaylorStream& f, cplx z) {
    if (f.has_source()) {
        const auto& src = f.source();
        // Shift an exponential polynomial exactly: f(z + w) stays in the catalog.
        if (src.is<ExpSumSpec>() || src.is<PolyExpSumSpec>() || src.is<PolynomialSpec>()) {
            std::vector<PolyExpSumSpec::Term> shifted;
            const auto add_term = [&](const std::vector<cplx>& poly, cplx lambda) {
                // p(z + w) e^{lambda (z+w)} = e^{lambda z} * [sum_i w^i sum_{s>=i} p_s C(s,i) z^{s-i}] e^{lambda w}
                std::vector<cplx> out(poly.size(), cplx{0.0, 0.0});
                for (std::size_t i = 0; i < poly.size(); ++i) {
                    double binom = 1.0;
                    cplx zp{1.0, 0.0};
                    for (std::size_t s = i; s < poly.size(); ++s) {
                        out[i] += poly[s] * binom * zp;
                        zp *= z;
                        binom *= static_cast<double>(s + 1) / static_cast<double>(s + 1 - i);
                    }
                }
                const cplx pref = std::exp(lambda * z);
                for (auto& c : out) {
                    c *= pref;
                }
                shifted.push_back(PolyExpSumSpec::Term{std::move(out), lambda});
            };
            if (src.is<ExpSumSpec>()) {
                for (const auto& t : src.as<ExpSumSpec>().terms) {
                    add_term({t.weight}, t.frequency);
                }
            } else if (src.is<PolyExpSumSpec>()) {
                for (const auto& t : src.as<PolyExpSumSpec>().terms) {
                    add_term(t.poly, t.frequency);
                }
            } else {
                add_term(src.as<PolynomialSpec>().coeffs, cplx{0.0, 0.0});
            }
            const auto shifted_spec = EntireFunctionSpec::poly_exp_sum(std::move(shifted));
            return pair(T, taylor_stream_of(shifted_spec, f.growth_theta(), f.growth_scale()))
                .value;
        }
    }
    if (const auto* spec = std::get_if<EntireFunctionSpec>(&T.fb); spec && spec->is<ExpSumSpec>()) {
        // Point masses act on shifted arguments directly.
        cplx acc{0.0, 0.0};
        for (const auto& t : spec->as<ExpSumSpec>().terms) {
            acc += t.weight * stream_value(f, z + t.frequency);
        }
        return acc;
    }
    // Binomial recentering of the stream at z, summed smallest-first.
    const std::size_t depth = kMaxPairTerms;
    auto recentered = [&f, z, depth](std::size_t n) -> cplx {
        std::vector<cplx> terms;
        double binom = 1.0; // C(n + i, i)
        cplx zp{1.0, 0.0};
        for (std::size_t i = 0; n + i <= depth; ++i) {
            if (i > 0) {
                zp *= z;
                binom *= static_cast<double>(n + i) / static_cast<double>(i);
            }
            const cplx term = binom * f.coeff(n + i) * zp;
            terms.push_back(term);
            if (i > 8 && std::abs(term) < 1e-20 * (1.0 + std::abs(terms.front()))) {
                break;
            }
        }
        std::sort(terms.begin(), terms.end(),
                  [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
        cplx acc{0.0, 0.0};
        for (const cplx& t : terms) {
            acc += t;
        }
        return acc;
    };
    TaylorStream shifted{recentered, f.growth_theta(), f.growth_scale()};
    return pair(T, shifted).value;
}

double verify_monomial_identity(const AnalyticFunctional& T, const EntireFunctionSpec& phi,
                                cplx xi, int l) {
    if (l < 0 || l > 10) {
        throw DomainError("verify_monomial_identity: l must lie in [0, 10]");
    }
    const auto monomial = exponential_monomial(l, xi);
    const auto stream = taylor_stream_of(monomial, YoungSpec::linear(), 1.0);
    const cplx paired = pair(T, stream).value;
    return std::abs(paired - eval(phi, xi, l));
}

EntireFunctionSpec exponential_monomial(int l, cplx xi) {
    std::vector<cplx> poly(static_cast<std::size_t>(l) + 1, cplx{0.0, 0.0});
    poly.back() = cplx{1.0, 0.0};
    return EntireFunctionSpec::poly_exp_sum({PolyExpSumSpec::Term{std::move(poly), xi}});
}

} // namespace meanper
