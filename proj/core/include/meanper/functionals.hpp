#ifndef MEANPER_FUNCTIONALS_HPP
#define MEANPER_FUNCTIONALS_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "meanper/entire.hpp"

namespace meanper {

/// Explicit truncated Taylor coefficients of a transform, with a declared
/// bound on what the truncation dropped.
struct SyntheticSeries {
    std::vector<cplx> coeffs;
    double tail_bound = 0.0;
};

/// Exact evaluation route for a transform that factors as
/// scale * E(xi) * prod (xi - node)^power (powers may be negative). Keeping
/// the factored form lets pairings hit exact zeros and exact pole
/// cancellations that the expanded coefficients lose to roundoff.
struct ProductForm {
    cplx scale{1.0, 0.0};
    std::optional<EntireFunctionSpec> entire;
    std::vector<std::pair<cplx, int>> factors;
};

/// A dual element, represented by its Fourier-Borel transform. The pairing
/// realization is the Taylor pairing <S, f> = sum_n n! g_n f_n where g are
/// the transform's coefficients; point-mass, quadrature and closed-form
/// shortcuts agree with it and are used when they are exact.
struct AnalyticFunctional {
    std::variant<SyntheticSeries, EntireFunctionSpec> fb;
    std::optional<ProductForm> closed_form;
    std::string label;
};

struct PairResult {
    cplx value{0.0, 0.0};
    double tail_estimate = 0.0;
    bool converged = true;
};

/// Transform value L(S)^(order)(xi). Uses the factored closed form when it
/// is safe, the series otherwise.
cplx fb_eval(const AnalyticFunctional& S, cplx xi, int order = 0);

/// Taylor coefficients of L(S) up to n_max.
std::vector<cplx> fb_taylor(const AnalyticFunctional& S, std::size_t n_max);

/// Truncated Taylor pairing sum_{n<=n_max} n! g_n f_n with a geometric tail
/// estimate from the last terms. Point-mass and quadrature shortcuts apply
/// for exponential-sum and segment-average transforms. Throws
/// DivergentPairingError when the term ratios exceed 1.
PairResult pair(const AnalyticFunctional& S, const TaylorStream& f, std::size_t n_max);

/// Adaptive pairing: starts at n_max = 128 and doubles until the tail
/// estimate drops below 1e-10 (1 + |value|) or 1024 is reached (then flagged
/// via converged = false). Streams with an exponential-polynomial source are
/// paired in closed form instead.
PairResult pair(const AnalyticFunctional& S, const TaylorStream& f);

/// S_{k,l}: transform (xi - alpha_k)^l prod_{n<k} (xi - alpha_n)^{m_n},
/// expanded by exact coefficient convolution of the linear factors.
AnalyticFunctional s_functional(const MultiplicityVariety& V, std::size_t k, std::size_t l);

/// T_{k,l}: transform m_k!/phi^(m_k)(alpha_k) * phi(xi)/(xi-alpha_k)^{m_k-l},
/// realized as phi's series deflated (m_k - l) times at alpha_k. Each
/// deflation's residual must stay below 1e-8 of the series scale, else
/// DeflationResidualError.
AnalyticFunctional t_functional(const EntireFunctionSpec& phi, const MultiplicityVariety& V,
                                std::size_t k, std::size_t l, std::size_t n_max = 160);

/// (T * f)(z) = <T, f(z + .)>, by exact shifting for exponential-polynomial
/// streams and binomial recentering otherwise.
cplx convolve(const AnalyticFunctional& T, const TaylorStream& f, cplx z);

/// | <T, z^l e^{xi z}> - phi^(l)(xi) | for T with transform phi.
double verify_monomial_identity(const AnalyticFunctional& T, const EntireFunctionSpec& phi,
                                cplx xi, int l);

/// The exponential monomial z^l e^{xi z} as a catalog spec (poly * exp).
EntireFunctionSpec exponential_monomial(int l, cplx xi);

} // namespace meanper

#endif
