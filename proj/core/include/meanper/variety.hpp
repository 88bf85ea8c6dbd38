#ifndef MEANPER_VARIETY_HPP
#define MEANPER_VARIETY_HPP

#include <vector>

#include "meanper/entire.hpp"
#include "meanper/growth.hpp"

namespace meanper {

/// Counted samples of the counting functions around one center.
struct CountingProfile {
    cplx center;
    struct Sample {
        double r;
        int n;
        double N;
    };
    std::vector<Sample> samples;
};

enum class CriterionVerdict { Pass, Inconclusive };

/// One fitted criterion: y <= A + theta(m r) over the sampled data, with the
/// half-radius excess kept for the stability comparison.
struct CriterionFit {
    double m = 0.0;
    double A = 0.0;
    double A_half = 0.0; // excess over the half-radius prefix, at the same m
    bool stable = false;
};

struct GeometricReport {
    CriterionFit origin;   // N(0, R) against theta(m R)
    CriterionFit diagonal; // N(alpha_k, |alpha_k|) against theta(m |alpha_k|)
    CountingProfile profile; // n and N sampled from the origin
    CriterionVerdict verdict = CriterionVerdict::Inconclusive;
};

struct AnalyticReport {
    double eps = 0.0; // fitted lower-bound constant
    double m = 0.0;
    CriterionFit fit; // on y_k = -log(|phi^(m_k)(alpha_k)| / m_k!)
    CriterionVerdict verdict = CriterionVerdict::Inconclusive;
};

/// n(z, r): multiplicities within distance r of z.
int little_n(const MultiplicityVariety& V, cplx z, double r);

/// N(z, r): closed-form integrated counting function,
/// sum_{0<|z-a_k|<=r} m_k log(r / |z-a_k|) + n(z,0) log r.
double big_N(const MultiplicityVariety& V, cplx z, double r);

/// Geometric interpolation criterion: fits both counting-function bounds and
/// passes only when the additive constants stay put as the truncation radius
/// doubles. Finite data never certifies failure, hence Pass/Inconclusive.
GeometricReport geometric_test(const MultiplicityVariety& V, const YoungSpec& theta,
                               const std::vector<double>& m_grid);

/// Analytic interpolation criterion: lower bound on the normalized leading
/// derivative of phi at each zero, |phi^(m_k)(alpha_k)/m_k!| >= eps e^{-theta(m |alpha_k|)}.
AnalyticReport analytic_test(const EntireFunctionSpec& phi, const MultiplicityVariety& V,
                             const YoungSpec& theta, const std::vector<double>& m_grid);

/// Diagnostic for the multiplicity growth bound m_k <= A e^{theta(m |alpha_k|)}.
CriterionFit multiplicity_bound_check(const MultiplicityVariety& V, const YoungSpec& theta,
                                      const std::vector<double>& m_grid);

} // namespace meanper

#endif
