#include "meanper/variety.hpp"

#include <algorithm>
#include <cmath>

namespace meanper {

namespace {

// Tolerance for "the center is one of the zeros".
double center_tol(cplx z) {
    return 1e-12 * (1.0 + std::abs(z));
}

// Fits y <= A + theta(m r): picks m by fit_growth_bound over the full data,
// then reruns the excess at the same m on the half-radius prefix. Stability
// means the constant did not move by more than 10% as the radius doubled.
CriterionFit fit_with_halving(const std::vector<std::pair<double, double>>& points,
                              const YoungSpec& theta, const std::vector<double>& m_grid) {
    CriterionFit fit;
    const auto full = fit_growth_bound(points, theta, m_grid);
    if (!full) {
        return fit; // not stable, all scales inadmissible
    }
    fit.m = full->m;
    fit.A = full->A;

    double r_max = 0.0;
    for (const auto& [r, y] : points) {
        r_max = std::max(r_max, r);
    }
    std::vector<std::pair<double, double>> half;
    for (const auto& [r, y] : points) {
        if (r <= 0.5 * r_max) {
            half.emplace_back(r, y);
        }
    }
    if (half.empty()) {
        // Everything sits at one radius; nothing to compare against.
        fit.A_half = fit.A;
        fit.stable = true;
        return fit;
    }
    const auto half_excess = growth_excess(half, theta, fit.m);
    fit.A_half = half_excess.value_or(fit.A);
    fit.stable = (fit.A - fit.A_half) <= 0.1 * (1.0 + std::abs(fit.A_half));
    return fit;
}

} // namespace

int little_n(const MultiplicityVariety& V, cplx z, double r) {
    if (r < 0.0) {
        throw DomainError("little_n: negative radius");
    }
    int n = 0;
    for (const auto& p : V.points()) {
        if (std::abs(z - p.location) <= r + center_tol(z)) {
            n += p.multiplicity;
        }
    }
    return n;
}

double big_N(const MultiplicityVariety& V, cplx z, double r) {
    if (!(r > 0.0)) {
        throw DomainError("big_N: radius must be positive");
    }
    const double tol = center_tol(z);
    double acc = 0.0;
    int at_center = 0;
    for (const auto& p : V.points()) {
        const double d = std::abs(z - p.location);
        if (d <= tol) {
            at_center += p.multiplicity;
        } else if (d <= r) {
            acc += p.multiplicity * std::log(r / d);
        }
    }
    return acc + at_center * std::log(r);
}

GeometricReport geometric_test(const MultiplicityVariety& V, const YoungSpec& theta,
                               const std::vector<double>& m_grid) {
    if (V.empty()) {
        throw EmptyVarietyError{};
    }
    GeometricReport report;
    report.profile.center = cplx{0.0, 0.0};

    // Radii: the zero moduli plus geometric midpoints between consecutive
    // distinct ones. N has kinks exactly at the moduli.
    std::vector<double> moduli;
    for (const auto& p : V.points()) {
        if (std::abs(p.location) > 0.0) {
            moduli.push_back(std::abs(p.location));
        }
    }
    std::sort(moduli.begin(), moduli.end());
    moduli.erase(std::unique(moduli.begin(), moduli.end()), moduli.end());

    std::vector<double> radii;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        radii.push_back(moduli[i]);
        if (i + 1 < moduli.size() && moduli[i + 1] > moduli[i]) {
            radii.push_back(std::sqrt(moduli[i] * moduli[i + 1]));
        }
    }
    if (radii.empty()) {
        radii.push_back(1.0); // variety is {0} alone
    }
    std::sort(radii.begin(), radii.end());

    std::vector<std::pair<double, double>> origin_pts;
    for (double r : radii) {
        const double N = big_N(V, cplx{0.0, 0.0}, r);
        origin_pts.emplace_back(r, N);
        report.profile.samples.push_back({r, little_n(V, cplx{0.0, 0.0}, r), N});
    }
    report.origin = fit_with_halving(origin_pts, theta, m_grid);

    std::vector<std::pair<double, double>> diag_pts;
    for (const auto& p : V.points()) {
        const double r = std::abs(p.location);
        if (r > 0.0) {
            diag_pts.emplace_back(r, big_N(V, p.location, r));
        }
    }
    if (diag_pts.empty()) {
        report.diagonal.stable = true; // nothing off the origin to test
    } else {
        report.diagonal = fit_with_halving(diag_pts, theta, m_grid);
    }

    report.verdict = (report.origin.stable && report.diagonal.stable) ? CriterionVerdict::Pass
                                                                      : CriterionVerdict::Inconclusive;
    return report;
}

AnalyticReport analytic_test(const EntireFunctionSpec& phi, const MultiplicityVariety& V,
                             const YoungSpec& theta, const std::vector<double>& m_grid) {
    if (V.empty()) {
        throw EmptyVarietyError{};
    }
    std::vector<std::pair<double, double>> points;
    for (const auto& p : V.points()) {
        double fact = 1.0;
        for (int i = 2; i <= p.multiplicity; ++i) {
            fact *= static_cast<double>(i);
        }
        const double lead = std::abs(eval(phi, p.location, p.multiplicity)) / fact;
        if (lead < 1e-14) {
            throw DerivativeVanishesError(
                "analytic_test: leading derivative vanishes at a reported zero");
        }
        points.emplace_back(std::abs(p.location), -std::log(lead));
    }
    AnalyticReport report;
    report.fit = fit_with_halving(points, theta, m_grid);
    report.m = report.fit.m;
    report.eps = std::exp(-report.fit.A);
    report.verdict = report.fit.stable ? CriterionVerdict::Pass : CriterionVerdict::Inconclusive;
    return report;
}

CriterionFit multiplicity_bound_check(const MultiplicityVariety& V, const YoungSpec& theta,
                                      const std::vector<double>& m_grid) {
    if (V.empty()) {
        throw EmptyVarietyError{};
    }
    std::vector<std::pair<double, double>> points;
    for (const auto& p : V.points()) {
        points.emplace_back(std::abs(p.location), std::log(static_cast<double>(p.multiplicity)));
    }
    return fit_with_halving(points, theta, m_grid);
}

} // namespace meanper
