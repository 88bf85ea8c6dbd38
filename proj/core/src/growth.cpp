#include "meanper/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace meanper {

namespace {

constexpr double kConvexityTol = 1e-9;

void validate_table(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 3) {
        throw DomainError("tabulated Young function needs at least 3 points");
    }
    if (pts.front().first != 0.0 || pts.front().second != 0.0) {
        throw DomainError("tabulated Young function must start at (0, 0)");
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i].first > pts[i - 1].first)) {
            throw DomainError("tabulated abscissae must be strictly increasing");
        }
        if (pts[i].second < pts[i - 1].second - kConvexityTol) {
            throw DomainError("tabulated Young function must be nondecreasing");
        }
    }
    // Convexity on every sampled triple: chord slopes must not decrease.
    for (std::size_t i = 2; i < pts.size(); ++i) {
        const double s0 = (pts[i - 1].second - pts[i - 2].second) / (pts[i - 1].first - pts[i - 2].first);
        const double s1 = (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
        if (s1 < s0 - kConvexityTol * (1.0 + std::abs(s0))) {
            throw DomainError("tabulated Young function is not convex");
        }
    }
    // Superlinearity probe at the two largest abscissae.
    const auto& a = pts[pts.size() - 2];
    const auto& b = pts.back();
    if (a.first > 0.0 && b.first > 0.0) {
        if (b.second / b.first < a.second / a.first - kConvexityTol) {
            throw DomainError("tabulated Young function fails the superlinearity probe");
        }
    }
}

} // namespace

YoungSpec YoungSpec::linear() {
    YoungSpec s;
    s.kind_ = Kind::Linear;
    return s;
}

YoungSpec YoungSpec::power(double exponent) {
    if (!(exponent > 1.0)) {
        throw DomainError("power Young function requires exponent > 1");
    }
    YoungSpec s;
    s.kind_ = Kind::Power;
    s.exponent_ = exponent;
    return s;
}

YoungSpec YoungSpec::tabulated(std::vector<std::pair<double, double>> points) {
    std::sort(points.begin(), points.end());
    validate_table(points);
    YoungSpec s;
    s.kind_ = Kind::Tabulated;
    s.table_ = std::move(points);
    return s;
}

double YoungSpec::domain_max() const {
    if (kind_ == Kind::Tabulated) {
        return table_.back().first;
    }
    return std::numeric_limits<double>::infinity();
}

double eval_theta(const YoungSpec& theta, double x) {
    if (x < 0.0) {
        throw DomainError("eval_theta: negative argument");
    }
    switch (theta.kind()) {
    case YoungSpec::Kind::Linear:
        return x;
    case YoungSpec::Kind::Power:
        return std::pow(x, theta.exponent());
    case YoungSpec::Kind::Tabulated: {
        const auto& t = theta.table();
        if (x > t.back().first) {
            throw DomainError("eval_theta: argument beyond the tabulated range");
        }
        auto it = std::lower_bound(t.begin(), t.end(), x,
                                   [](const auto& p, double v) { return p.first < v; });
        if (it == t.begin()) {
            return t.front().second;
        }
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (x - lo.first) / (hi.first - lo.first);
        return lo.second + w * (hi.second - lo.second);
    }
    }
    throw DomainError("eval_theta: unknown kind");
}

double legendre(const YoungSpec& theta, double x) {
    if (theta.kind() == YoungSpec::Kind::Linear) {
        throw LinearCaseError{};
    }
    if (x < 0.0) {
        throw DomainError("legendre: negative argument");
    }
    const auto g = [&](double t) { return t * x - eval_theta(theta, t); };

    // Bracket the maximizer. g is concave with g(0) = 0, so expand until g
    // starts decreasing (superlinearity guarantees it does), capped at the
    // tabulated range when there is one.
    double hi = 1.0;
    const double cap = theta.domain_max();
    if (std::isfinite(cap)) {
        hi = cap;
    } else {
        while (g(2.0 * hi) > g(hi) && hi < 1e300) {
            hi *= 2.0;
        }
        hi *= 2.0;
    }

    double lo = 0.0;
    const double width_tol = 1e-12 * (1.0 + x);
    while (hi - lo > width_tol) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (g(m1) < g(m2)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    // sup includes t = 0 where g vanishes.
    return std::max(0.0, g(0.5 * (lo + hi)));
}

double theta_norm(const std::vector<std::pair<std::complex<double>, std::complex<double>>>& values,
                  const YoungSpec& theta, double m) {
    if (values.empty()) {
        throw DomainError("theta_norm: empty sample set");
    }
    if (!(m > 0.0)) {
        throw DomainError("theta_norm: scale must be positive");
    }
    double best = 0.0;
    for (const auto& [z, v] : values) {
        best = std::max(best, std::abs(v) * std::exp(-eval_theta(theta, m * std::abs(z))));
    }
    return best;
}

std::optional<double> growth_excess(const std::vector<std::pair<double, double>>& points,
                                    const YoungSpec& theta, double m) {
    const double cap = theta.domain_max();
    double excess = -std::numeric_limits<double>::infinity();
    for (const auto& [r, y] : points) {
        if (m * r > cap) {
            return std::nullopt;
        }
        excess = std::max(excess, y - eval_theta(theta, m * r));
    }
    return excess;
}

std::optional<GrowthBound> fit_growth_bound(const std::vector<std::pair<double, double>>& points,
                                            const YoungSpec& theta,
                                            const std::vector<double>& m_grid) {
    if (points.empty() || m_grid.empty()) {
        throw DomainError("fit_growth_bound: empty input");
    }
    std::vector<double> grid = m_grid;
    std::sort(grid.begin(), grid.end());

    std::vector<std::pair<double, std::optional<double>>> scanned;
    bool all_finite = true;
    for (double m : grid) {
        if (!(m > 0.0)) {
            throw DomainError("fit_growth_bound: scales must be positive");
        }
        scanned.emplace_back(m, growth_excess(points, theta, m));
        all_finite = all_finite && scanned.back().second.has_value();
    }

    std::optional<GrowthBound> best;
    for (const auto& [m, excess] : scanned) {
        if (!excess) {
            continue;
        }
        if (!all_finite) {
            // Some scale is inadmissible: the smallest admissible one wins.
            return GrowthBound{m, *excess};
        }
        if (!best || *excess < best->A) {
            best = GrowthBound{m, *excess};
        }
    }
    return best;
}

} // namespace meanper
