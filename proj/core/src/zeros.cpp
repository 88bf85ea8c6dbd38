#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <vector>

#include "meanper/entire.hpp"

namespace meanper {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMultiplicityCap = 8;

struct Rect {
    double x0, y0, x1, y1;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double diam() const { return std::hypot(width(), height()); }
    cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

// Trapezoid estimate of (1/2 pi i) * integral of phi'/phi over the segment
// [a, b]. Returns nullopt when a node sits too close to a zero.
std::optional<cplx> segment_logderiv_integral(const EntireFunctionSpec& phi, cplx a, cplx b, int n) {
    const cplx step = (b - a) / static_cast<double>(n);
    cplx acc{0.0, 0.0};
    double max_mod = 0.0;
    double min_mod = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const cplx xi = a + step * static_cast<double>(i);
        const cplx v = eval(phi, xi, 0);
        const double mod = std::abs(v);
        max_mod = std::max(max_mod, mod);
        min_mod = std::min(min_mod, mod);
        if (mod == 0.0) {
            return std::nullopt;
        }
        const cplx g = eval(phi, xi, 1) / v;
        acc += (i == 0 || i == n) ? 0.5 * g : g;
    }
    if (min_mod < 1e-13 * max_mod) {
        return std::nullopt;
    }
    return acc * step / cplx{0.0, 2.0 * kPi};
}

// Winding number of phi around a rectangle, doubling the per-side node count
// until two consecutive estimates agree within 0.05. nullopt = unstable.
std::optional<int> rect_winding(const EntireFunctionSpec& phi, const Rect& r) {
    const cplx c00{r.x0, r.y0}, c10{r.x1, r.y0}, c11{r.x1, r.y1}, c01{r.x0, r.y1};
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = 256; n <= 4096; n *= 2) {
        cplx total{0.0, 0.0};
        bool ok = true;
        for (const auto& [a, b] : {std::pair{c00, c10}, {c10, c11}, {c11, c01}, {c01, c00}}) {
            const auto part = segment_logderiv_integral(phi, a, b, n);
            if (!part) {
                ok = false;
                break;
            }
            total += *part;
        }
        if (!ok) {
            return std::nullopt;
        }
        const double est = total.real();
        if (!std::isnan(prev) && std::abs(est - prev) < 0.05) {
            const double rounded = std::round(est);
            if (std::abs(est - rounded) < 0.25 && rounded >= -0.5) {
                return static_cast<int>(rounded);
            }
        }
        prev = est;
    }
    return std::nullopt;
}

std::optional<int> circle_winding(const EntireFunctionSpec& phi, cplx center, double radius) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = 256; n <= 4096; n *= 2) {
        cplx acc{0.0, 0.0};
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
            const cplx xi = center + radius * cplx{std::cos(t), std::sin(t)};
            const cplx v = eval(phi, xi, 0);
            if (std::abs(v) == 0.0) {
                ok = false;
                break;
            }
            acc += eval(phi, xi, 1) / v * cplx{-std::sin(t), std::cos(t)};
        }
        if (!ok) {
            return std::nullopt;
        }
        // (1/2 pi i) * sum f(xi) i R e^{it} * (2 pi / n)
        const double est = (acc * radius / static_cast<double>(n) / cplx{0.0, 1.0}).real();
        if (!std::isnan(prev) && std::abs(est - prev) < 0.05) {
            const double rounded = std::round(est);
            if (std::abs(est - rounded) < 0.25) {
                return static_cast<int>(rounded);
            }
        }
        prev = est;
    }
    return std::nullopt;
}

// Multiplicity-aware Newton refinement from a starting guess.
std::optional<cplx> refine_root(const EntireFunctionSpec& phi, cplx start, int mult, const Rect& bounds) {
    cplx z = start;
    const double escape = 2.0 * bounds.diam() + 1.0;
    for (int it = 0; it < 80; ++it) {
        const cplx f = eval(phi, z, 0);
        const cplx df = eval(phi, z, 1);
        if (std::abs(df) == 0.0) {
            return std::nullopt;
        }
        const cplx step = static_cast<double>(mult) * f / df;
        z -= step;
        if (std::abs(z - bounds.center()) > escape) {
            return std::nullopt;
        }
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) {
            return z;
        }
    }
    return std::nullopt;
}

// Deterministic jitter stream for retried contours.
double jitter_unit(int salt) {
    unsigned kx = 0x9e3779b9u * static_cast<unsigned>(salt + 17);
    kx ^= kx >> 15;
    kx *= 0x85ebca6bu;
    kx ^= kx >> 13;
    return (static_cast<double>(kx % 20011u) / 20011.0) - 0.5;
}

// Splits rect across its longer side and returns both halves with verified
// windings that add up to the parent count. The split line is re-jittered
// when a zero sits on it.
std::optional<std::pair<std::pair<Rect, int>, std::pair<Rect, int>>>
split_cell(const EntireFunctionSpec& phi, const Rect& rect, int count, int* salt) {
    for (int attempt = 0; attempt < 5; ++attempt) {
        const double f = 0.5 + 0.08 * jitter_unit(++*salt);
        Rect a = rect, b = rect;
        if (rect.width() >= rect.height()) {
            a.x1 = b.x0 = rect.x0 + f * rect.width();
        } else {
            a.y1 = b.y0 = rect.y0 + f * rect.height();
        }
        const auto wa = rect_winding(phi, a);
        if (!wa) {
            continue;
        }
        const auto wb = rect_winding(phi, b);
        if (!wb) {
            continue;
        }
        if (*wa + *wb != count) {
            continue; // a zero fell on the split line
        }
        return std::pair{std::pair{a, *wa}, std::pair{b, *wb}};
    }
    return std::nullopt;
}

std::vector<ZeroPoint> contour_search(const EntireFunctionSpec& phi, double radius, double tol) {
    int salt = 0;
    Rect box{};
    std::optional<int> total;
    for (int attempt = 0; attempt < 5 && !total; ++attempt) {
        const double margin = (1e-4 + 3e-3 * attempt) * (1.0 + radius) * (1.0 + 0.2 * std::abs(jitter_unit(salt + attempt)));
        box = Rect{-radius - margin, -radius - margin * 1.18, radius + margin * 1.31, radius + margin};
        total = rect_winding(phi, box);
        ++salt;
    }
    if (!total) {
        throw ContourThroughZeroError("find_zeros: outer contour unstable after 5 jittered retries");
    }
    if (*total == 0) {
        return {};
    }

    std::vector<ZeroPoint> found;
    std::deque<std::pair<Rect, int>> queue;
    queue.emplace_back(box, *total);

    while (!queue.empty()) {
        auto [rect, count] = queue.front();
        queue.pop_front();
        if (count <= 0) {
            continue;
        }

        const double refine_diam = 0.8 * (1.0 + 0.02 * std::abs(rect.center()));
        const bool small_enough = rect.diam() <= refine_diam;

        if (!small_enough || count > kMultiplicityCap) {
            if (count > kMultiplicityCap && rect.diam() < 1e-6 * (1.0 + std::abs(rect.center()))) {
                throw MultiplicityCapError("find_zeros: cluster exceeds the multiplicity cap of 8");
            }
            const auto halves = split_cell(phi, rect, count, &salt);
            if (!halves) {
                throw ContourThroughZeroError("find_zeros: subdivision contour unstable after 5 jittered retries");
            }
            queue.push_back(halves->first);
            queue.push_back(halves->second);
            continue;
        }

        auto root = refine_root(phi, rect.center(), count, rect);
        const auto inside = [&](cplx z) {
            const double gx = 0.1 * rect.width(), gy = 0.1 * rect.height();
            return z.real() >= rect.x0 - gx && z.real() <= rect.x1 + gx &&
                   z.imag() >= rect.y0 - gy && z.imag() <= rect.y1 + gy;
        };
        if (root && !inside(*root)) {
            root.reset();
        }
        if (!root) {
            for (const cplx corner : {cplx{rect.x0, rect.y0}, cplx{rect.x1, rect.y1},
                                      cplx{rect.x0, rect.y1}, cplx{rect.x1, rect.y0}}) {
                root = refine_root(phi, 0.5 * (corner + rect.center()), count, rect);
                if (root && inside(*root)) {
                    break;
                }
                root.reset();
            }
        }
        if (!root) {
            // Newton could not settle: subdivide instead.
            const auto halves = split_cell(phi, rect, count, &salt);
            if (!halves) {
                throw ContourThroughZeroError("find_zeros: Newton refinement and subdivision both failed");
            }
            queue.push_back(halves->first);
            queue.push_back(halves->second);
            continue;
        }

        // Read the multiplicity from a small circle around the refined root.
        // The radius is floored so roundoff in phi cannot swamp |phi| ~ r^m.
        const double mult_radius = std::max(tol, 1e-7) * (1.0 + std::abs(*root));
        const auto m = circle_winding(phi, *root, mult_radius);
        if (!m || *m < 1 || *m > count) {
            throw ContourThroughZeroError("find_zeros: multiplicity circle unstable");
        }
        found.push_back(ZeroPoint{*root, *m});
        if (count - *m > 0) {
            // Other zeros share the cell: split and subtract what is booked.
            if (rect.diam() <= 8.0 * mult_radius) {
                throw ContourThroughZeroError("find_zeros: unresolved zero cluster below the resolution floor");
            }
            const auto halves = split_cell(phi, rect, count, &salt);
            if (!halves) {
                throw ContourThroughZeroError("find_zeros: subdivision contour unstable after 5 jittered retries");
            }
            for (const auto& [sub, w] : {halves->first, halves->second}) {
                int booked = 0;
                for (const auto& zp : found) {
                    if (zp.location.real() >= sub.x0 && zp.location.real() <= sub.x1 &&
                        zp.location.imag() >= sub.y0 && zp.location.imag() <= sub.y1) {
                        booked += zp.multiplicity;
                    }
                }
                if (w - booked > 0) {
                    queue.emplace_back(sub, w - booked);
                }
            }
        }
    }

    // Merge duplicates that slipped through adjacent cells.
    std::vector<ZeroPoint> merged;
    for (const auto& zp : found) {
        bool dup = false;
        for (auto& kept : merged) {
            if (std::abs(kept.location - zp.location) < 1e-6 * (1.0 + std::abs(zp.location))) {
                kept.multiplicity = std::max(kept.multiplicity, zp.multiplicity);
                dup = true;
                break;
            }
        }
        if (!dup) {
            merged.push_back(zp);
        }
    }
    return merged;
}

// Newton with synthetic-division deflation; no companion matrix.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
    std::vector<cplx> work = coeffs;
    std::vector<cplx> roots;
    const auto poly_eval = [](const std::vector<cplx>& p, cplx z) {
        cplx v{0.0, 0.0};
        for (std::size_t i = p.size(); i-- > 0;) {
            v = v * z + p[i];
        }
        return v;
    };
    const auto poly_deriv_eval = [](const std::vector<cplx>& p, cplx z) {
        cplx v{0.0, 0.0};
        for (std::size_t i = p.size(); i-- > 1;) {
            v = v * z + p[i] * static_cast<double>(i);
        }
        return v;
    };

    while (work.size() > 1) {
        double bound = 0.0;
        for (std::size_t i = 0; i + 1 < work.size(); ++i) {
            bound = std::max(bound, std::abs(work[i] / work.back()));
        }
        bound += 1.0;

        std::optional<cplx> root;
        for (int attempt = 0; attempt < 24 && !root; ++attempt) {
            const double ang = 0.401 + 2.39996 * attempt; // golden-angle fan of starts
            cplx z = bound * 0.7 * cplx{std::cos(ang), std::sin(ang)};
            for (int it = 0; it < 400; ++it) {
                const cplx f = poly_eval(work, z);
                const cplx df = poly_deriv_eval(work, z);
                if (std::abs(df) == 0.0) {
                    z += cplx{1e-4, 2e-4};
                    continue;
                }
                const cplx step = f / df;
                z -= step;
                if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) {
                    root = z;
                    break;
                }
            }
        }
        if (!root) {
            throw Error("polynomial root iteration failed to converge");
        }
        // Polish against the original polynomial before deflating.
        cplx z = *root;
        for (int it = 0; it < 8; ++it) {
            const cplx df = poly_deriv_eval(coeffs, z);
            if (std::abs(df) == 0.0) {
                break;
            }
            z -= poly_eval(coeffs, z) / df;
        }
        roots.push_back(z);

        std::vector<cplx> quotient(work.size() - 1);
        cplx carry = work.back();
        for (std::size_t i = work.size() - 1; i-- > 0;) {
            quotient[i] = carry;
            carry = work[i] + carry * z;
        }
        work = std::move(quotient);
    }
    return roots;
}

std::vector<ZeroPoint> cluster_roots(const EntireFunctionSpec& phi, std::vector<cplx> roots) {
    std::vector<ZeroPoint> out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) {
            continue;
        }
        cplx sum = roots[i];
        int m = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - roots[i]) < 1e-6 * (1.0 + std::abs(roots[i]))) {
                sum += roots[j];
                ++m;
                used[j] = true;
            }
        }
        cplx z = sum / static_cast<double>(m);
        // A few multiplicity-aware Newton steps sharpen clustered roots.
        for (int it = 0; it < 40; ++it) {
            const cplx df = eval(phi, z, 1);
            if (std::abs(df) == 0.0) {
                break;
            }
            const cplx step = static_cast<double>(m) * eval(phi, z, 0) / df;
            z -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) {
                break;
            }
        }
        out.push_back(ZeroPoint{z, m});
    }
    return out;
}

bool is_exp_minus_one(const EntireFunctionSpec& phi) {
    if (!phi.is<ExpSumSpec>()) {
        return false;
    }
    const auto& terms = phi.as<ExpSumSpec>().terms;
    if (terms.size() != 2) {
        return false;
    }
    const auto match = [](const ExpSumSpec::Term& t, cplx w, cplx f) {
        return t.weight == w && t.frequency == f;
    };
    return (match(terms[0], {1, 0}, {1, 0}) && match(terms[1], {-1, 0}, {0, 0})) ||
           (match(terms[1], {1, 0}, {1, 0}) && match(terms[0], {-1, 0}, {0, 0}));
}

} // namespace

int winding_number(const EntireFunctionSpec& phi, cplx center, double radius) {
    const auto w = circle_winding(phi, center, radius);
    if (!w) {
        throw ContourThroughZeroError("winding_number: contour passes too close to a zero");
    }
    return *w;
}

MultiplicityVariety find_zeros(const EntireFunctionSpec& phi, double radius, double tol) {
    if (!(radius > 0.0) || !(tol > 0.0)) {
        throw DomainError("find_zeros: radius and tol must be positive");
    }

    std::vector<ZeroPoint> zeros;
    if (is_exp_minus_one(phi)) {
        for (int k = 0; 2.0 * kPi * k <= radius; ++k) {
            zeros.push_back(ZeroPoint{cplx{0.0, 2.0 * kPi * k}, 1});
            if (k > 0) {
                zeros.push_back(ZeroPoint{cplx{0.0, -2.0 * kPi * k}, 1});
            }
        }
    } else if (phi.is<SegmentAverageSpec>()) {
        const double t = phi.as<SegmentAverageSpec>().length;
        for (int k = 1; 2.0 * kPi * k / t <= radius; ++k) {
            zeros.push_back(ZeroPoint{cplx{0.0, 2.0 * kPi * k / t}, 1});
            zeros.push_back(ZeroPoint{cplx{0.0, -2.0 * kPi * k / t}, 1});
        }
    } else if (phi.is<PolynomialSpec>()) {
        const auto& coeffs = phi.as<PolynomialSpec>().coeffs;
        auto clustered = cluster_roots(phi, polynomial_roots(coeffs));
        for (const auto& zp : clustered) {
            if (std::abs(zp.location) <= radius) {
                zeros.push_back(zp);
            }
        }
    } else {
        zeros = contour_search(phi, radius, tol);
        std::erase_if(zeros, [&](const ZeroPoint& zp) { return std::abs(zp.location) > radius; });
    }

    if (zeros.empty()) {
        throw NoZerosError("find_zeros: no zeros within the requested radius");
    }
    for (const auto& zp : zeros) {
        if (zp.multiplicity > kMultiplicityCap) {
            throw MultiplicityCapError("find_zeros: multiplicity beyond the cap of 8");
        }
    }
    return MultiplicityVariety::sorted(std::move(zeros));
}

} // namespace meanper
