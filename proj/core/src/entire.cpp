#include "meanper/entire.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace meanper {

namespace {

constexpr int kOrderCap = 64;

void check_order(int order) {
    if (order < 0) {
        throw DomainError("eval: negative derivative order");
    }
    if (order > kOrderCap) {
        throw OrderTooLargeError("eval: derivative order beyond 64");
    }
}

cplx pow_int(cplx base, int e) {
    cplx r{1.0, 0.0};
    for (int i = 0; i < e; ++i) {
        r *= base;
    }
    return r;
}

// p^(order)(xi) for coefficients in increasing degree, by Horner on the
// falling-factorial-scaled tail.
cplx poly_derivative_at(const std::vector<cplx>& coeffs, cplx xi, int order) {
    const int deg = static_cast<int>(coeffs.size()) - 1;
    if (order > deg) {
        return {0.0, 0.0};
    }
    cplx acc{0.0, 0.0};
    for (int n = deg; n >= order; --n) {
        double fall = 1.0;
        for (int i = 0; i < order; ++i) {
            fall *= static_cast<double>(n - i);
        }
        acc = acc * xi + coeffs[static_cast<std::size_t>(n)] * fall;
    }
    return acc;
}

cplx segment_average_derivative(double t, cplx xi, int order) {
    const double half = 0.5 * t;
    if (std::abs(xi) * t < 1.0) {
        // Power series of sinh(u)/u in u = t xi / 2, differentiated termwise.
        // Coefficient of xi^{2n} is (t/2)^{2n} / (2n+1)!.
        cplx sum{0.0, 0.0};
        double c = 1.0;
        int settled = 0;
        for (int n = 0; n <= 400; ++n) {
            const int deg = 2 * n;
            if (n > 0) {
                c *= half * half / (static_cast<double>(deg) * static_cast<double>(deg + 1));
            }
            if (deg < order) {
                continue;
            }
            double fall = 1.0;
            for (int i = 0; i < order; ++i) {
                fall *= static_cast<double>(deg - i);
            }
            const cplx term = c * fall * pow_int(xi, deg - order);
            sum += term;
            if (std::abs(term) < 1e-20 * (1.0 + std::abs(sum))) {
                if (++settled >= 2) {
                    break;
                }
            } else {
                settled = 0;
            }
        }
        return sum;
    }
    // Away from 0: (A(xi)/xi)^(order) by Leibniz, A(xi) = (e^{t xi/2} - e^{-t xi/2}) / t.
    const cplx ep = std::exp(half * xi);
    const cplx em = std::exp(-half * xi);
    cplx sum{0.0, 0.0};
    double binom = 1.0;
    double half_pos = 1.0; // (t/2)^i
    double half_neg = 1.0; // (-t/2)^i
    for (int i = 0; i <= order; ++i) {
        const cplx a_i = (half_pos * ep - half_neg * em) / t;
        double fact = 1.0;
        for (int j = 1; j <= order - i; ++j) {
            fact *= static_cast<double>(j);
        }
        const double sign = ((order - i) % 2 == 0) ? 1.0 : -1.0;
        sum += binom * a_i * sign * fact * pow_int(1.0 / xi, order - i + 1);
        binom *= static_cast<double>(order - i) / static_cast<double>(i + 1);
        half_pos *= half;
        half_neg *= -half;
    }
    return sum;
}

} // namespace

EntireFunctionSpec EntireFunctionSpec::exp_sum(std::vector<ExpSumSpec::Term> terms) {
    if (terms.empty()) {
        throw DomainError("exp_sum: needs at least one term");
    }
    for (const auto& t : terms) {
        if (t.weight == cplx{0.0, 0.0}) {
            throw DomainError("exp_sum: zero weight term");
        }
    }
    return EntireFunctionSpec{ExpSumSpec{std::move(terms)}};
}

EntireFunctionSpec EntireFunctionSpec::poly_exp_sum(std::vector<PolyExpSumSpec::Term> terms) {
    if (terms.empty()) {
        throw DomainError("poly_exp_sum: needs at least one term");
    }
    for (const auto& t : terms) {
        if (t.poly.empty()) {
            throw DomainError("poly_exp_sum: empty polynomial factor");
        }
    }
    return EntireFunctionSpec{PolyExpSumSpec{std::move(terms)}};
}

EntireFunctionSpec EntireFunctionSpec::polynomial(std::vector<cplx> coeffs) {
    while (coeffs.size() > 1 && coeffs.back() == cplx{0.0, 0.0}) {
        coeffs.pop_back();
    }
    if (coeffs.empty() || coeffs.back() == cplx{0.0, 0.0}) {
        throw DomainError("polynomial: zero leading coefficient");
    }
    return EntireFunctionSpec{PolynomialSpec{std::move(coeffs)}};
}

EntireFunctionSpec EntireFunctionSpec::segment_average(double length) {
    if (!(length > 0.0)) {
        throw DomainError("segment_average: length must be positive");
    }
    return EntireFunctionSpec{SegmentAverageSpec{length}};
}

MultiplicityVariety::MultiplicityVariety(std::vector<ZeroPoint> points) : points_(std::move(points)) {
    constexpr double kPi2 = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].multiplicity < 1) {
            throw DomainError("variety: multiplicities must be >= 1");
        }
        if (i == 0) {
            continue;
        }
        const double ma = std::abs(points_[i - 1].location);
        const double mb = std::abs(points_[i].location);
        const double tie = 1e-12 * (1.0 + mb);
        if (mb < ma - tie) {
            throw DomainError("variety: moduli must be nondecreasing");
        }
        if (std::abs(mb - ma) <= tie) {
            double aa = std::arg(points_[i - 1].location);
            double ab = std::arg(points_[i].location);
            if (aa < 0.0) aa += kPi2;
            if (ab < 0.0) ab += kPi2;
            if (!(ab > aa)) {
                throw DomainError("variety: argument tie-break violated or duplicate point");
            }
        }
    }
    prefix_.resize(points_.size() + 1, 0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        prefix_[i + 1] = prefix_[i] + points_[i].multiplicity;
    }
}

MultiplicityVariety MultiplicityVariety::sorted(std::vector<ZeroPoint> points) {
    constexpr double kPi2 = 2.0 * std::numbers::pi;
    std::sort(points.begin(), points.end(), [&](const ZeroPoint& a, const ZeroPoint& b) {
        const double ma = std::abs(a.location);
        const double mb = std::abs(b.location);
        if (std::abs(ma - mb) > 1e-12 * (1.0 + std::max(ma, mb))) {
            return ma < mb;
        }
        double aa = std::arg(a.location);
        double ab = std::arg(b.location);
        if (aa < 0.0) aa += kPi2;
        if (ab < 0.0) ab += kPi2;
        return aa < ab;
    });
    return MultiplicityVariety{std::move(points)};
}

int MultiplicityVariety::multiplicity_prefix(std::size_t k) const {
    if (k >= prefix_.size()) {
        throw IndexError("variety: prefix index out of range");
    }
    return prefix_[k];
}

int MultiplicityVariety::total_multiplicity() const {
    return prefix_.empty() ? 0 : prefix_.back();
}

MultiplicityVariety MultiplicityVariety::prefix(std::size_t K) const {
    K = std::min(K, points_.size());
    return MultiplicityVariety{std::vector<ZeroPoint>(points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(K))};
}

TaylorStream::TaylorStream(std::function<cplx(std::size_t)> coeff, YoungSpec theta, double p)
    : coeff_(std::move(coeff)), theta_(std::move(theta)), p_(p) {
    if (!(p_ > 0.0)) {
        throw DomainError("taylor stream: growth scale must be positive");
    }
}

TaylorStream TaylorStream::from_coefficients(std::vector<cplx> coeffs, YoungSpec theta, double p) {
    auto shared = std::make_shared<std::vector<cplx>>(std::move(coeffs));
    return TaylorStream{
        [shared](std::size_t n) -> cplx {
            return n < shared->size() ? (*shared)[n] : cplx{0.0, 0.0};
        },
        std::move(theta), p};
}

cplx eval(const EntireFunctionSpec& phi, cplx xi, int order) {
    check_order(order);
    return std::visit(
        [&](const auto& spec) -> cplx {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, ExpSumSpec>) {
                cplx sum{0.0, 0.0};
                for (const auto& t : spec.terms) {
                    sum += t.weight * pow_int(t.frequency, order) * std::exp(t.frequency * xi);
                }
                return sum;
            } else if constexpr (std::is_same_v<T, PolyExpSumSpec>) {
                cplx sum{0.0, 0.0};
                for (const auto& t : spec.terms) {
                    // (p e^{lambda xi})^(l) = e^{lambda xi} sum_i C(l,i) lambda^{l-i} p^(i)(xi)
                    cplx inner{0.0, 0.0};
                    double binom = 1.0;
                    for (int i = 0; i <= order; ++i) {
                        inner += binom * pow_int(t.frequency, order - i) * poly_derivative_at(t.poly, xi, i);
                        binom *= static_cast<double>(order - i) / static_cast<double>(i + 1);
                    }
                    sum += inner * std::exp(t.frequency * xi);
                }
                return sum;
            } else if constexpr (std::is_same_v<T, PolynomialSpec>) {
                return poly_derivative_at(spec.coeffs, xi, order);
            } else {
                return segment_average_derivative(spec.length, xi, order);
            }
        },
        phi.payload());
}

std::vector<cplx> taylor(const EntireFunctionSpec& phi, std::size_t n_max) {
    std::vector<cplx> out(n_max + 1, cplx{0.0, 0.0});
    std::visit(
        [&](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, ExpSumSpec>) {
                for (const auto& t : spec.terms) {
                    cplx pw{1.0, 0.0};
                    double fact = 1.0;
                    for (std::size_t n = 0; n <= n_max; ++n) {
                        if (n > 0) {
                            pw *= t.frequency;
                            fact *= static_cast<double>(n);
                        }
                        out[n] += t.weight * pw / fact;
                    }
                }
            } else if constexpr (std::is_same_v<T, PolyExpSumSpec>) {
                for (const auto& t : spec.terms) {
                    for (std::size_t i = 0; i < t.poly.size(); ++i) {
                        if (i > n_max) {
                            break;
                        }
                        cplx pw{1.0, 0.0};
                        double fact = 1.0;
                        for (std::size_t n = i; n <= n_max; ++n) {
                            if (n > i) {
                                pw *= t.frequency;
                                fact *= static_cast<double>(n - i);
                            }
                            out[n] += t.poly[i] * pw / fact;
                        }
                    }
                }
            } else if constexpr (std::is_same_v<T, PolynomialSpec>) {
                for (std::size_t n = 0; n < spec.coeffs.size() && n <= n_max; ++n) {
                    out[n] = spec.coeffs[n];
                }
            } else {
                const double half = 0.5 * spec.length;
                double c = 1.0; // (t/2)^{2n} / (2n+1)!
                for (std::size_t n = 0; 2 * n <= n_max; ++n) {
                    if (n > 0) {
                        c *= half * half / (static_cast<double>(2 * n) * static_cast<double>(2 * n + 1));
                    }
                    out[2 * n] = c;
                }
            }
        },
        phi.payload());
    return out;
}

TaylorStream taylor_stream_of(const EntireFunctionSpec& spec, const YoungSpec& theta, double p) {
    struct Cache {
        std::mutex mu;
        std::vector<cplx> coeffs;
        EntireFunctionSpec spec;
        explicit Cache(EntireFunctionSpec s) : spec(std::move(s)) {}
    };
    auto cache = std::make_shared<Cache>(spec);
    TaylorStream stream{
        [cache](std::size_t n) -> cplx {
            std::lock_guard<std::mutex> lock(cache->mu);
            if (n >= cache->coeffs.size()) {
                cache->coeffs = taylor(cache->spec, std::max<std::size_t>(2 * n + 1, 64));
            }
            return cache->coeffs[n];
        },
        theta, p};
    stream.source_ = spec;
    return stream;
}

} // namespace meanper
