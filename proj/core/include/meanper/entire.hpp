#ifndef MEANPER_ENTIRE_HPP
#define MEANPER_ENTIRE_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "meanper/errors.hpp"
#include "meanper/growth.hpp"

namespace meanper {

using cplx = std::complex<double>;

/// Sum of weighted exponentials: sum_j w_j e^{lambda_j xi}.
struct ExpSumSpec {
    struct Term {
        cplx weight;
        cplx frequency;
    };
    std::vector<Term> terms;
};

/// Sum of polynomial-times-exponential terms: sum_j p_j(xi) e^{lambda_j xi},
/// polynomial coefficients in increasing degree.
struct PolyExpSumSpec {
    struct Term {
        std::vector<cplx> poly;
        cplx frequency;
    };
    std::vector<Term> terms;
};

/// Plain polynomial, coefficients in increasing degree, nonzero leading one.
struct PolynomialSpec {
    std::vector<cplx> coeffs;
};

/// xi -> (e^{t xi / 2} - e^{-t xi / 2}) / (t xi), value 1 at the removable
/// singularity. This is the transform of the mean over a length-t segment.
struct SegmentAverageSpec {
    double length = 1.0;
};

/// Catalog of entire functions with exact derivatives and Taylor
/// coefficients. Both the operator symbol and test inputs are drawn from it.
class EntireFunctionSpec {
  public:
    using Payload = std::variant<ExpSumSpec, PolyExpSumSpec, PolynomialSpec, SegmentAverageSpec>;

    static EntireFunctionSpec exp_sum(std::vector<ExpSumSpec::Term> terms);
    static EntireFunctionSpec poly_exp_sum(std::vector<PolyExpSumSpec::Term> terms);
    static EntireFunctionSpec polynomial(std::vector<cplx> coeffs);
    static EntireFunctionSpec segment_average(double length);

    const Payload& payload() const { return payload_; }

    template <class T> bool is() const { return std::holds_alternative<T>(payload_); }
    template <class T> const T& as() const { return std::get<T>(payload_); }

  private:
    explicit EntireFunctionSpec(Payload p) : payload_(std::move(p)) {}
    Payload payload_;
};

/// One zero with its multiplicity.
struct ZeroPoint {
    cplx location;
    int multiplicity = 1;
};

/// Ordered zero set of the operator symbol: nondecreasing modulus, ties
/// broken by principal argument in [0, 2pi), all locations distinct.
class MultiplicityVariety {
  public:
    MultiplicityVariety() = default;
    explicit MultiplicityVariety(std::vector<ZeroPoint> points); // validates the ordering
    static MultiplicityVariety sorted(std::vector<ZeroPoint> points);

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const ZeroPoint& operator[](std::size_t k) const { return points_[k]; }
    const std::vector<ZeroPoint>& points() const { return points_; }

    /// m_0 + ... + m_{k-1} (the weight exponent prefix; 0 for k = 0).
    int multiplicity_prefix(std::size_t k) const;
    int total_multiplicity() const;

    /// First K points, as a variety.
    MultiplicityVariety prefix(std::size_t K) const;

  private:
    std::vector<ZeroPoint> points_;
    std::vector<int> prefix_; // running multiplicity sums
};

/// Deterministic on-demand Taylor coefficients of a test function, with the
/// growth scale its tail bounds are quoted against. Streams built from a
/// catalog spec remember it, which lets pairings evaluate the function in
/// closed form instead of resumming the series.
class TaylorStream {
  public:
    TaylorStream(std::function<cplx(std::size_t)> coeff, YoungSpec theta, double p);

    static TaylorStream from_coefficients(std::vector<cplx> coeffs, YoungSpec theta, double p);

    cplx coeff(std::size_t n) const { return coeff_(n); }
    const YoungSpec& growth_theta() const { return theta_; }
    double growth_scale() const { return p_; }

    bool has_source() const { return source_.has_value(); }
    const EntireFunctionSpec& source() const { return *source_; }

  private:
    friend TaylorStream taylor_stream_of(const EntireFunctionSpec&, const YoungSpec&, double);
    std::function<cplx(std::size_t)> coeff_;
    YoungSpec theta_;
    double p_;
    std::optional<EntireFunctionSpec> source_;
};

/// order-th derivative at xi, computed analytically per catalog kind.
/// order is capped at 64.
cplx eval(const EntireFunctionSpec& phi, cplx xi, int order = 0);

/// Taylor coefficients at 0 up to index n_max inclusive (coefficient
/// convention: f(z) = sum f_n z^n).
std::vector<cplx> taylor(const EntireFunctionSpec& phi, std::size_t n_max);

/// All zeros with |alpha| <= radius, with multiplicities, ordered. Catalog
/// kinds with known zero sets short-circuit; the general path subdivides
/// rectangles scored by the argument-principle winding number and refines
/// candidates with Newton steps. Throws NoZerosError when the disk has none.
MultiplicityVariety find_zeros(const EntireFunctionSpec& phi, double radius, double tol);

/// Wraps taylor() as a cached on-demand stream tagged with growth metadata.
TaylorStream taylor_stream_of(const EntireFunctionSpec& spec, const YoungSpec& theta, double p);

/// Argument-principle count of zeros strictly inside the circle
/// |xi - center| = radius (diagnostic; quadrature-based, rounded).
int winding_number(const EntireFunctionSpec& phi, cplx center, double radius);

} // namespace meanper

#endif
