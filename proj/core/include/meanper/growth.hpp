#ifndef MEANPER_GROWTH_HPP
#define MEANPER_GROWTH_HPP

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "meanper/errors.hpp"

namespace meanper {

/// A Young function: convex, increasing, theta(0) = 0, superlinear. The
/// linear kind theta(x) = x is the limit case and is kept as an explicit
/// variant because its conjugate is not finite.
class YoungSpec {
  public:
    enum class Kind { Linear, Power, Tabulated };

    static YoungSpec linear();
    static YoungSpec power(double exponent);
    // points must start at (0, 0), be strictly increasing in r and
    // nondecreasing convex in value. Evaluation is piecewise linear.
    static YoungSpec tabulated(std::vector<std::pair<double, double>> points);

    Kind kind() const { return kind_; }
    double exponent() const { return exponent_; }
    const std::vector<std::pair<double, double>>& table() const { return table_; }

    // Largest admissible argument (infinite except for Tabulated).
    double domain_max() const;

  private:
    YoungSpec() = default;
    Kind kind_ = Kind::Linear;
    double exponent_ = 1.0;
    std::vector<std::pair<double, double>> table_;
};

struct GrowthBound {
    double m = 1.0; // scale index, > 0
    double A = 0.0; // additive constant
};

/// theta(x). Throws DomainError for x < 0 or, for Tabulated, x beyond the table.
double eval_theta(const YoungSpec& theta, double x);

/// Legendre transform theta*(x) = sup_{t>=0} (t x - theta(t)), by ternary
/// search on the concave map t -> t x - theta(t). Throws LinearCaseError
/// for the linear kind.
double legendre(const YoungSpec& theta, double x);

/// Sample-based lower bound for sup_z |f(z)| e^{-theta(m |z|)}: the max of
/// |v| e^{-theta(m |z|)} over the given (z, v) samples.
double theta_norm(const std::vector<std::pair<std::complex<double>, std::complex<double>>>& values,
                  const YoungSpec& theta, double m);

/// Largest excess max_i (y_i - theta(m r_i)) for one fixed m, or nullopt if
/// theta is not evaluable at some m r_i.
std::optional<double> growth_excess(const std::vector<std::pair<double, double>>& points,
                                    const YoungSpec& theta, double m);

/// Fits y <= A + theta(m r) over the grid of candidate scales: if every m in
/// the grid gives a finite excess, the (m, A) with smallest A wins; otherwise
/// the smallest admissible m wins. nullopt when no m is admissible.
std::optional<GrowthBound> fit_growth_bound(const std::vector<std::pair<double, double>>& points,
                                            const YoungSpec& theta,
                                            const std::vector<double>& m_grid);

} // namespace meanper

#endif
