#ifndef MEANPER_NEWTON_HPP
#define MEANPER_NEWTON_HPP

#include <cstddef>
#include <memory>
#include <ostream>
#include <vector>

#include "meanper/entire.hpp"

namespace meanper {

/// Jet values {v_{k,l} : k <= K, l < m_k} aligned to a variety prefix.
/// Row k holds the scaled derivatives g^(l)(alpha_k) / l!.
class ValueSet {
  public:
    ValueSet() = default;
    ValueSet(const MultiplicityVariety& variety, std::size_t K); // zero-filled
    explicit ValueSet(std::vector<std::vector<cplx>> rows) : rows_(std::move(rows)) {}

    std::size_t node_count() const { return rows_.size(); }
    std::size_t width(std::size_t k) const { return rows_[k].size(); }
    cplx& at(std::size_t k, std::size_t l) { return rows_[k][l]; }
    const cplx& at(std::size_t k, std::size_t l) const { return rows_[k][l]; }
    const std::vector<std::vector<cplx>>& rows() const { return rows_; }

    void require_shape(const MultiplicityVariety& variety) const;

  private:
    std::vector<std::vector<cplx>> rows_;
};

/// Divided differences b_{k,l} in the Newton basis, same shape as the value
/// set they came from, plus a conditioning estimate of the forward recursion.
struct DividedDifferenceTable {
    std::vector<std::vector<cplx>> rows;
    double condition = 0.0; // max |Q_{k-1}(alpha_k)| / |Pi_{k-1}(alpha_k)|
    bool flagged = false;   // condition beyond 1e12

    // Opaque extended-precision mirror of rows, filled by the constructors
    // here. Evaluations prefer it: both directions of the recursion cancel
    // intermediates as large as |b| |Pi|, and carrying double rows alone
    // through a round trip costs those digits. Null for externally
    // assembled tables.
    std::shared_ptr<const void> precise;

    std::size_t node_count() const { return rows.size(); }
    const cplx& at(std::size_t k, std::size_t l) const { return rows[k][l]; }
};

/// Pi_k(xi) = prod_{n<=k} (xi - alpha_n)^{m_n} with jet evaluation.
class PiProduct {
  public:
    PiProduct(const MultiplicityVariety& variety, std::size_t k);

    cplx value(cplx xi) const;
    /// Scaled derivatives [Pi_k(xi), Pi_k'(xi)/1!, ..., Pi_k^(order)(xi)/order!].
    std::vector<cplx> jet(cplx xi, std::size_t order) const;

  private:
    std::vector<ZeroPoint> nodes_;
};

/// Forward divided-difference recursion: jet data -> Newton coefficients.
/// Throws CoincidentNodesError when |Pi_{k-1}(alpha_k)| underflows.
DividedDifferenceTable psi_forward(const MultiplicityVariety& variety, const ValueSet& values);

/// Q_q^(order)(xi) / order! for the Newton polynomial built on nodes 0..q.
cplx newton_eval(const MultiplicityVariety& variety, const DividedDifferenceTable& table,
                 std::size_t q, cplx xi, std::size_t order = 0);

/// Inverse of psi_forward: reads the interpolated jets back off Q.
ValueSet psi_inverse(const MultiplicityVariety& variety, const DividedDifferenceTable& table);

/// Coefficients (increasing degree) of the polynomial P_{k,j,l}, degree < m_j.
/// These are the closed-form weights of e^{z alpha_j} in the divided
/// difference of the exponential kernel.
std::vector<cplx> expansion_poly(const MultiplicityVariety& variety, std::size_t k, std::size_t j,
                                 std::size_t l);

/// b_{k,l}(z): the divided-difference table of xi -> e^{z xi}, row (k, l).
/// Computed through the forward recursion; the closed form
/// sum_j e^{z alpha_j} P_{k,j,l}(z) is kept as a cross-check path.
cplx divided_diff_exponential(const MultiplicityVariety& variety, std::size_t k, std::size_t l,
                              cplx z);

/// The closed-form route for b_{k,l}(z), with the magnitude of its largest
/// summand. The term scale is the natural yardstick when the sum cancels far
/// below it.
struct ClosedFormPacket {
    cplx value{0.0, 0.0};
    double term_scale = 0.0; // max_j |e^{z alpha_j} P_{k,j,l}(z)|
};
ClosedFormPacket divided_diff_exponential_closed(const MultiplicityVariety& variety, std::size_t k,
                                                 std::size_t l, cplx z);

/// Whole table of b_{k,l}(z) for k <= K in one forward pass.
DividedDifferenceTable exponential_divided_differences(const MultiplicityVariety& variety,
                                                       std::size_t K, cplx z);

/// CSV rows (k, l, re_b, im_b, condition_flag) for a table.
void write_csv(std::ostream& out, const DividedDifferenceTable& table);

namespace detail {
/// Truncated product of two jets (Taylor-style scaled derivative arrays).
std::vector<cplx> jet_mul(const std::vector<cplx>& a, const std::vector<cplx>& b,
                          std::size_t order);
/// Jet of (xi - alpha)^m at xi, truncated at `order`.
std::vector<cplx> linear_power_jet(cplx xi, cplx alpha, int m, std::size_t order);
/// Scaled derivatives T_i = F^(i)(x)/i!, i <= order, of
/// F(x) = prod_n (x - c_n)^{-mu_n}, by the logarithmic-derivative recurrence.
std::vector<cplx> inverse_power_product_jet(cplx x, const std::vector<std::pair<cplx, int>>& factors,
                                            std::size_t order);
} // namespace detail

} // namespace meanper

#endif
