#include "meanper/newton.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <quadmath.h>

namespace meanper {

// The forward recursion and Newton-basis evaluations run in quadruple
// precision internally. The tables are well defined in exact arithmetic, but
// both directions cancel intermediates as large as |b_k| |Pi_{k-1}(alpha_k)|
// (the interpolant evaluated far from its node hull), which can reach 1e13
// on well-separated desk-scale varieties; the published round-trip
// tolerances need the corresponding guard digits. Inputs and outputs stay
// double.
namespace {

struct qcplx {
    __float128 re = 0;
    __float128 im = 0;
};

inline qcplx operator+(qcplx a, qcplx b) { return {a.re + b.re, a.im + b.im}; }
inline qcplx operator-(qcplx a, qcplx b) { return {a.re - b.re, a.im - b.im}; }
inline qcplx operator*(qcplx a, qcplx b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline qcplx operator*(__float128 s, qcplx a) { return {s * a.re, s * a.im}; }
inline qcplx operator/(qcplx a, qcplx b) {
    const __float128 d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline qcplx& operator+=(qcplx& a, qcplx b) {
    a = a + b;
    return a;
}
inline qcplx& operator-=(qcplx& a, qcplx b) {
    a = a - b;
    return a;
}
inline qcplx& operator*=(qcplx& a, qcplx b) {
    a = a * b;
    return a;
}
inline bool operator==(qcplx a, qcplx b) { return a.re == b.re && a.im == b.im; }

inline __float128 qabs(qcplx a) { return sqrtq(a.re * a.re + a.im * a.im); }
inline qcplx qexp(qcplx a) {
    const __float128 e = expq(a.re);
    return {e * cosq(a.im), e * sinq(a.im)};
}

inline qcplx widen(cplx z) { return {z.real(), z.imag()}; }
inline cplx narrow(qcplx z) { return {static_cast<double>(z.re), static_cast<double>(z.im)}; }

using QRows = std::vector<std::vector<qcplx>>;

std::vector<qcplx> qjet_mul(const std::vector<qcplx>& a, const std::vector<qcplx>& b,
                            std::size_t order) {
    std::vector<qcplx> out(order + 1);
    for (std::size_t i = 0; i < a.size() && i <= order; ++i) {
        if (a[i] == qcplx{}) {
            continue;
        }
        for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

std::vector<qcplx> qlinear_power_jet(qcplx xi, qcplx alpha, int m, std::size_t order) {
    std::vector<qcplx> out(order + 1);
    const qcplx base = xi - alpha;
    std::vector<qcplx> powers(static_cast<std::size_t>(m) + 1);
    qcplx pw{1, 0};
    for (int i = 0; i <= m; ++i) {
        powers[static_cast<std::size_t>(i)] = pw;
        pw *= base;
    }
    __float128 binom = 1;
    for (int j = 0; j <= m && static_cast<std::size_t>(j) <= order; ++j) {
        out[static_cast<std::size_t>(j)] = binom * powers[static_cast<std::size_t>(m - j)];
        binom *= static_cast<__float128>(m - j) / static_cast<__float128>(j + 1);
    }
    return out;
}

std::vector<qcplx> qinverse_power_product_jet(qcplx x,
                                              const std::vector<std::pair<qcplx, int>>& factors,
                                              std::size_t order) {
    // F = exp(g), g(x) = -sum mu_n log(x - c_n). With G_r = g^(r)(x)/r! for
    // r >= 1 and T_i = F^(i)(x)/i!:
    //   (i+1) T_{i+1} = sum_{r=0}^{i} (r+1) G_{r+1} T_{i-r}.
    qcplx f0{1, 0};
    for (const auto& [c, mu] : factors) {
        const qcplx d = x - c;
        if (d == qcplx{}) {
            throw CoincidentNodesError("inverse power product evaluated at one of its poles");
        }
        qcplx dp{1, 0};
        for (int i = 0; i < mu; ++i) {
            dp *= d;
        }
        f0 = f0 / dp;
    }
    std::vector<qcplx> t(order + 1);
    t[0] = f0;
    if (order == 0) {
        return t;
    }
    std::vector<qcplx> g(order + 1);
    for (std::size_t r = 1; r <= order; ++r) {
        qcplx s{};
        for (const auto& [c, mu] : factors) {
            const qcplx inv = qcplx{1, 0} / (x - c);
            qcplx ip{1, 0};
            for (std::size_t i = 0; i < r; ++i) {
                ip *= inv;
            }
            s += static_cast<__float128>(mu) * ip;
        }
        const __float128 sign = (r % 2 == 0) ? 1 : -1;
        g[r] = (sign / static_cast<__float128>(r)) * s;
    }
    for (std::size_t i = 0; i + 1 <= order; ++i) {
        qcplx s{};
        for (std::size_t r = 0; r <= i; ++r) {
            s += static_cast<__float128>(r + 1) * (g[r + 1] * t[i - r]);
        }
        t[i + 1] = (1 / static_cast<__float128>(i + 1)) * s;
    }
    return t;
}

// Jets at alpha_k of Pi_{k-1} and Q_{k-1}, given the b rows below k.
struct NodeContext {
    std::vector<qcplx> pi_prev;
    std::vector<qcplx> q_prev;
};

NodeContext jets_at_node(const MultiplicityVariety& variety, const QRows& b_rows, std::size_t k,
                         std::size_t order) {
    const qcplx x = widen(variety[k].location);
    NodeContext ctx;
    ctx.pi_prev.assign(order + 1, qcplx{});
    ctx.pi_prev[0] = qcplx{1, 0};
    ctx.q_prev.assign(order + 1, qcplx{});
    std::vector<qcplx> running = ctx.pi_prev;
    for (std::size_t j = 0; j < k; ++j) {
        const auto base = qlinear_power_jet(x, widen(variety[j].location), 1, order);
        std::vector<qcplx> inner(order + 1);
        std::vector<qcplx> pw(order + 1);
        pw[0] = qcplx{1, 0};
        for (std::size_t l = 0; l < b_rows[j].size(); ++l) {
            for (std::size_t i = 0; i <= order; ++i) {
                inner[i] += b_rows[j][l] * pw[i];
            }
            pw = qjet_mul(pw, base, order);
        }
        const auto contrib = qjet_mul(running, inner, order);
        for (std::size_t i = 0; i <= order; ++i) {
            ctx.q_prev[i] += contrib[i];
        }
        running = qjet_mul(
            running, qlinear_power_jet(x, widen(variety[j].location), variety[j].multiplicity, order),
            order);
    }
    ctx.pi_prev = std::move(running);
    return ctx;
}

QRows forward_tables(const MultiplicityVariety& variety, const QRows& values, double* condition) {
    QRows rows(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const std::size_t mk = values[k].size();
        rows[k].assign(mk, qcplx{});
        if (k == 0) {
            rows[0] = values[0];
            continue;
        }
        const auto ctx = jets_at_node(variety, rows, k, mk - 1);
        const qcplx pi0 = ctx.pi_prev[0];
        if (qabs(pi0) < 1e-300Q) {
            throw CoincidentNodesError("psi_forward: nodes too close, Pi underflows");
        }
        *condition =
            std::max(*condition, static_cast<double>(qabs(ctx.q_prev[0]) / qabs(pi0)));
        for (std::size_t l = 0; l < mk; ++l) {
            qcplx num = values[k][l] - ctx.q_prev[l];
            for (std::size_t n = 0; n < l; ++n) {
                num -= ctx.pi_prev[l - n] * rows[k][n];
            }
            rows[k][l] = num / pi0;
        }
    }
    return rows;
}

// Q_q jet at xi, all scaled derivatives up to `order`.
std::vector<qcplx> newton_jet(const MultiplicityVariety& variety, const QRows& rows, std::size_t q,
                              qcplx xi, std::size_t order) {
    std::vector<qcplx> acc(order + 1);
    std::vector<qcplx> running(order + 1);
    running[0] = qcplx{1, 0};
    for (std::size_t k = 0; k <= q; ++k) {
        const auto base = qlinear_power_jet(xi, widen(variety[k].location), 1, order);
        std::vector<qcplx> inner(order + 1);
        std::vector<qcplx> pw(order + 1);
        pw[0] = qcplx{1, 0};
        for (std::size_t l = 0; l < rows[k].size(); ++l) {
            for (std::size_t i = 0; i <= order; ++i) {
                inner[i] += rows[k][l] * pw[i];
            }
            pw = qjet_mul(pw, base, order);
        }
        const auto contrib = qjet_mul(running, inner, order);
        for (std::size_t i = 0; i <= order; ++i) {
            acc[i] += contrib[i];
        }
        if (k < q) {
            running = qjet_mul(
                running,
                qlinear_power_jet(xi, widen(variety[k].location), variety[k].multiplicity, order),
                order);
        }
    }
    return acc;
}

QRows widen_rows(const std::vector<std::vector<cplx>>& rows) {
    QRows out(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out[k].reserve(rows[k].size());
        for (const cplx v : rows[k]) {
            out[k].push_back(widen(v));
        }
    }
    return out;
}

// Carrier for the opaque precise handle in DividedDifferenceTable.
struct PreciseRows {
    QRows rows;
};

DividedDifferenceTable pack_table(QRows rows, double condition) {
    DividedDifferenceTable table;
    table.condition = condition;
    table.rows.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        table.rows[k].resize(rows[k].size());
        std::transform(rows[k].begin(), rows[k].end(), table.rows[k].begin(), narrow);
    }
    table.flagged = condition > 1e12;
    table.precise = std::make_shared<const PreciseRows>(PreciseRows{std::move(rows)});
    return table;
}

QRows unpack_table(const DividedDifferenceTable& table) {
    if (table.precise) {
        return static_cast<const PreciseRows*>(table.precise.get())->rows;
    }
    return widen_rows(table.rows);
}

} // namespace

namespace detail {

std::vector<cplx> jet_mul(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t order) {
    std::vector<cplx> out(order + 1, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.size() && i <= order; ++i) {
        for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

std::vector<cplx> linear_power_jet(cplx xi, cplx alpha, int m, std::size_t order) {
    const auto jet = qlinear_power_jet(widen(xi), widen(alpha), m, order);
    std::vector<cplx> out(jet.size());
    std::transform(jet.begin(), jet.end(), out.begin(), narrow);
    return out;
}

std::vector<cplx> inverse_power_product_jet(cplx x, const std::vector<std::pair<cplx, int>>& factors,
                                            std::size_t order) {
    std::vector<std::pair<qcplx, int>> qf;
    qf.reserve(factors.size());
    for (const auto& [c, mu] : factors) {
        qf.emplace_back(widen(c), mu);
    }
    const auto jet = qinverse_power_product_jet(widen(x), qf, order);
    std::vector<cplx> out(jet.size());
    std::transform(jet.begin(), jet.end(), out.begin(), narrow);
    return out;
}

} // namespace detail

ValueSet::ValueSet(const MultiplicityVariety& variety, std::size_t K) {
    K = std::min(K, variety.size());
    rows_.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        rows_[k].assign(static_cast<std::size_t>(variety[k].multiplicity), cplx{0.0, 0.0});
    }
}

void ValueSet::require_shape(const MultiplicityVariety& variety) const {
    if (rows_.size() > variety.size()) {
        throw IndexError("value set has more rows than the variety");
    }
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        if (rows_[k].size() != static_cast<std::size_t>(variety[k].multiplicity)) {
            throw IndexError("value set row width does not match the multiplicity");
        }
    }
}

PiProduct::PiProduct(const MultiplicityVariety& variety, std::size_t k) {
    if (k >= variety.size()) {
        throw IndexError("PiProduct: node index out of range");
    }
    nodes_.assign(variety.points().begin(),
                  variety.points().begin() + static_cast<std::ptrdiff_t>(k) + 1);
}

cplx PiProduct::value(cplx xi) const {
    qcplx v{1, 0};
    for (const auto& n : nodes_) {
        for (int i = 0; i < n.multiplicity; ++i) {
            v *= widen(xi) - widen(n.location);
        }
    }
    return narrow(v);
}

std::vector<cplx> PiProduct::jet(cplx xi, std::size_t order) const {
    std::vector<qcplx> acc(order + 1);
    acc[0] = qcplx{1, 0};
    for (const auto& n : nodes_) {
        acc = qjet_mul(acc, qlinear_power_jet(widen(xi), widen(n.location), n.multiplicity, order),
                       order);
    }
    std::vector<cplx> out(acc.size());
    std::transform(acc.begin(), acc.end(), out.begin(), narrow);
    return out;
}

DividedDifferenceTable psi_forward(const MultiplicityVariety& variety, const ValueSet& values) {
    values.require_shape(variety);
    double condition = 0.0;
    auto rows = forward_tables(variety, widen_rows(values.rows()), &condition);
    return pack_table(std::move(rows), condition);
}

cplx newton_eval(const MultiplicityVariety& variety, const DividedDifferenceTable& table,
                 std::size_t q, cplx xi, std::size_t order) {
    if (q >= table.rows.size()) {
        throw IndexError("newton_eval: node index beyond the table");
    }
    return narrow(newton_jet(variety, unpack_table(table), q, widen(xi), order)[order]);
}

ValueSet psi_inverse(const MultiplicityVariety& variety, const DividedDifferenceTable& table) {
    const std::size_t K = table.rows.size();
    if (K == 0) {
        return ValueSet{};
    }
    const auto qrows = unpack_table(table);
    std::vector<std::vector<cplx>> rows(K);
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t mk = table.rows[k].size();
        const auto jet = newton_jet(variety, qrows, K - 1, widen(variety[k].location), mk - 1);
        rows[k].resize(mk);
        for (std::size_t l = 0; l < mk; ++l) {
            rows[k][l] = narrow(jet[l]);
        }
    }
    return ValueSet{std::move(rows)};
}

std::vector<cplx> expansion_poly(const MultiplicityVariety& variety, std::size_t k, std::size_t j,
                                 std::size_t l) {
    if (k >= variety.size() || j > k) {
        throw IndexError("expansion_poly: indices out of range");
    }
    if (l >= static_cast<std::size_t>(variety[k].multiplicity)) {
        throw IndexError("expansion_poly: derivative slot beyond the multiplicity");
    }
    if (j == k) {
        // P_{k,k,l}(z) = sum_{i<=l} z^i/i! * D^{l-i}[ prod_{n<k} (a_k - a_n)^{-m_n} ]
        std::vector<std::pair<qcplx, int>> factors;
        for (std::size_t n = 0; n < k; ++n) {
            factors.emplace_back(widen(variety[n].location), variety[n].multiplicity);
        }
        const auto t = qinverse_power_product_jet(widen(variety[k].location), factors, l);
        std::vector<cplx> coeffs(l + 1);
        __float128 inv_fact = 1;
        for (std::size_t i = 0; i <= l; ++i) {
            if (i > 0) {
                inv_fact /= static_cast<__float128>(i);
            }
            coeffs[i] = narrow(inv_fact * t[l - i]);
        }
        return coeffs;
    }
    // P_{k,j,l}(z) = sum_{i<m_j} z^i/i! * D^{m_j-1-i}[ prod_{n<k, n!=j} (a_j - a_n)^{-m_n}
    //                                                  * (a_j - a_k)^{-(l+1)} ]
    const std::size_t mj = static_cast<std::size_t>(variety[j].multiplicity);
    std::vector<std::pair<qcplx, int>> factors;
    for (std::size_t n = 0; n < k; ++n) {
        if (n != j) {
            factors.emplace_back(widen(variety[n].location), variety[n].multiplicity);
        }
    }
    factors.emplace_back(widen(variety[k].location), static_cast<int>(l) + 1);
    const auto t = qinverse_power_product_jet(widen(variety[j].location), factors, mj - 1);
    std::vector<cplx> coeffs(mj);
    __float128 inv_fact = 1;
    for (std::size_t i = 0; i < mj; ++i) {
        if (i > 0) {
            inv_fact /= static_cast<__float128>(i);
        }
        coeffs[i] = narrow(inv_fact * t[mj - 1 - i]);
    }
    return coeffs;
}

DividedDifferenceTable exponential_divided_differences(const MultiplicityVariety& variety,
                                                       std::size_t K, cplx z) {
    K = std::min(K, variety.size());
    QRows values(K);
    const qcplx qz = widen(z);
    for (std::size_t k = 0; k < K; ++k) {
        const std::size_t mk = static_cast<std::size_t>(variety[k].multiplicity);
        values[k].resize(mk);
        const qcplx e = qexp(qz * widen(variety[k].location));
        qcplx zp{1, 0};
        __float128 inv_fact = 1;
        for (std::size_t i = 0; i < mk; ++i) {
            if (i > 0) {
                zp *= qz;
                inv_fact /= static_cast<__float128>(i);
            }
            values[k][i] = inv_fact * (zp * e);
        }
    }
    double condition = 0.0;
    auto rows = forward_tables(variety, values, &condition);
    return pack_table(std::move(rows), condition);
}

cplx divided_diff_exponential(const MultiplicityVariety& variety, std::size_t k, std::size_t l,
                              cplx z) {
    if (k >= variety.size() || l >= static_cast<std::size_t>(variety[k].multiplicity)) {
        throw IndexError("divided_diff_exponential: indices out of range");
    }
    return exponential_divided_differences(variety, k + 1, z).rows[k][l];
}

void write_csv(std::ostream& out, const DividedDifferenceTable& table) {
    out << "k,l,re_b,im_b,condition_flag\n";
    char buf[96];
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        for (std::size_t l = 0; l < table.rows[k].size(); ++l) {
            std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g,%d\n", k, l,
                          table.rows[k][l].real(), table.rows[k][l].imag(),
                          table.flagged ? 1 : 0);
            out << buf;
        }
    }
}

ClosedFormPacket divided_diff_exponential_closed(const MultiplicityVariety& variety, std::size_t k,
                                                 std::size_t l, cplx z) {
    if (k >= variety.size() || l >= static_cast<std::size_t>(variety[k].multiplicity)) {
        throw IndexError("divided_diff_exponential_closed: indices out of range");
    }
    const qcplx qz = widen(z);
    qcplx acc{};
    __float128 scale = 0;
    for (std::size_t j = 0; j <= k; ++j) {
        std::vector<std::pair<qcplx, int>> factors;
        std::size_t order = 0;
        if (j == k) {
            for (std::size_t n = 0; n < k; ++n) {
                factors.emplace_back(widen(variety[n].location), variety[n].multiplicity);
            }
            order = l;
        } else {
            for (std::size_t n = 0; n < k; ++n) {
                if (n != j) {
                    factors.emplace_back(widen(variety[n].location), variety[n].multiplicity);
                }
            }
            factors.emplace_back(widen(variety[k].location), static_cast<int>(l) + 1);
            order = static_cast<std::size_t>(variety[j].multiplicity) - 1;
        }
        const auto t = qinverse_power_product_jet(widen(variety[j].location), factors, order);
        qcplx poly{};
        qcplx zp{1, 0};
        __float128 inv_fact = 1;
        for (std::size_t i = 0; i <= order; ++i) {
            if (i > 0) {
                zp *= qz;
                inv_fact /= static_cast<__float128>(i);
            }
            poly += inv_fact * (zp * t[order - i]);
        }
        const qcplx term = qexp(qz * widen(variety[j].location)) * poly;
        acc += term;
        scale = std::max(scale, qabs(term));
    }
    return ClosedFormPacket{narrow(acc), static_cast<double>(scale)};
}

} // namespace meanper
