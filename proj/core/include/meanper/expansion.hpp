#ifndef MEANPER_EXPANSION_HPP
#define MEANPER_EXPANSION_HPP

#include <vector>

#include "meanper/entire.hpp"
#include "meanper/functionals.hpp"
#include "meanper/growth.hpp"

namespace meanper {

/// Doubly indexed expansion coefficients aligned to a variety prefix.
/// General flavor: weights of the divided-difference packets. Interpolating
/// flavor: weights of the bare monomials z^l/l! e^{alpha_k z}.
struct ExpansionCoefficients {
    enum class Flavor { General, Interpolating };
    Flavor flavor = Flavor::General;
    std::vector<std::vector<cplx>> values; // row k holds l = 0..m_k-1
    MultiplicityVariety variety;           // the prefix the rows align to
    bool truncation_warning = false;

    std::size_t node_count() const { return values.size(); }
    const cplx& at(std::size_t k, std::size_t l) const { return values[k][l]; }
};

struct SynthesisResult {
    cplx value{0.0, 0.0};
    std::vector<cplx> packet_partials; // running sum after each packet
};

/// c_{k,l} = <S_{k,l}, f> over the first K nodes.
ExpansionCoefficients extract_general(const EntireFunctionSpec& phi, const MultiplicityVariety& V,
                                      const TaylorStream& f, std::size_t K);

/// d_{k,l} = <T_{k,l}, f> over the first K nodes. Callers are expected to
/// have checked (or deliberately skipped) the interpolation criteria.
ExpansionCoefficients extract_interpolating(const EntireFunctionSpec& phi,
                                            const MultiplicityVariety& V, const TaylorStream& f,
                                            std::size_t K);

/// Sums the packets sum_l c_{k,l} b_{k,l}(z) in increasing k, reporting the
/// partial sum after each packet. Packets must not be reordered or split.
SynthesisResult synthesize_general(const ExpansionCoefficients& c, cplx z);

/// sum_k e^{z alpha_k} sum_l d_{k,l} z^l / l!.
cplx synthesize_interpolating(const ExpansionCoefficients& d, cplx z);

/// sum_k e^{theta(p |alpha_k|)} sum_l |c_{k,l}| (|alpha_k|+1)^{-(m_0+...+m_{k-1}+l)}.
double coeff_norm_general(const ExpansionCoefficients& c, const YoungSpec& theta, double p);

/// sum_k e^{theta(p |alpha_k|)} sum_l |d_{k,l}|.
double coeff_norm_interpolating(const ExpansionCoefficients& d, const YoungSpec& theta, double p);

/// Norm of the K_half-node prefix against the full truncation; stable means
/// the added tail moved the norm by less than 1e-6.
struct NormStability {
    double norm_half = 0.0;
    double norm_full = 0.0;
    double delta = 0.0;
    bool stable = false;
};
NormStability norm_stability(const ExpansionCoefficients& coeffs, const YoungSpec& theta, double p,
                             std::size_t K_half);

/// Converts general coefficients into interpolating ones through the
/// closed-form weights. The j-tail beyond the available truncation is
/// dropped; a TruncationWarning flag is set when the last retained term was
/// still significant.
ExpansionCoefficients c_to_d(const ExpansionCoefficients& c);

/// The synthesized function as an exponential polynomial in the catalog,
/// with exact coefficients (per-frequency polynomials).
EntireFunctionSpec to_exponential_polynomial(const ExpansionCoefficients& coeffs);

/// max over the grid of |(T * f)(z)| for the synthesized f.
double residual_mean_periodic(const AnalyticFunctional& T, const EntireFunctionSpec& f_synth,
                              const std::vector<cplx>& grid);

} // namespace meanper

#endif
