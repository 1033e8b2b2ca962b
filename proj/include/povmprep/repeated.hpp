#pragma once

// Second nonselective measurement performed instantly at t = 0: square-root
// measurement vectors, transfer matrices, updated probabilities, squared
// error and the extremum-shift inequality.

#include <cmath>
#include <vector>

#include "povmprep/errors.hpp"
#include "povmprep/preparation.hpp"
#include "povmprep/purity.hpp"
#include "povmprep/smallmat.hpp"

namespace povmprep {

struct SrmVectors {
    std::vector<Vec2> vectors;
    bool rank_deficient;  // generalized inverse dropped part of the spectrum
};

/// |psi'_n> = sqrt(omega_n) rho^(-1/2) |phi_n>; resolves the identity on the
/// support of rho.
inline SrmVectors srm_vectors(const PreparedState& prepared,
                              const std::vector<PhiVector>& phi) {
    if (prepared.probabilities.size() != phi.size())
        throw Error("srm_vectors: omega/phi size mismatch");
    const Mat2 inv_sqrt = psd_inv_sqrt(prepared.rho.matrix());
    SrmVectors out;
    out.rank_deficient = psd_rank_deficient(prepared.rho.matrix());
    out.vectors.reserve(phi.size());
    for (std::size_t n = 0; n < phi.size(); ++n)
        out.vectors.push_back(
            Complex(std::sqrt(prepared.probabilities[n])) *
            inv_sqrt.apply(phi[n].v));
    return out;
}

/// max elementwise |sum_n |psi'_n><psi'_n| - P| against the support projector
/// of rho (the identity for full-rank states).
inline double srm_completeness_residual(const SrmVectors& srm,
                                        const PreparedState& prepared) {
    Mat2 frame = Mat2::zero();
    for (const auto& v : srm.vectors) frame = frame + Mat2::outer(v, v);
    if (!srm.rank_deficient) return max_abs_diff(frame, Mat2::identity());

    const Eig2 e = eig_hermitian_2x2(prepared.rho.matrix());
    Mat2 support = Mat2::zero();
    const double lmax = std::max(e.values[1], 0.0);
    for (int i = 0; i < 2; ++i)
        if (std::max(e.values[i], 0.0) > 1e-12 * lmax)
            support = support + Mat2::outer(e.vectors[i], e.vectors[i]);
    return max_abs_diff(frame, support);
}

/// |D_nm|^2 with D_nm = <psi'_n|phi_m>.
struct TransferMatrix {
    int n;
    RealMatN d2;
};

inline TransferMatrix transfer_matrix(const std::vector<Vec2>& primed_psi,
                                      const std::vector<PhiVector>& phi) {
    if (primed_psi.size() != phi.size())
        throw Error("transfer_matrix: size mismatch");
    const int n = static_cast<int>(phi.size());
    RealMatN d2(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            d2(i, j) = std::norm(inner(primed_psi[i], phi[j].v));
    return {n, d2};
}

/// omega~_n = sum_m |D_nm|^2 omega_m
inline std::vector<double> updated_probabilities(
    const TransferMatrix& d, const std::vector<double>& omega) {
    if (static_cast<int>(omega.size()) != d.n)
        throw NotOnSimplex("updated_probabilities: dimension mismatch");
    double s = 0.0;
    for (double w : omega) {
        if (w < -1e-10 || w > 1.0 + 1e-10)
            throw NotOnSimplex("updated_probabilities: omega outside [0, 1]");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-10)
        throw NotOnSimplex("updated_probabilities: omega does not sum to 1");

    std::vector<double> out(d.n, 0.0);
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j) out[i] += d.d2(i, j) * omega[j];
    return out;
}

/// P' = sum_mn |C'_mn|^2 omega~_m omega~_n on the primed phi subset.
inline double second_purity(const std::vector<PhiVector>& primed_phi,
                            const std::vector<double>& omega_tilde) {
    return purity_bilinear(OverlapMatrix::from_phi(primed_phi), omega_tilde);
}

/// R = sum_n omega_n || |phi_n> - |psi'_n> ||^2 (plain Euclidean amplitude
/// norm).
inline double squared_error_r(const PreparedState& prepared,
                              const std::vector<PhiVector>& phi,
                              const std::vector<Vec2>& primed_psi) {
    if (prepared.probabilities.size() != phi.size() ||
        phi.size() != primed_psi.size())
        throw Error("squared_error_r: size mismatch");
    double r = 0.0;
    for (std::size_t n = 0; n < phi.size(); ++n)
        r += prepared.probabilities[n] * (phi[n].v - primed_psi[n]).norm2();
    return r;
}

/// Per-index comparison of the extremal probabilities implied by the primed
/// overlap matrix pulled back through the transfer matrix against the
/// first-measurement extremal probabilities. true = the extremum has shifted
/// (the self-consistency condition is violated after the second measurement).
inline std::vector<bool> extremum_shift_check(const OverlapMatrix& first_c,
                                              const OverlapMatrix& primed_c,
                                              const TransferMatrix& d) {
    const ExtremalSolution first = extremal_probabilities(first_c);
    const ExtremalSolution primed = extremal_probabilities(primed_c);
    if (first.reason == ExtremalStatus::SingularOverlap ||
        primed.reason == ExtremalStatus::SingularOverlap)
        throw SingularOverlap("extremum_shift_check: singular overlap matrix");
    RealMatN d_inv(d.n);
    try {
        d_inv = invert(d.d2);
    } catch (const SingularMatrix&) {
        throw SingularOverlap("extremum_shift_check: singular transfer matrix");
    }

    std::vector<bool> shifted(d.n, false);
    for (int nn = 0; nn < d.n; ++nn) {
        double lhs = 0.0;
        for (int m = 0; m < d.n; ++m)
            lhs += d_inv(nn, m) * primed.omega_ext[m];
        shifted[nn] = std::abs(lhs - first.omega_ext[nn]) > 1e-10;
    }
    return shifted;
}

/// Restores completeness of a perturbed primed set by applying S^(-1/2) of
/// its frame operator. Used when probing the least-squares property of the
/// square-root measurement.
inline std::vector<Vec2> frame_normalize(const std::vector<Vec2>& vectors) {
    Mat2 frame = Mat2::zero();
    for (const auto& v : vectors) frame = frame + Mat2::outer(v, v);
    const Mat2 s_inv_sqrt = psd_inv_sqrt(frame);
    std::vector<Vec2> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) out.push_back(s_inv_sqrt.apply(v));
    return out;
}

}  // namespace povmprep
