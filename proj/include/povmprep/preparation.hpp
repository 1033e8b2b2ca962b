#pragma once

// Post-measurement reduced density matrix, outcome probabilities, initial
// coherence and the correlation A-factor for the dephasing model.

#include <cmath>
#include <limits>
#include <vector>

#include "povmprep/basis.hpp"
#include "povmprep/errors.hpp"
#include "povmprep/smallmat.hpp"

namespace povmprep {

/// Dimensionless inverse temperature beta*omega0 (hbar = k_B = 1);
/// +infinity encodes T = 0 and is handled by the exact limit formulas.
struct ThermalParams {
    double beta_omega0;

    explicit ThermalParams(double beta_omega0_) : beta_omega0(beta_omega0_) {
        if (std::isnan(beta_omega0) || beta_omega0 < 0.0)
            throw Error("ThermalParams: beta*omega0 must be >= 0");
    }

    static ThermalParams zero_temperature() {
        return ThermalParams(std::numeric_limits<double>::infinity());
    }

    /// From the dimensionless temperature k_B T / omega0; 0 maps to T = 0.
    static ThermalParams from_kT(double kT_over_omega0) {
        if (std::isnan(kT_over_omega0) || kT_over_omega0 < 0.0)
            throw Error("ThermalParams: k_B T / omega0 must be >= 0");
        if (kT_over_omega0 == 0.0) return zero_temperature();
        return ThermalParams(1.0 / kT_over_omega0);
    }

    double kT_over_omega0() const {
        return std::isinf(beta_omega0) ? 0.0 : 1.0 / beta_omega0;
    }

    bool is_zero_temperature() const { return std::isinf(beta_omega0); }

    /// tanh(beta*omega0/2); exactly 1 at T = 0.
    double tanh_half() const {
        return is_zero_temperature() ? 1.0 : std::tanh(0.5 * beta_omega0);
    }

    /// coth(beta*omega0/2); exactly 1 at T = 0, +inf at beta = 0.
    double coth_half() const {
        if (is_zero_temperature()) return 1.0;
        if (beta_omega0 == 0.0) return std::numeric_limits<double>::infinity();
        return 1.0 / std::tanh(0.5 * beta_omega0);
    }

    /// e^(-beta*omega0); 0 at T = 0.
    double boltzmann_gap() const {
        return is_zero_temperature() ? 0.0 : std::exp(-beta_omega0);
    }
};

/// 2x2 Hermitian, unit-trace, positive-semidefinite reduced state.
class DensityMatrix {
public:
    explicit DensityMatrix(const Mat2& m) : m_(m) {
        if (m_.hermiticity_defect() > 1e-12)
            throw NotHermitian("DensityMatrix: not Hermitian");
        if (std::abs(m_.trace() - Complex(1.0)) > 1e-12)
            throw InvalidSet("DensityMatrix: trace must be 1");
        const Eig2 e = eig_hermitian_2x2(m_);
        if (e.values[0] < -1e-12 || e.values[1] > 1.0 + 1e-12)
            throw InvalidSet("DensityMatrix: eigenvalues outside [0, 1]");
    }

    const Mat2& matrix() const { return m_; }
    Complex operator()(int r, int c) const { return m_(r, c); }

private:
    Mat2 m_;
};

struct PreparedState {
    DensityMatrix rho;
    std::vector<double> probabilities;
    Complex coherence;  // Tr(sigma_plus rho) = rho(1, 0)
};

/// omega_m = (|a0|^2 e^(x) + |a1|^2 e^(-x)) / (2 cosh x), x = beta*omega0/2,
/// evaluated in the overflow-free tanh form.
inline std::vector<double> thermal_probabilities(const MeasurementSet& set,
                                                 ThermalParams t) {
    const double th = t.tanh_half();
    std::vector<double> w;
    w.reserve(set.n_outcomes());
    for (const auto& p : set.psi()) {
        const double a0sq = std::norm(p.v.c0);
        const double a1sq = std::norm(p.v.c1);
        w.push_back(0.5 * (a0sq * (1.0 + th) + a1sq * (1.0 - th)));
    }
    return w;
}

/// rho_S(0) = sum_m omega_m |phi_m><phi_m|
inline PreparedState reduced_density(const MeasurementSet& set, ThermalParams t) {
    const std::vector<double> w = thermal_probabilities(set, t);
    Mat2 rho = Mat2::zero();
    for (int m = 0; m < set.n_outcomes(); ++m)
        rho = rho + Complex(w[m]) * Mat2::outer(set.phi()[m].v, set.phi()[m].v);
    return PreparedState{DensityMatrix(rho), w, rho(1, 0)};
}

/// Tr(rho^2)
inline double state_purity(const DensityMatrix& rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

namespace detail {

/// <0|Omega_m^dag sigma_+ Omega_m|0> = <phi|sigma_+|phi> |a0|^2 and the
/// matching |1> element; <phi|sigma_+|phi> = conj(b1) b0.
inline Complex sandwich_ground(const PsiVector& psi, const PhiVector& phi) {
    return std::conj(phi.v.c1) * phi.v.c0 * std::norm(psi.v.c0);
}

inline Complex sandwich_excited(const PsiVector& psi, const PhiVector& phi) {
    return std::conj(phi.v.c1) * phi.v.c0 * std::norm(psi.v.c1);
}

}  // namespace detail

/// Initial coherence sum_m <0|Omega_m^dag sigma_+ Omega_m|0> tanh(beta*omega0/2);
/// valid only for diagonal-Gram sets.
inline Complex initial_coherence_formula(const MeasurementSet& set,
                                         ThermalParams t) {
    if (gram_diagonality_residual(set) >= 1e-10)
        throw GramNotDiagonal(
            "initial_coherence_formula: Gram operator is not diagonal");
    Complex s{};
    for (int m = 0; m < set.n_outcomes(); ++m)
        s += detail::sandwich_ground(set.psi()[m], set.phi()[m]);
    return s * t.tanh_half();
}

/// Correlation factor: the ratio of the thermally weighted difference and sum
/// of the sigma_+ matrix elements. Equals coth(beta*omega0/2) exactly on
/// diagonal-Gram sets. Both sums are scaled by e^(-beta*omega0/2) so that
/// T = 0 is the exact limit.
inline Complex a_factor(const MeasurementSet& set, ThermalParams t) {
    Complex x{};  // ground-state elements
    Complex y{};  // excited-state elements
    for (int m = 0; m < set.n_outcomes(); ++m) {
        x += detail::sandwich_ground(set.psi()[m], set.phi()[m]);
        y += detail::sandwich_excited(set.psi()[m], set.phi()[m]);
    }
    const double g = t.boltzmann_gap();
    const Complex num = x - y * g;
    const Complex den = x + y * g;
    if (std::abs(den) < 1e-14)
        throw ZeroDenominator("a_factor: denominator magnitude below 1e-14");
    return num / den;
}

}  // namespace povmprep
