#pragma once

// Measurement state vectors, Omega-operators, effects, the resolution of the
// identity and the Gram-diagonality condition.

#include <cmath>
#include <numbers>
#include <vector>

#include "povmprep/errors.hpp"
#include "povmprep/smallmat.hpp"

namespace povmprep {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Polar/azimuthal pair on the Bloch sphere. theta is validated into [0, pi];
/// phi is wrapped into [0, 2*pi).
struct EulerAngles {
    double theta;
    double phi;

    EulerAngles(double theta_, double phi_) : theta(theta_), phi(phi_) {
        if (!std::isfinite(theta) || !std::isfinite(phi))
            throw InvalidAngle("EulerAngles: non-finite angle");
        if (theta < 0.0 || theta > kPi)
            throw InvalidAngle("EulerAngles: theta outside [0, pi]");
        phi = std::fmod(phi, kTwoPi);
        if (phi < 0.0) phi += kTwoPi;
    }
};

/// Wraps an angle difference into [0, 2*pi).
inline double wrap_angle(double x) {
    x = std::fmod(x, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    return x;
}

/// Measurement vector |psi_m> with squared norm 2/N.
struct PsiVector {
    Vec2 v;
    int n_outcomes;

    PsiVector(Vec2 v_, int n_outcomes_) : v(v_), n_outcomes(n_outcomes_) {
        if (n_outcomes < 2) throw InvalidSet("PsiVector: n_outcomes < 2");
        if (!is_finite(v.c1) || !is_finite(v.c0))
            throw InvalidSet("PsiVector: non-finite amplitude");
        if (std::abs(v.norm2() - 2.0 / n_outcomes) > 1e-12)
            throw InvalidSet("PsiVector: squared norm must equal 2/N");
    }
};

/// Normalized dual vector |phi_m>.
struct PhiVector {
    Vec2 v;

    explicit PhiVector(Vec2 v_) : v(v_) {
        if (!is_finite(v.c1) || !is_finite(v.c0))
            throw InvalidSet("PhiVector: non-finite amplitude");
        if (std::abs(v.norm2() - 1.0) > 1e-12)
            throw InvalidSet("PhiVector: vector must be normalized");
    }
};

/// a1 = sqrt(2/N) e^(-i phi/2) cos(theta/2), a0 = sqrt(2/N) e^(i phi/2) sin(theta/2)
inline PsiVector psi_from_angles(EulerAngles a, int n_outcomes) {
    if (n_outcomes < 2) throw InvalidSet("psi_from_angles: n_outcomes < 2");
    const double s = std::sqrt(2.0 / n_outcomes);
    const Complex ph = std::polar(1.0, -0.5 * a.phi);
    return PsiVector({s * ph * std::cos(0.5 * a.theta),
                      s * std::conj(ph) * std::sin(0.5 * a.theta)},
                     n_outcomes);
}

inline PhiVector phi_from_angles(EulerAngles a) {
    const Complex ph = std::polar(1.0, -0.5 * a.phi);
    return PhiVector({ph * std::cos(0.5 * a.theta),
                      std::conj(ph) * std::sin(0.5 * a.theta)});
}

/// Omega_m = |phi_m><psi_m|
inline Mat2 omega_operator(const PsiVector& psi, const PhiVector& phi) {
    return Mat2::outer(phi.v, psi.v);
}

/// F_m = |psi_m><psi_m|
inline Mat2 effect_operator(const PsiVector& psi) {
    return Mat2::outer(psi.v, psi.v);
}

/// max elementwise |sum_m F_m - I| for a candidate psi subset.
inline double resolution_residual(const std::vector<PsiVector>& psi) {
    Mat2 sum = Mat2::zero();
    for (const auto& p : psi) sum = sum + effect_operator(p);
    return max_abs_diff(sum, Mat2::identity());
}

/// One nonselective measurement: N paired vectors (|psi_m>, |phi_m>).
/// Construction validates the resolution of the identity rather than
/// repairing the input.
class MeasurementSet {
public:
    MeasurementSet(std::vector<PsiVector> psi, std::vector<PhiVector> phi)
        : psi_(std::move(psi)), phi_(std::move(phi)) {
        if (psi_.size() < 2 || psi_.size() != phi_.size())
            throw InvalidSet("MeasurementSet: need N >= 2 paired vectors");
        for (const auto& p : psi_)
            if (p.n_outcomes != static_cast<int>(psi_.size()))
                throw InvalidSet("MeasurementSet: inconsistent n_outcomes");
        if (resolution_residual(psi_) > 1e-10)
            throw InvalidSet(
                "MeasurementSet: effects do not resolve the identity");
    }

    static MeasurementSet from_angles(const std::vector<EulerAngles>& psi_angles,
                                      const std::vector<EulerAngles>& phi_angles) {
        if (psi_angles.size() != phi_angles.size())
            throw InvalidSet("MeasurementSet: angle lists differ in length");
        const int n = static_cast<int>(psi_angles.size());
        std::vector<PsiVector> psi;
        std::vector<PhiVector> phi;
        for (int m = 0; m < n; ++m) {
            psi.push_back(psi_from_angles(psi_angles[m], n));
            phi.push_back(phi_from_angles(phi_angles[m]));
        }
        return MeasurementSet(std::move(psi), std::move(phi));
    }

    int n_outcomes() const { return static_cast<int>(psi_.size()); }
    const std::vector<PsiVector>& psi() const { return psi_; }
    const std::vector<PhiVector>& phi() const { return phi_; }

private:
    std::vector<PsiVector> psi_;
    std::vector<PhiVector> phi_;
};

inline double validate_resolution(const MeasurementSet& set) {
    return resolution_residual(set.psi());
}

/// G = (2/N) sum_m |phi_m><phi_m|
inline Mat2 gram_operator(const MeasurementSet& set) {
    Mat2 sum = Mat2::zero();
    for (const auto& p : set.phi()) sum = sum + Mat2::outer(p.v, p.v);
    return Complex(2.0 / set.n_outcomes()) * sum;
}

/// |sum_m e^(i phi_b) sin theta_b| evaluated from amplitudes:
/// e^(i phi) sin theta = 2 b0 conj(b1).
inline double gram_diagonality_residual(const std::vector<PhiVector>& phi) {
    Complex s{};
    for (const auto& p : phi) s += 2.0 * p.v.c0 * std::conj(p.v.c1);
    return std::abs(s);
}

inline double gram_diagonality_residual(const MeasurementSet& set) {
    return gram_diagonality_residual(set.phi());
}

/// Same condition evaluated directly from Euler angles.
inline double gram_diagonality_residual(const std::vector<EulerAngles>& phi_angles) {
    Complex s{};
    for (const auto& a : phi_angles)
        s += std::polar(std::sin(a.theta), a.phi);
    return std::abs(s);
}

/// The symmetric N=3 psi subset: theta_a = pi/2, azimuths 0, 2*pi/3, 4*pi/3.
/// Always resolves the identity.
inline std::vector<EulerAngles> trine_psi_angles() {
    return {EulerAngles(kPi / 2, 0.0), EulerAngles(kPi / 2, kTwoPi / 3),
            EulerAngles(kPi / 2, 2.0 * kTwoPi / 3)};
}

/// Azimuths phi_a completing three given polar angles theta_a into an
/// identity-resolving psi subset (N = 3). The off-diagonal constraint
/// sum_m e^(-i phi) sin theta = 0 is a closed triangle with side lengths
/// sin theta_a^(m); infeasible side lengths raise InvalidSet.
inline std::vector<EulerAngles> complete_psi_angles(
    const std::vector<double>& theta_a) {
    if (theta_a.size() != 3)
        throw InvalidSet("complete_psi_angles: need exactly 3 polar angles");
    double cos_sum = 0.0;
    for (double t : theta_a) cos_sum += std::cos(t);
    if (std::abs(cos_sum) > 1e-10)
        throw InvalidSet("complete_psi_angles: cos theta_a must sum to zero");

    const double s1 = std::sin(theta_a[0]);
    const double s2 = std::sin(theta_a[1]);
    const double s3 = std::sin(theta_a[2]);
    if (s2 + s3 < s1 - 1e-12 || s1 + s3 < s2 - 1e-12 || s1 + s2 < s3 - 1e-12)
        throw InvalidSet(
            "complete_psi_angles: sin theta_a violate the triangle inequality");

    if (s1 < 1e-15 && s2 < 1e-15 && s3 < 1e-15)
        return {EulerAngles(theta_a[0], 0.0), EulerAngles(theta_a[1], 0.0),
                EulerAngles(theta_a[2], 0.0)};

    auto clamp1 = [](double x) { return std::clamp(x, -1.0, 1.0); };
    // interior angles opposite s3 and s2
    const double u = std::acos(clamp1((s1 * s1 + s2 * s2 - s3 * s3) /
                                      std::max(2.0 * s1 * s2, 1e-300)));
    const double t = std::acos(clamp1((s1 * s1 + s3 * s3 - s2 * s2) /
                                      std::max(2.0 * s1 * s3, 1e-300)));
    return {EulerAngles(theta_a[0], 0.0), EulerAngles(theta_a[1], kPi - u),
            EulerAngles(theta_a[2], wrap_angle(kPi + t))};
}

}  // namespace povmprep
