#pragma once

// Generators for the admissible measurement-setting families: the three
// Gram-diagonal cases, the equal-overlap families forcing omega^(ext) = 1/3,
// and degenerate-subset handling.

#include <cmath>
#include <string>
#include <vector>

#include "povmprep/basis.hpp"
#include "povmprep/errors.hpp"
#include "povmprep/preparation.hpp"

namespace povmprep {

enum class ArcsinBranch { Acute, Obtuse };

inline double arcsin_branch(double s, ArcsinBranch b) {
    const double a = std::asin(std::clamp(s, -1.0, 1.0));
    return b == ArcsinBranch::Acute ? a : kPi - a;
}

/// phi Euler angles plus diagnostics accumulated during generation.
struct GeneratedSetting {
    std::vector<EulerAngles> phi_angles;
    std::vector<std::string> warnings;
    bool unphysical = false;
};

/// Case with all azimuth differences multiples of pi. Admissible (k, l) pairs
/// are (1, 0) and (1, 1); theta_b1 > theta_b2 is assumed and swapped inputs
/// are reordered with a notice.
struct Case1Params {
    double theta_b1;
    double theta_b2;
    int k = 1;
    int l = 0;
    double phi_b3_gauge = 0.0;
    ArcsinBranch theta3_branch = ArcsinBranch::Acute;
};

inline GeneratedSetting generate_case1(const Case1Params& p) {
    GeneratedSetting out;
    double t1 = p.theta_b1;
    double t2 = p.theta_b2;
    if (!(t1 >= 0.0 && t1 <= kPi && t2 >= 0.0 && t2 <= kPi))
        throw OutOfWindow("case1: polar angles must lie in [0, pi]");
    if (t1 < t2) {
        std::swap(t1, t2);
        out.warnings.push_back("theta_b1 < theta_b2: inputs swapped");
    }
    if (!((p.k == 1 && p.l == 0) || (p.k == 1 && p.l == 1)))
        throw OutOfWindow("case1: admissible (k, l) pairs are (1,0) and (1,1)");

    const double s3 = (p.l == 0) ? std::sin(t1) - std::sin(t2)
                                 : std::sin(t1) + std::sin(t2);
    if (s3 < -1e-12 || s3 > 1.0 + 1e-12)
        throw OutOfWindow("case1: sin theta_b3 outside [0, 1]");
    const double t3 = arcsin_branch(std::clamp(s3, 0.0, 1.0), p.theta3_branch);

    const double g = p.phi_b3_gauge;
    out.phi_angles = {EulerAngles(t1, g + kPi * p.k),
                      EulerAngles(t2, g + kPi * p.l), EulerAngles(t3, g)};
    if (std::abs(std::cos(out.phi_angles[2].phi)) < 1e-12)
        out.warnings.push_back("cos phi_b3 = 0 (outside the stated assumption)");
    return out;
}

enum class Case2Branch { Same, Mirror };

/// Case with sin theta_b2 = 0: theta_b2 = pi*k, phi_b1 - phi_b3 = pi and
/// theta_b3 equal to theta_b1 (Same) or pi - theta_b1 (Mirror).
struct Case2Params {
    double theta_b1;
    int k = 0;
    Case2Branch branch = Case2Branch::Same;
};

inline GeneratedSetting generate_case2(const Case2Params& p) {
    if (!(p.theta_b1 > 0.0 && p.theta_b1 < kPi))
        throw OutOfWindow("case2: need sin theta_b1 != 0");
    if (p.k != 0 && p.k != 1) throw OutOfWindow("case2: k must be 0 or 1");
    const double t3 =
        p.branch == Case2Branch::Same ? p.theta_b1 : kPi - p.theta_b1;
    GeneratedSetting out;
    out.phi_angles = {EulerAngles(p.theta_b1, kPi), EulerAngles(kPi * p.k, 0.0),
                      EulerAngles(t3, 0.0)};
    return out;
}

/// Three-parameter case with generic azimuth differences
/// Delta_ij = phi_b^(i) - phi_b^(j).
struct Case3Params {
    double theta_b1;
    double delta12;
    double delta13;
};

struct Case3Solution {
    std::vector<EulerAngles> phi_angles;
    ArcsinBranch branch2;
    ArcsinBranch branch3;
};

/// Checks the five window conditions; throws OutOfWindow naming the first
/// violated one.
inline void validate_case3_window(const Case3Params& p) {
    const double t1 = p.theta_b1;
    if (!(t1 > 0.0 && t1 < kPi))
        throw OutOfWindow("case3: need 0 < theta_b1 < pi");
    if (!(p.delta13 > 0.0 && p.delta13 < kPi))
        throw OutOfWindow("case3: need 0 < delta13 < pi");
    if (!(p.delta12 > kPi && p.delta12 < kTwoPi))
        throw OutOfWindow("case3: need pi < delta12 < 2*pi");
    if (!(p.delta12 - p.delta13 > 0.0 && p.delta12 - p.delta13 < kPi))
        throw OutOfWindow("case3: need 0 < delta12 - delta13 < pi");
    const double a13 = std::asin(std::clamp(std::sin(p.delta13) * std::sin(t1),
                                            -1.0, 1.0));
    if (!(p.delta13 + a13 <= p.delta12 &&
          p.delta12 <= kPi + p.delta13 - a13))
        throw OutOfWindow("case3: delta12 outside its arcsine window");
    const double a12 = std::asin(std::clamp(std::sin(p.delta12) * std::sin(t1),
                                            -1.0, 1.0));
    if (!(p.delta12 - kPi - a12 <= p.delta13 &&
          p.delta13 <= p.delta12 + a12))
        throw OutOfWindow("case3: delta13 outside its arcsine window");
}

/// All arcsine-branch solutions whose Gram residual vanishes numerically.
/// The first entry is the canonical branch (theta_b2 obtuse, theta_b3 acute),
/// which reproduces the reference temperature-sweep configuration.
inline std::vector<Case3Solution> generate_case3(const Case3Params& p) {
    validate_case3_window(p);
    const double denom = std::sin(p.delta12 - p.delta13);
    const double s2 = std::sin(p.delta13) / denom * std::sin(p.theta_b1);
    const double s3 = -std::sin(p.delta12) / denom * std::sin(p.theta_b1);
    if (s2 < -1e-12 || s2 > 1.0 + 1e-12 || s3 < -1e-12 || s3 > 1.0 + 1e-12)
        throw OutOfWindow("case3: implied sines outside [0, 1]");

    // gauge: phi_b3 = 0
    const double p1 = p.delta13;
    const double p2 = p.delta13 - p.delta12;

    std::vector<Case3Solution> out;
    const ArcsinBranch order2[] = {ArcsinBranch::Obtuse, ArcsinBranch::Acute};
    const ArcsinBranch order3[] = {ArcsinBranch::Acute, ArcsinBranch::Obtuse};
    for (ArcsinBranch b2 : order2)
        for (ArcsinBranch b3 : order3) {
            std::vector<EulerAngles> ang = {
                EulerAngles(p.theta_b1, p1),
                EulerAngles(arcsin_branch(std::clamp(s2, 0.0, 1.0), b2), p2),
                EulerAngles(arcsin_branch(std::clamp(s3, 0.0, 1.0), b3), 0.0)};
            if (gram_diagonality_residual(ang) < 1e-10)
                out.push_back({std::move(ang), b2, b3});
        }
    if (out.empty())
        throw OutOfWindow("case3: no branch satisfies the Gram condition");
    return out;
}

/// The four one-parameter families with all off-diagonal overlaps equal,
/// labeled by their (k, l) azimuth choice and the (q, r) assignment in the
/// compatibility condition q + r = p (p = 1 throughout).
enum class EqualOverlapVariant {
    KL11_QR01,  // k=l=1, q=0, r=1
    KL11_QR10,  // k=l=1, q=1, r=0
    KL10_QR01,  // k=1, l=0, q=0, r=1
    KL10_QR10,  // k=1, l=0, q=1, r=0
};

inline bool equal_overlap_compatible(int p, int q, int r) { return q + r == p; }

inline GeneratedSetting equal_overlap_case1_family(double theta_b3,
                                                   EqualOverlapVariant v) {
    double t1 = 0.0;
    double t2 = 0.0;
    int l = 0;
    switch (v) {
        case EqualOverlapVariant::KL11_QR01:
            if (!(theta_b3 > kPi / 3 && theta_b3 < 2 * kPi / 3))
                throw OutOfWindow("equal-overlap: theta_b3 outside (pi/3, 2pi/3)");
            t1 = 2 * kPi / 3 - theta_b3;
            t2 = 4 * kPi / 3 - theta_b3;
            l = 1;
            break;
        case EqualOverlapVariant::KL11_QR10:
            if (!(theta_b3 > kPi / 3 && theta_b3 < 2 * kPi / 3))
                throw OutOfWindow("equal-overlap: theta_b3 outside (pi/3, 2pi/3)");
            t1 = 4 * kPi / 3 - theta_b3;
            t2 = 2 * kPi / 3 - theta_b3;
            l = 1;
            break;
        case EqualOverlapVariant::KL10_QR01:
            if (!(theta_b3 > 2 * kPi / 3 && theta_b3 < kPi))
                throw OutOfWindow("equal-overlap: theta_b3 outside (2pi/3, pi)");
            t1 = 4 * kPi / 3 - theta_b3;
            t2 = -2 * kPi / 3 + theta_b3;
            l = 0;
            break;
        case EqualOverlapVariant::KL10_QR10:
            if (!(theta_b3 > 0.0 && theta_b3 < kPi / 3))
                throw OutOfWindow("equal-overlap: theta_b3 outside (0, pi/3)");
            t1 = 2 * kPi / 3 - theta_b3;
            t2 = 2 * kPi / 3 + theta_b3;
            l = 0;
            break;
    }
    GeneratedSetting out;
    out.phi_angles = {EulerAngles(t1, kPi), EulerAngles(t2, kPi * l),
                      EulerAngles(theta_b3, 0.0)};
    return out;
}

/// Equal-overlap settings in the sin theta_b2 = 0 case: theta_b1 = 2*pi/3 at
/// k = 0, pi/3 at k = 1. The Mirror branch yields omega^(ext) = (1/2, 0, 1/2)
/// and is flagged unphysical (zero amplitudes are excluded by construction).
inline GeneratedSetting equal_overlap_case2_family(
    int k, Case2Branch branch = Case2Branch::Same) {
    if (k != 0 && k != 1) throw OutOfWindow("equal-overlap case2: k must be 0 or 1");
    const double t1 = (k == 0) ? 2 * kPi / 3 : kPi / 3;
    GeneratedSetting out = generate_case2({t1, k, branch});
    if (branch == Case2Branch::Mirror) {
        out.unphysical = true;
        out.warnings.push_back(
            "mirror branch forces omega^(ext) = (1/2, 0, 1/2): unphysical");
    }
    return out;
}

/// Effective measurement after merging phi duplicates (equal up to a global
/// phase within 1e-10): duplicate weights are summed.
struct CollapsedState {
    std::vector<PhiVector> phi;
    std::vector<double> omega;
    std::vector<std::vector<int>> groups;
    int effective_outcomes() const { return static_cast<int>(phi.size()); }
};

inline CollapsedState degenerate_collapse(const std::vector<PhiVector>& phi,
                                          const std::vector<double>& omega) {
    if (phi.size() != omega.size())
        throw Error("degenerate_collapse: phi/omega size mismatch");
    CollapsedState out;
    for (int i = 0; i < static_cast<int>(phi.size()); ++i) {
        bool merged = false;
        for (std::size_t g = 0; g < out.phi.size(); ++g) {
            if (std::abs(inner(out.phi[g].v, phi[i].v)) > 1.0 - 1e-10) {
                out.omega[g] += omega[i];
                out.groups[g].push_back(i);
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.phi.push_back(phi[i]);
            out.omega.push_back(omega[i]);
            out.groups.push_back({i});
        }
    }
    return out;
}

}  // namespace povmprep
