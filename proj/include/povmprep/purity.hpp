#pragma once

// The constrained purity-minimum problem on the probability simplex,
// self-consistency angles, temperature sweeps and asymptotic purities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

#include "povmprep/basis.hpp"
#include "povmprep/errors.hpp"
#include "povmprep/preparation.hpp"
#include "povmprep/smallmat.hpp"

namespace povmprep {

/// N x N real symmetric matrix of squared overlaps |C_mn|^2.
struct OverlapMatrix {
    int n;
    RealMatN c2;

    static OverlapMatrix from_phi(const std::vector<PhiVector>& phi) {
        const int n = static_cast<int>(phi.size());
        RealMatN m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = std::norm(inner(phi[i].v, phi[j].v));
        return {n, m};
    }

    /// Closed trigonometric form:
    /// |C_mn|^2 = cos^2(dphi/2) cos^2((thm - thn)/2) + sin^2(dphi/2) cos^2((thm + thn)/2)
    static OverlapMatrix from_angles(const std::vector<EulerAngles>& phi_angles) {
        const int n = static_cast<int>(phi_angles.size());
        RealMatN m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double dp = 0.5 * (phi_angles[i].phi - phi_angles[j].phi);
                const double tm = 0.5 * (phi_angles[i].theta - phi_angles[j].theta);
                const double tp = 0.5 * (phi_angles[i].theta + phi_angles[j].theta);
                const double c = std::cos(dp) * std::cos(tm);
                const double s = std::sin(dp) * std::cos(tp);
                m(i, j) = c * c + s * s;
            }
        return {n, m};
    }
};

enum class ExtremalStatus { Ok, OmegaOutOfRange, SingularOverlap };

/// Extremal probabilities and the minimal purity; infeasibility is data.
struct ExtremalSolution {
    std::vector<double> omega_ext;
    double p_min;
    bool feasible;
    ExtremalStatus reason;
};

/// omega_n^(ext) = sum_m inv(C)_mn / sum_mn inv(C)_mn;
/// p_min = 1 / sum_mn inv(C)_mn. Raw values are reported even when the
/// solution leaves the simplex.
inline ExtremalSolution extremal_probabilities(const OverlapMatrix& c) {
    RealMatN inv(c.n);
    try {
        if (condition_estimate(c.c2) > 1e12)
            throw SingularMatrix("overlap matrix ill-conditioned");
        inv = invert(c.c2);
    } catch (const SingularMatrix&) {
        return {std::vector<double>(c.n, 0.0), 0.0, false,
                ExtremalStatus::SingularOverlap};
    }

    double total = 0.0;
    std::vector<double> col(c.n, 0.0);
    for (int j = 0; j < c.n; ++j) {
        for (int i = 0; i < c.n; ++i) col[j] += inv(i, j);
        total += col[j];
    }

    std::vector<double> w(c.n);
    bool in_range = true;
    for (int j = 0; j < c.n; ++j) {
        w[j] = col[j] / total;
        if (w[j] < -1e-10 || w[j] > 1.0 + 1e-10) in_range = false;
    }
    const double p_min = 1.0 / total;
    if (!in_range)
        return {w, p_min, false, ExtremalStatus::OmegaOutOfRange};
    for (double& x : w) x = std::clamp(x, 0.0, 1.0);
    return {w, p_min, true, ExtremalStatus::Ok};
}

/// sum_mn |C_mn|^2 omega_m omega_n
inline double purity_bilinear(const OverlapMatrix& c,
                              const std::vector<double>& omega) {
    if (static_cast<int>(omega.size()) != c.n)
        throw NotOnSimplex("purity_bilinear: dimension mismatch");
    double s = 0.0;
    for (double w : omega) {
        if (w < -1e-10 || w > 1.0 + 1e-10)
            throw NotOnSimplex("purity_bilinear: omega outside [0, 1]");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-10)
        throw NotOnSimplex("purity_bilinear: omega does not sum to 1");

    double p = 0.0;
    for (int i = 0; i < c.n; ++i)
        for (int j = 0; j < c.n; ++j) p += c.c2(i, j) * omega[i] * omega[j];
    return p;
}

struct BruteForceResult {
    std::vector<double> omega;
    double p;
};

/// Exhaustive minimization of the bilinear form over a simplex lattice with
/// the last coordinate eliminated; the constraint holds exactly by
/// construction.
inline BruteForceResult brute_force_min(const OverlapMatrix& c,
                                        double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 0.1))
        throw Error("brute_force_min: grid_step must be in (0, 0.1]");
    const int steps = static_cast<int>(std::lround(1.0 / grid_step));

    std::vector<double> best;
    double best_p = std::numeric_limits<double>::infinity();
    std::vector<double> w(c.n, 0.0);

    auto value = [&](const std::vector<double>& omega) {
        double p = 0.0;
        for (int i = 0; i < c.n; ++i)
            for (int j = 0; j < c.n; ++j) p += c.c2(i, j) * omega[i] * omega[j];
        return p;
    };

    // recursive lattice walk over the first n-1 coordinates
    auto walk = [&](auto&& self, int coord, int remaining) -> void {
        if (coord == c.n - 1) {
            w[coord] = static_cast<double>(remaining) / steps;
            const double p = value(w);
            if (p < best_p) {
                best_p = p;
                best = w;
            }
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            w[coord] = static_cast<double>(k) / steps;
            self(self, coord + 1, remaining - k);
        }
    };
    walk(walk, 0, steps);
    return {best, best_p};
}

/// cos theta_a = (1 - N omega^(ext)) coth(beta*omega0/2), N = 3.
inline double self_consistent_theta_a(double omega_ext, ThermalParams t,
                                      int n_outcomes) {
    if (n_outcomes != 3)
        throw Error("self_consistent_theta_a: defined for N = 3");
    const double rhs = (1.0 - n_outcomes * omega_ext) * t.coth_half();
    if (!(std::abs(rhs) <= 1.0))
        throw Unattainable(
            "self_consistent_theta_a: |cos theta_a| would exceed 1");
    return std::acos(rhs);
}

/// Largest k_B T / omega0 at which the self-consistency condition is solvable
/// for every outcome: coth(beta*omega0/2) max_m |1 - 3 omega_m| = 1.
/// Returns +inf when all omega_m = 1/3.
inline double max_self_consistent_kT(const std::vector<double>& omega_ext,
                                     int n_outcomes) {
    if (n_outcomes != 3 || omega_ext.size() != 3)
        throw Error("max_self_consistent_kT: defined for N = 3");
    double m = 0.0;
    for (double w : omega_ext) m = std::max(m, std::abs(1.0 - 3.0 * w));
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    if (m > 1.0)
        throw Unattainable(
            "max_self_consistent_kT: unsolvable even at zero temperature");
    if (m == 1.0) return 0.0;
    return 0.5 / std::atanh(m);
}

struct SweepRecord {
    double kT_over_omega0;
    double purity;
    double coherence_abs;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    double p_min;
    std::vector<double> omega_ext;
    std::vector<double> theta_a;
    std::size_t minimum_index;
};

/// Default temperature grid: 201 uniform points on k_B T / omega0 in [0, 3].
inline std::vector<double> default_sweep_grid() {
    std::vector<double> g(201);
    for (int i = 0; i < 201; ++i) g[i] = 3.0 * i / 200.0;
    return g;
}

/// Fixes theta_a at T* via the self-consistency condition, then recomputes
/// probabilities, purity and |<sigma_+>| at every grid temperature. T* is
/// inserted into the grid when missing, so the minimum row equals p_min
/// exactly. Rows are independent; `threads` > 1 parallelizes with identical
/// results.
inline SweepResult temperature_sweep(const std::vector<EulerAngles>& phi_angles,
                                     ThermalParams t_star,
                                     std::vector<double> kT_grid,
                                     unsigned threads = 1) {
    if (phi_angles.size() != 3)
        throw Error("temperature_sweep: defined for N = 3");
    const OverlapMatrix c = OverlapMatrix::from_angles(phi_angles);
    const ExtremalSolution ext = extremal_probabilities(c);
    if (!ext.feasible)
        throw Unattainable(
            "temperature_sweep: extremal probabilities leave the simplex");

    std::vector<double> theta_a(3);
    std::vector<double> cos_a(3);
    for (int m = 0; m < 3; ++m) {
        theta_a[m] = self_consistent_theta_a(ext.omega_ext[m], t_star, 3);
        cos_a[m] = std::cos(theta_a[m]);
    }

    const double t_star_kT = t_star.kT_over_omega0();
    bool has_star = false;
    for (double t : kT_grid)
        if (t == t_star_kT) has_star = true;
    if (!has_star) kT_grid.push_back(t_star_kT);
    std::sort(kT_grid.begin(), kT_grid.end());

    // off-diagonal element of each |phi><phi|: rho(1,0) contribution
    std::vector<Complex> offdiag(3);
    for (int m = 0; m < 3; ++m) {
        const PhiVector p = phi_from_angles(phi_angles[m]);
        offdiag[m] = p.v.c0 * std::conj(p.v.c1);
    }

    std::vector<SweepRecord> rec(kT_grid.size());
    auto fill = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double th = ThermalParams::from_kT(kT_grid[i]).tanh_half();
            std::vector<double> w(3);
            Complex od{};
            for (int m = 0; m < 3; ++m) {
                w[m] = (1.0 - cos_a[m] * th) / 3.0;
                od += w[m] * offdiag[m];
            }
            rec[i] = {kT_grid[i], purity_bilinear(c, w), std::abs(od)};
        }
    };

    threads = std::max(1u, threads);
    if (threads == 1 || rec.size() < 2 * threads) {
        fill(0, rec.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (rec.size() + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            const std::size_t lo = k * chunk;
            const std::size_t hi = std::min(rec.size(), lo + chunk);
            if (lo < hi) pool.emplace_back(fill, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    std::size_t imin = 0;
    for (std::size_t i = 1; i < rec.size(); ++i)
        if (rec[i].purity < rec[imin].purity) imin = i;
    return {std::move(rec), ext.p_min, ext.omega_ext, std::move(theta_a), imin};
}

/// (P at T = 0, P in the high-temperature limit).
inline std::pair<double, double> asymptotic_purities(const MeasurementSet& set) {
    const int n = set.n_outcomes();
    const OverlapMatrix c = OverlapMatrix::from_phi(set.phi());
    double p_zero = 0.0;
    double p_high = 0.0;
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) {
            p_zero += c.c2(m, k) * std::norm(set.psi()[m].v.c0) *
                      std::norm(set.psi()[k].v.c0);
            p_high += c.c2(m, k);
        }
    p_high /= static_cast<double>(n) * n;
    return {p_zero, p_high};
}

}  // namespace povmprep
