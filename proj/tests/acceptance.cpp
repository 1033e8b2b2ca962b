// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each check recomputes its expectations independently of
// the library path under test wherever an independent route exists.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "povmprep/povmprep.hpp"

#ifndef POVM_PREP_BIN
#error "POVM_PREP_BIN must point at the povm-prep binary"
#endif

using namespace povmprep;

namespace {

std::mt19937 rng(20240817);

std::vector<EulerAngles> random_phi_angles() {
    std::uniform_real_distribution<double> ut(0.0, kPi);
    std::uniform_real_distribution<double> up(0.0, kTwoPi);
    return {{ut(rng), up(rng)}, {ut(rng), up(rng)}, {ut(rng), up(rng)}};
}

std::vector<EulerAngles> random_psi_angles() {
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int attempt = 0; attempt < 60; ++attempt) {
        const double c1 = u(rng), c2 = u(rng), c3 = -c1 - c2;
        if (std::abs(c3) > 1.0) continue;
        try {
            return complete_psi_angles(
                {std::acos(c1), std::acos(c2), std::acos(c3)});
        } catch (const InvalidSet&) {
        }
    }
    return trine_psi_angles();
}

// random case-1 setting; throws OutOfWindow for infeasible draws
GeneratedSetting random_case1() {
    std::uniform_real_distribution<double> ut(0.0, kPi);
    std::uniform_real_distribution<double> up(0.0, kTwoPi);
    return generate_case1({ut(rng), ut(rng), 1, static_cast<int>(rng() % 2),
                           up(rng),
                           rng() % 2 ? ArcsinBranch::Acute
                                     : ArcsinBranch::Obtuse});
}

GeneratedSetting random_case2() {
    std::uniform_real_distribution<double> ut(0.05, kPi - 0.05);
    return generate_case2({ut(rng), static_cast<int>(rng() % 2),
                           rng() % 2 ? Case2Branch::Same
                                     : Case2Branch::Mirror});
}

std::vector<Case3Solution> random_case3() {
    std::uniform_real_distribution<double> ut(0.1, kPi - 0.1);
    std::uniform_real_distribution<double> u12(kPi + 0.1, kTwoPi - 0.1);
    std::uniform_real_distribution<double> u13(0.1, kPi - 0.1);
    return generate_case3({ut(rng), u12(rng), u13(rng)});
}

const Case3Params kReferenceParams{4 * kPi / 5, 7 * kPi / 5, 3 * kPi / 4};

std::vector<EulerAngles> reference_phi() {
    return generate_case3(kReferenceParams).front().phi_angles;
}

// psi subset sitting at the purity minimum of `phi_angles` at temperature t
std::vector<EulerAngles> self_consistent_psi(
    const std::vector<EulerAngles>& phi_angles, ThermalParams t) {
    const ExtremalSolution e =
        extremal_probabilities(OverlapMatrix::from_angles(phi_angles));
    if (!e.feasible) throw Unattainable("extremum infeasible");
    std::vector<double> theta_a(3);
    for (int m = 0; m < 3; ++m)
        theta_a[m] = self_consistent_theta_a(e.omega_ext[m], t, 3);
    // azimuth closure loses accuracy when the sine triangle degenerates
    // (a side near zero or three nearly collinear sides), so reject those
    // configurations instead of producing a poorly resolving set
    const double s1 = std::sin(theta_a[0]);
    const double s2 = std::sin(theta_a[1]);
    const double s3 = std::sin(theta_a[2]);
    if (std::min({s1, s2, s3}) < 0.05)
        throw Unattainable("degenerate sine triangle");
    const double cu1 = (s2 * s2 + s3 * s3 - s1 * s1) / (2.0 * s2 * s3);
    const double cu2 = (s1 * s1 + s3 * s3 - s2 * s2) / (2.0 * s1 * s3);
    const double cu3 = (s1 * s1 + s2 * s2 - s3 * s3) / (2.0 * s1 * s2);
    if (std::max({std::abs(cu1), std::abs(cu2), std::abs(cu3)}) > 1.0 - 1e-6)
        throw Unattainable("near-collinear sine triangle");
    return complete_psi_angles(theta_a);
}

bool run_criterion(int index, const std::string& label,
                   const std::function<bool(std::string&)>& fn) {
    std::string detail;
    bool ok = false;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", index,
                label.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    return ok;
}

// --------------------------------------------------------------------------

bool criterion_resolution(std::string& detail) {
    std::vector<PsiVector> trine;
    for (const auto& a : trine_psi_angles())
        trine.push_back(psi_from_angles(a, 3));
    if (resolution_residual(trine) >= 1e-10) {
        detail = "trine residual too large";
        return false;
    }

    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 100; ++trial) {
        std::vector<EulerAngles> phi_angles;
        try {
            switch (trial % 3) {
                case 0: phi_angles = random_case1().phi_angles; break;
                case 1: phi_angles = random_case2().phi_angles; break;
                default: phi_angles = random_case3().front().phi_angles;
            }
        } catch (const OutOfWindow&) {
            continue;
        }
        std::vector<EulerAngles> psi_angles;
        try {
            psi_angles =
                self_consistent_psi(phi_angles, ThermalParams::from_kT(0.0));
        } catch (const Error&) {
            continue;  // infeasible extremum or triangle closure
        }
        std::vector<PsiVector> psi;
        for (const auto& a : psi_angles) psi.push_back(psi_from_angles(a, 3));
        if (resolution_residual(psi) >= 1e-10) {
            detail = "generated setting residual too large";
            return false;
        }
        ++checked;
    }
    detail = std::to_string(checked) + " generated settings checked";
    return checked >= 100;
}

bool criterion_pmin_half(std::string& detail) {
    int n1 = 0, n2 = 0;
    for (int trial = 0; trial < 4000 && (n1 < 100 || n2 < 100); ++trial) {
        GeneratedSetting g;
        const bool use_case1 = (trial % 2 == 0);
        try {
            g = use_case1 ? random_case1() : random_case2();
        } catch (const OutOfWindow&) {
            continue;
        }
        const OverlapMatrix c = OverlapMatrix::from_angles(g.phi_angles);
        // the computed p_min carries an eps * cond error, so the 1e-12
        // comparison is only meaningful for well-conditioned draws
        if (condition_estimate(c.c2) > 1e4) continue;
        const ExtremalSolution e = extremal_probabilities(c);
        if (std::abs(e.p_min - 0.5) >= 1e-12) {
            detail = "p_min deviates from 1/2 by " +
                     std::to_string(std::abs(e.p_min - 0.5));
            return false;
        }
        (use_case1 ? n1 : n2)++;
    }
    detail = std::to_string(n1) + " case-1 and " + std::to_string(n2) +
             " case-2 draws";
    return n1 >= 100 && n2 >= 100;
}

bool criterion_case3_bound(std::string& detail) {
    int checked = 0;
    for (int trial = 0; trial < 4000 && checked < 100; ++trial) {
        std::vector<Case3Solution> sols;
        try {
            sols = random_case3();
        } catch (const OutOfWindow&) {
            continue;
        }
        bool counted = false;
        for (const auto& s : sols) {
            // the strict bound degenerates to equality where the window
            // family collapses onto the p_min = 1/2 cases: as sum cos theta
            // approaches 0 or a polar angle approaches 0 or pi, p_min tends
            // to 1/2 continuously; sample away from those limits
            double cos_sum = 0.0;
            double sin_min = 1.0;
            for (const auto& a : s.phi_angles) {
                cos_sum += std::cos(a.theta);
                sin_min = std::min(sin_min, std::sin(a.theta));
            }
            if (std::abs(cos_sum) <= 0.5 || sin_min <= 0.2) continue;
            const ExtremalSolution e = extremal_probabilities(
                OverlapMatrix::from_angles(s.phi_angles));
            if (e.reason == ExtremalStatus::SingularOverlap) continue;
            if (e.p_min <= 0.5 + 1e-6) {
                detail = "p_min = " + std::to_string(e.p_min);
                return false;
            }
            counted = true;
        }
        if (counted) ++checked;
    }
    detail = std::to_string(checked) + " in-window draws";
    return checked >= 100;
}

bool criterion_oracle(std::string& detail) {
    int checked = 0;
    for (int trial = 0; trial < 600 && checked < 50; ++trial) {
        const OverlapMatrix c = OverlapMatrix::from_angles(random_phi_angles());
        const ExtremalSolution e = extremal_probabilities(c);
        if (!e.feasible) continue;
        // keep away from the simplex boundary so the interior extremum is
        // the grid minimizer too
        bool interior = true;
        for (double w : e.omega_ext)
            if (w < 0.02 || w > 0.98) interior = false;
        if (!interior) continue;

        const BruteForceResult b = brute_force_min(c, 1e-3);
        if (std::abs(b.p - e.p_min) >= 1e-4) {
            detail = "value gap " + std::to_string(std::abs(b.p - e.p_min));
            return false;
        }
        for (int i = 0; i < 3; ++i)
            if (std::abs(b.omega[i] - e.omega_ext[i]) >= 5e-3) {
                detail = "omega gap at index " + std::to_string(i);
                return false;
            }
        ++checked;
    }
    detail = std::to_string(checked) + " feasible overlap matrices";
    return checked >= 50;
}

bool criterion_equal_overlap(std::string& detail) {
    auto uniform_ok = [&](const GeneratedSetting& g) {
        const ExtremalSolution e =
            extremal_probabilities(OverlapMatrix::from_angles(g.phi_angles));
        if (!e.feasible) return false;
        for (double w : e.omega_ext)
            if (std::abs(w - 1.0 / 3.0) >= 1e-10) return false;
        return true;
    };

    const struct {
        EqualOverlapVariant v;
        double lo, hi;
    } variants[] = {
        {EqualOverlapVariant::KL11_QR01, kPi / 3, 2 * kPi / 3},
        {EqualOverlapVariant::KL11_QR10, kPi / 3, 2 * kPi / 3},
        {EqualOverlapVariant::KL10_QR01, 2 * kPi / 3, kPi},
        {EqualOverlapVariant::KL10_QR10, 0.0, kPi / 3},
    };
    for (const auto& v : variants) {
        std::uniform_real_distribution<double> u(v.lo + 0.02, v.hi - 0.02);
        for (int k = 0; k < 30; ++k)
            if (!uniform_ok(equal_overlap_case1_family(u(rng), v.v))) {
                detail = "case-1 family variant deviates from 1/3";
                return false;
            }
    }
    for (int k = 0; k < 2; ++k)
        if (!uniform_ok(equal_overlap_case2_family(k))) {
            detail = "case-2 family deviates from 1/3";
            return false;
        }

    const GeneratedSetting mirror =
        equal_overlap_case2_family(0, Case2Branch::Mirror);
    if (!mirror.unphysical) {
        detail = "mirror branch not flagged unphysical";
        return false;
    }
    const ExtremalSolution e =
        extremal_probabilities(OverlapMatrix::from_angles(mirror.phi_angles));
    const std::vector<double> want = {0.5, 0.0, 0.5};
    for (int i = 0; i < 3; ++i)
        if (std::abs(e.omega_ext[i] - want[i]) >= 1e-10) {
            detail = "mirror branch extremum is not (1/2, 0, 1/2)";
            return false;
        }
    return true;
}

bool criterion_reference_sweep(std::string& detail) {
    const auto phi = reference_phi();
    const ExtremalSolution e =
        extremal_probabilities(OverlapMatrix::from_angles(phi));
    if (!e.feasible) {
        detail = "reference extremum infeasible";
        return false;
    }
    const double boundary = max_self_consistent_kT(e.omega_ext, 3);

    // grid step of the default grid, for the argmin location check
    const double grid_step = 3.0 / 200.0;

    std::vector<double> stars = {0.0, 0.5, 0.75, boundary};
    for (std::size_t choice = 0; choice < stars.size(); ++choice) {
        const double t_star = stars[choice];
        const SweepResult r = temperature_sweep(
            phi, ThermalParams::from_kT(t_star), default_sweep_grid());
        const SweepRecord& min_row = r.records[r.minimum_index];
        if (std::abs(min_row.kT_over_omega0 - t_star) > grid_step) {
            detail = "minimum row away from T*";
            return false;
        }
        if (std::abs(min_row.purity - r.p_min) >= 1e-10) {
            detail = "minimum purity misses p_min";
            return false;
        }

        // coherence column: strictly positive, proportional to tanh
        double base = -1.0;
        for (const auto& row : r.records) {
            if (!(row.coherence_abs > 0.0)) {
                detail = "coherence column not strictly positive";
                return false;
            }
            const double th =
                ThermalParams::from_kT(row.kT_over_omega0).tanh_half();
            const double scaled = row.coherence_abs / th;
            if (base < 0.0)
                base = scaled;
            else if (std::abs(scaled - base) >= 1e-10 * base) {
                detail = "coherence not proportional to tanh";
                return false;
            }
        }

        if (choice == 3) {
            const double best_end = std::max(r.records.front().purity,
                                             r.records.back().purity);
            const double gain = best_end / min_row.purity - 1.0;
            if (gain <= 0.10) {
                detail = "choice-D purity gain " + std::to_string(gain);
                return false;
            }
        }
    }
    return true;
}

bool criterion_boundary(std::string& detail) {
    const auto phi = reference_phi();
    const ExtremalSolution e =
        extremal_probabilities(OverlapMatrix::from_angles(phi));
    double m = 0.0;
    for (double w : e.omega_ext) m = std::max(m, std::abs(1.0 - 3.0 * w));

    // independent bisection on coth(1/(2t)) * m = 1
    double lo = 1e-9, hi = 50.0;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        (m / std::tanh(0.5 / mid) < 1.0 ? lo : hi) = mid;
    }
    const double t_root = 0.5 * (lo + hi);
    detail = "root at " + std::to_string(t_root);
    if (std::abs(t_root - 1.11) > 0.02) return false;
    // and the closed form agrees with the root
    return std::abs(max_self_consistent_kT(e.omega_ext, 3) - t_root) < 1e-8;
}

bool criterion_a_factor(std::string& detail) {
    std::uniform_real_distribution<double> ub(std::log(0.1), std::log(50.0));
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 100; ++trial) {
        std::vector<EulerAngles> phi_angles;
        try {
            switch (trial % 3) {
                case 0: phi_angles = random_case1().phi_angles; break;
                case 1: phi_angles = random_case2().phi_angles; break;
                default: phi_angles = random_case3().front().phi_angles;
            }
        } catch (const OutOfWindow&) {
            continue;
        }
        if (gram_diagonality_residual(phi_angles) >= 1e-12) continue;
        const MeasurementSet set =
            MeasurementSet::from_angles(random_psi_angles(), phi_angles);
        const ThermalParams t(std::exp(ub(rng)));

        // the identity rests on exact cancellation of the summed phi
        // cross-terms; tiny numerators amplify the leftover rounding
        Complex x{};
        for (int m = 0; m < 3; ++m)
            x += std::conj(set.phi()[m].v.c1) * set.phi()[m].v.c0 *
                 std::norm(set.psi()[m].v.c0);
        if (std::abs(x) < 1e-4) continue;

        Complex a;
        try {
            a = a_factor(set, t);
        } catch (const ZeroDenominator&) {
            continue;
        }
        if (std::abs(a - Complex(t.coth_half())) >= 1e-10) {
            detail = "a_factor misses coth";
            return false;
        }
        const Complex formula = initial_coherence_formula(set, t);
        const Complex trace = reduced_density(set, t).coherence;
        if (std::abs(formula - trace) >= 1e-10) {
            detail = "coherence formula misses the matrix trace";
            return false;
        }
        ++checked;
    }
    detail = std::to_string(checked) + " diagonal-Gram sets";
    return checked >= 100;
}

bool criterion_asymptotics(std::string& detail) {
    int checked = 0;
    for (int trial = 0; trial < 300 && checked < 100; ++trial) {
        const MeasurementSet set =
            MeasurementSet::from_angles(random_psi_angles(),
                                        random_phi_angles());
        const auto [p_zero, p_high] = asymptotic_purities(set);
        const OverlapMatrix c = OverlapMatrix::from_phi(set.phi());

        const double p_cold = purity_bilinear(
            c, thermal_probabilities(set, ThermalParams(1e3)));
        const double p_hot = purity_bilinear(
            c, thermal_probabilities(set, ThermalParams(1e-6)));
        if (std::abs(p_cold - p_zero) >= 1e-6) {
            detail = "cold limit off by " +
                     std::to_string(std::abs(p_cold - p_zero));
            return false;
        }
        if (std::abs(p_hot - p_high) >= 1e-6) {
            detail = "hot limit off by " +
                     std::to_string(std::abs(p_hot - p_high));
            return false;
        }
        ++checked;
    }
    detail = std::to_string(checked) + " random sets";
    return checked >= 100;
}

bool criterion_srm(std::string& detail) {
    // fixed point and completeness on random full-rank prepared states
    int checked = 0;
    for (int trial = 0; trial < 500 && checked < 100; ++trial) {
        const MeasurementSet set =
            MeasurementSet::from_angles(random_psi_angles(),
                                        random_phi_angles());
        const PreparedState st = reduced_density(set, ThermalParams(1.0));
        if (psd_rank_deficient(st.rho.matrix())) continue;
        const SrmVectors srm = srm_vectors(st, set.phi());
        if (srm_completeness_residual(srm, st) >= 1e-9) {
            detail = "completeness residual too large";
            return false;
        }
        const TransferMatrix d = transfer_matrix(srm.vectors, set.phi());
        const std::vector<double> wt =
            updated_probabilities(d, st.probabilities);
        for (int n = 0; n < 3; ++n)
            if (std::abs(wt[n] - st.probabilities[n]) >= 1e-10) {
                detail = "fixed point violated";
                return false;
            }
        // repeating with the same phi keeps the purity
        if (std::abs(second_purity(set.phi(), wt) -
                     purity_bilinear(OverlapMatrix::from_phi(set.phi()),
                                     st.probabilities)) >= 1e-12) {
            detail = "repeat purity changed";
            return false;
        }
        ++checked;
    }
    if (checked < 100) {
        detail = "only " + std::to_string(checked) + " full-rank states";
        return false;
    }

    // orthonormal-pair repetition: identity transfer, purity preserved
    {
        const MeasurementSet vn = MeasurementSet::from_angles(
            {{0.0, 0.0}, {kPi, 0.0}}, {{0.0, 0.0}, {kPi, 0.0}});
        const PreparedState st = reduced_density(vn, ThermalParams(1.5));
        std::vector<Vec2> primed = {vn.phi()[0].v, vn.phi()[1].v};
        const TransferMatrix d = transfer_matrix(primed, vn.phi());
        const std::vector<double> wt =
            updated_probabilities(d, st.probabilities);
        if (std::abs(second_purity(vn.phi(), wt) - state_purity(st.rho)) >=
            1e-12) {
            detail = "orthonormal repetition changed the purity";
            return false;
        }
    }

    // modified second measurement started from a feasible global minimum:
    // the extremum must shift for at least one index
    int shifts = 0, tries = 0;
    for (int trial = 0; trial < 200 && tries < 20; ++trial) {
        const auto phi_angles = reference_phi();
        std::vector<EulerAngles> psi_angles;
        try {
            psi_angles = self_consistent_psi(phi_angles,
                                             ThermalParams::from_kT(0.5));
        } catch (const Error&) {
            continue;
        }
        const MeasurementSet set =
            MeasurementSet::from_angles(psi_angles, phi_angles);
        const PreparedState st =
            reduced_density(set, ThermalParams::from_kT(0.5));
        if (psd_rank_deficient(st.rho.matrix())) continue;

        std::vector<PhiVector> primed_phi;
        for (const auto& a : random_phi_angles())
            primed_phi.push_back(phi_from_angles(a));
        const SrmVectors srm = srm_vectors(st, primed_phi);
        const TransferMatrix d = transfer_matrix(srm.vectors, set.phi());
        try {
            const std::vector<bool> s = extremum_shift_check(
                OverlapMatrix::from_phi(set.phi()),
                OverlapMatrix::from_phi(primed_phi), d);
            ++tries;
            for (bool b : s)
                if (b) {
                    ++shifts;
                    break;
                }
        } catch (const SingularOverlap&) {
            continue;
        }
    }
    detail = std::to_string(shifts) + "/" + std::to_string(tries) +
             " modified subsets shifted the extremum";
    return tries >= 20 && shifts == tries;
}

bool criterion_determinism(std::string& detail) {
    const std::string cfg_path = "acceptance_sweep_cfg.json";
    {
        std::ofstream f(cfg_path, std::ios::binary);
        f << "{\"angles\":{\"case\":\"case3\",\"theta_b1\":0.8,"
             "\"delta12\":1.4,\"delta13\":0.75,\"branch2\":\"obtuse\","
             "\"branch3\":\"acute\"},\"t_star\":\"max\"}";
    }
    auto run_once = [&](const std::string& out, const std::string& env) {
        const std::string cmd = env + std::string(POVM_PREP_BIN) +
                                " sweep --config " + cfg_path +
                                " --format csv --out " + out +
                                " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    const bool ok = run_once("acceptance_a.csv", "") &&
                    run_once("acceptance_b.csv", "") &&
                    run_once("acceptance_c.csv", "POVM_PREP_THREADS=8 ");
    const std::string a = slurp("acceptance_a.csv");
    const std::string b = slurp("acceptance_b.csv");
    const std::string c = slurp("acceptance_c.csv");
    std::remove(cfg_path.c_str());
    std::remove("acceptance_a.csv");
    std::remove("acceptance_b.csv");
    std::remove("acceptance_c.csv");
    if (!ok || a.empty()) {
        detail = "sweep invocation failed";
        return false;
    }
    if (a != b) {
        detail = "two identical runs differ";
        return false;
    }
    if (a != c) {
        detail = "threaded run differs";
        return false;
    }
    return true;
}

}  // namespace

int main() {
    bool all = true;
    all &= run_criterion(1, "resolution of the identity",
                         criterion_resolution);
    all &= run_criterion(2, "p_min = 1/2 for case-1 and case-2 families",
                         criterion_pmin_half);
    all &= run_criterion(3, "case-3 strict bound p_min > 1/2",
                         criterion_case3_bound);
    all &= run_criterion(4, "brute-force oracle equivalence", criterion_oracle);
    all &= run_criterion(5, "equal-overlap families", criterion_equal_overlap);
    all &= run_criterion(6, "reference sweep reproduction", criterion_reference_sweep);
    all &= run_criterion(7, "self-consistency boundary near 1.11",
                         criterion_boundary);
    all &= run_criterion(8, "correlation factor equals coth",
                         criterion_a_factor);
    all &= run_criterion(9, "asymptotic purity limits", criterion_asymptotics);
    all &= run_criterion(10, "square-root-measurement suite", criterion_srm);
    all &= run_criterion(11, "deterministic sweep output",
                         criterion_determinism);
    return all ? 0 : 1;
}
