// povm-prep: configuration-driven front end for the povmprep library.
//
// Invocation:
//   povm-prep <validate|prepare|sweep|generate|repeat|oracle>
//             --config <path> [--out <path>] [--format csv|json]
//
// The config is a single JSON document (path or "-" for stdin). All angles in
// the config are expressed in units of pi. Floats in the output are printed
// with 17 significant digits so identical configs give byte-identical output.
//
// Exit status: 0 success, 1 config error, 2 domain infeasibility,
// 3 numerical failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "povmprep/povmprep.hpp"

using json = nlohmann::ordered_json;
using namespace povmprep;

namespace {

// ---------------------------------------------------------------------------
// formatting

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt(const Complex& z) {
    return "[" + fmt(z.real()) + "," + fmt(z.imag()) + "]";
}

std::string fmt_vec(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt(v[i]);
    }
    return s + "]";
}

std::string fmt_angles(const std::vector<EulerAngles>& a) {
    std::string s = "[";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += "{\"theta\":" + fmt(a[i].theta) + ",\"phi\":" + fmt(a[i].phi) + "}";
    }
    return s + "]";
}

std::string json_quote(const std::string& s) {
    return json(s).dump();
}

std::string fmt_strings(const std::vector<std::string>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += json_quote(v[i]);
    }
    return s + "]";
}

std::string fmt_matrix(const RealMatN& m) {
    std::string s = "[";
    for (int i = 0; i < m.size(); ++i) {
        if (i) s += ",";
        s += "[";
        for (int j = 0; j < m.size(); ++j) {
            if (j) s += ",";
            s += fmt(m(i, j));
        }
        s += "]";
    }
    return s + "]";
}

// key/value accumulator for the records section of the envelope; values are
// pre-serialized JSON fragments
class Records {
public:
    void add(const std::string& key, const std::string& raw_json) {
        if (!body_.empty()) body_ += ",";
        body_ += json_quote(key) + ":" + raw_json;
    }
    void add_num(const std::string& key, double v) { add(key, fmt(v)); }
    void add_str(const std::string& key, const std::string& v) {
        add(key, json_quote(v));
    }
    void add_bool(const std::string& key, bool v) {
        add(key, v ? "true" : "false");
    }
    std::string str() const { return "{" + body_ + "}"; }

private:
    std::string body_;
};

std::string envelope(const json& config, const Records& records,
                     const std::vector<std::string>& diagnostics) {
    return "{\"config\":" + config.dump() + ",\"records\":" + records.str() +
           ",\"diagnostics\":" + fmt_strings(diagnostics) + "}\n";
}

// ---------------------------------------------------------------------------
// config access with unknown-field rejection

void require_object(const json& j, const std::string& where) {
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
}

void reject_unknown(const json& j, const std::string& where,
                    const std::vector<std::string>& allowed) {
    require_object(j, where);
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw ConfigError(where + ": unknown field \"" + key + "\"");
    }
}

const json& require_field(const json& j, const std::string& where,
                          const std::string& key) {
    if (!j.contains(key))
        throw ConfigError(where + ": missing field \"" + key + "\"");
    return j.at(key);
}

double get_number(const json& j, const std::string& where) {
    if (!j.is_number())
        throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

double get_field_number(const json& j, const std::string& where,
                        const std::string& key) {
    return get_number(require_field(j, where, key), where + "." + key);
}

int get_field_int(const json& j, const std::string& where,
                  const std::string& key) {
    const json& f = require_field(j, where, key);
    if (!f.is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    return f.get<int>();
}

std::string get_field_string(const json& j, const std::string& where,
                             const std::string& key) {
    const json& f = require_field(j, where, key);
    if (!f.is_string())
        throw ConfigError(where + "." + key + ": expected a string");
    return f.get<std::string>();
}

// angle in units of pi -> radians, validated into [0, pi] x wrap for phi
EulerAngles get_angle_pair(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(where + ": expected [theta, phi] in units of pi");
    const double theta = get_number(j.at(0), where + ".theta") * kPi;
    const double phi = get_number(j.at(1), where + ".phi") * kPi;
    try {
        return EulerAngles(theta, phi);
    } catch (const InvalidAngle& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::vector<EulerAngles> get_angle_list(const json& j, const std::string& where) {
    if (!j.is_array())
        throw ConfigError(where + ": expected a list of [theta, phi] pairs");
    std::vector<EulerAngles> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(
            get_angle_pair(j.at(i), where + "[" + std::to_string(i) + "]"));
    return out;
}

// psi block: "trine" or an explicit angle list
std::vector<EulerAngles> get_psi_angles(const json& j, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() == "trine") return trine_psi_angles();
        throw ConfigError(where + ": the only named psi subset is \"trine\"");
    }
    return get_angle_list(j, where);
}

ArcsinBranch get_branch(const json& j, const std::string& where) {
    if (!j.is_string())
        throw ConfigError(where + ": expected \"acute\" or \"obtuse\"");
    const std::string s = j.get<std::string>();
    if (s == "acute") return ArcsinBranch::Acute;
    if (s == "obtuse") return ArcsinBranch::Obtuse;
    throw ConfigError(where + ": expected \"acute\" or \"obtuse\"");
}

// ---------------------------------------------------------------------------
// angle-source block: explicit phi list or a generating family

struct AngleSource {
    std::vector<EulerAngles> phi_angles;
    std::vector<std::string> diagnostics;
    bool unphysical = false;
};

AngleSource resolve_angles(const json& j, const std::string& where) {
    require_object(j, where);
    const std::string cs = get_field_string(j, where, "case");
    AngleSource out;
    GeneratedSetting g;
    if (cs == "explicit") {
        reject_unknown(j, where, {"case", "phi"});
        out.phi_angles = get_angle_list(require_field(j, where, "phi"),
                                        where + ".phi");
        return out;
    }
    if (cs == "case1") {
        reject_unknown(j, where,
                       {"case", "theta_b1", "theta_b2", "k", "l",
                        "phi_b3_gauge", "theta3_branch"});
        Case1Params p{get_field_number(j, where, "theta_b1") * kPi,
                      get_field_number(j, where, "theta_b2") * kPi};
        if (j.contains("k")) p.k = get_field_int(j, where, "k");
        if (j.contains("l")) p.l = get_field_int(j, where, "l");
        if (j.contains("phi_b3_gauge"))
            p.phi_b3_gauge = get_field_number(j, where, "phi_b3_gauge") * kPi;
        if (j.contains("theta3_branch"))
            p.theta3_branch =
                get_branch(j.at("theta3_branch"), where + ".theta3_branch");
        g = generate_case1(p);
    } else if (cs == "case2") {
        reject_unknown(j, where, {"case", "theta_b1", "k", "branch"});
        Case2Params p{get_field_number(j, where, "theta_b1") * kPi};
        if (j.contains("k")) p.k = get_field_int(j, where, "k");
        if (j.contains("branch")) {
            const std::string b = get_field_string(j, where, "branch");
            if (b == "same")
                p.branch = Case2Branch::Same;
            else if (b == "mirror")
                p.branch = Case2Branch::Mirror;
            else
                throw ConfigError(where +
                                  ".branch: expected \"same\" or \"mirror\"");
        }
        g = generate_case2(p);
    } else if (cs == "case3") {
        reject_unknown(j, where,
                       {"case", "theta_b1", "delta12", "delta13", "branch2",
                        "branch3"});
        const Case3Params p{get_field_number(j, where, "theta_b1") * kPi,
                            get_field_number(j, where, "delta12") * kPi,
                            get_field_number(j, where, "delta13") * kPi};
        const auto sols = generate_case3(p);
        std::optional<ArcsinBranch> want2, want3;
        if (j.contains("branch2"))
            want2 = get_branch(j.at("branch2"), where + ".branch2");
        if (j.contains("branch3"))
            want3 = get_branch(j.at("branch3"), where + ".branch3");
        const Case3Solution* pick = nullptr;
        for (const auto& s : sols) {
            if (want2 && s.branch2 != *want2) continue;
            if (want3 && s.branch3 != *want3) continue;
            pick = &s;
            break;
        }
        if (!pick)
            throw OutOfWindow(
                "case3: requested branch pair fails the Gram condition");
        g.phi_angles = pick->phi_angles;
    } else if (cs == "equal_overlap_case1") {
        reject_unknown(j, where, {"case", "theta_b3", "variant"});
        const std::string v = get_field_string(j, where, "variant");
        EqualOverlapVariant var;
        if (v == "kl11_qr01")
            var = EqualOverlapVariant::KL11_QR01;
        else if (v == "kl11_qr10")
            var = EqualOverlapVariant::KL11_QR10;
        else if (v == "kl10_qr01")
            var = EqualOverlapVariant::KL10_QR01;
        else if (v == "kl10_qr10")
            var = EqualOverlapVariant::KL10_QR10;
        else
            throw ConfigError(where + ".variant: unknown variant \"" + v +
                              "\"");
        g = equal_overlap_case1_family(
            get_field_number(j, where, "theta_b3") * kPi, var);
    } else if (cs == "equal_overlap_case2") {
        reject_unknown(j, where, {"case", "k", "branch"});
        Case2Branch branch = Case2Branch::Same;
        if (j.contains("branch")) {
            const std::string b = get_field_string(j, where, "branch");
            if (b == "same")
                branch = Case2Branch::Same;
            else if (b == "mirror")
                branch = Case2Branch::Mirror;
            else
                throw ConfigError(where +
                                  ".branch: expected \"same\" or \"mirror\"");
        }
        g = equal_overlap_case2_family(get_field_int(j, where, "k"), branch);
    } else {
        throw ConfigError(where + ".case: unknown case \"" + cs + "\"");
    }
    out.phi_angles = g.phi_angles;
    out.diagnostics = g.warnings;
    out.unphysical = g.unphysical;
    if (g.unphysical) out.diagnostics.push_back("Unphysical");
    return out;
}

// ---------------------------------------------------------------------------
// shared option handling

struct Output {
    std::string format = "json";  // csv | json
    std::string path;             // empty = stdout
};

void emit(const Output& out, const std::string& text) {
    if (out.path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out.path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + out.path);
    f << text;
}

unsigned thread_count() {
    const char* env = std::getenv("POVM_PREP_THREADS");
    if (!env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
        throw ConfigError("POVM_PREP_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
}

// ---------------------------------------------------------------------------
// commands

int cmd_validate(const json& cfg, const Output& out) {
    reject_unknown(cfg, "config", {"command", "n_outcomes", "psi", "phi"});
    const auto psi_ang =
        get_psi_angles(require_field(cfg, "config", "psi"), "config.psi");
    const auto phi_ang =
        get_angle_list(require_field(cfg, "config", "phi"), "config.phi");
    if (psi_ang.size() != phi_ang.size())
        throw ConfigError("config: psi and phi must have the same length");
    const int n = static_cast<int>(psi_ang.size());
    if (cfg.contains("n_outcomes") &&
        get_field_int(cfg, "config", "n_outcomes") != n)
        throw ConfigError("config.n_outcomes: does not match the angle lists");

    std::vector<PsiVector> psi;
    std::vector<PhiVector> phi;
    std::vector<std::string> norms_psi, norms_phi;
    for (int m = 0; m < n; ++m) {
        psi.push_back(psi_from_angles(psi_ang[m], n));
        phi.push_back(phi_from_angles(phi_ang[m]));
        norms_psi.push_back(fmt(psi.back().v.norm2()));
        norms_phi.push_back(fmt(phi.back().v.norm2()));
    }
    const double res = resolution_residual(psi);
    const double gram = gram_diagonality_residual(phi);

    Records rec;
    rec.add_num("resolution_residual", res);
    rec.add_num("gram_residual", gram);
    rec.add_bool("resolves_identity", res < 1e-10);
    rec.add_bool("gram_diagonal", gram < 1e-10);
    rec.add("psi_norm2", "[" + [&] {
                std::string s;
                for (std::size_t i = 0; i < norms_psi.size(); ++i) {
                    if (i) s += ",";
                    s += norms_psi[i];
                }
                return s;
            }() + "]");
    rec.add("phi_norm2", "[" + [&] {
                std::string s;
                for (std::size_t i = 0; i < norms_phi.size(); ++i) {
                    if (i) s += ",";
                    s += norms_phi[i];
                }
                return s;
            }() + "]");

    std::vector<std::string> diags;
    if (res >= 1e-10)
        diags.push_back("InvalidSet: effects do not resolve the identity");
    emit(out, envelope(cfg, rec, diags));
    return res < 1e-10 ? 0 : 2;
}

int cmd_prepare(const json& cfg, const Output& out) {
    reject_unknown(cfg, "config",
                   {"command", "n_outcomes", "psi", "phi", "temperature"});
    const auto psi_ang =
        get_psi_angles(require_field(cfg, "config", "psi"), "config.psi");
    const auto phi_ang =
        get_angle_list(require_field(cfg, "config", "phi"), "config.phi");
    const double kT = get_field_number(cfg, "config", "temperature");
    if (kT < 0.0)
        throw ConfigError("config.temperature: must be >= 0");

    const MeasurementSet set = MeasurementSet::from_angles(psi_ang, phi_ang);
    const ThermalParams t = ThermalParams::from_kT(kT);
    const PreparedState st = reduced_density(set, t);

    Records rec;
    rec.add("omega", fmt_vec(st.probabilities));
    rec.add("rho",
            "[[" + fmt(st.rho(0, 0)) + "," + fmt(st.rho(0, 1)) + "],[" +
                fmt(st.rho(1, 0)) + "," + fmt(st.rho(1, 1)) + "]]");
    rec.add_num("purity", state_purity(st.rho));
    rec.add("coherence", fmt(st.coherence));
    rec.add_num("coherence_abs", std::abs(st.coherence));
    rec.add_num("gram_residual", gram_diagonality_residual(set));
    emit(out, envelope(cfg, rec, {}));
    return 0;
}

std::vector<double> sweep_grid_from_config(const json& cfg) {
    if (!cfg.contains("temperature")) return default_sweep_grid();
    const json& t = cfg.at("temperature");
    reject_unknown(t, "config.temperature", {"min", "max", "points"});
    const double lo = get_field_number(t, "config.temperature", "min");
    const double hi = get_field_number(t, "config.temperature", "max");
    const int pts = get_field_int(t, "config.temperature", "points");
    if (lo < 0.0 || hi <= lo || pts < 2)
        throw ConfigError(
            "config.temperature: need 0 <= min < max and points >= 2");
    std::vector<double> g(pts);
    for (int i = 0; i < pts; ++i)
        g[i] = lo + (hi - lo) * i / (pts - 1);
    return g;
}

int cmd_sweep(const json& cfg, const Output& out) {
    reject_unknown(cfg, "config",
                   {"command", "angles", "t_star", "temperature"});
    const AngleSource src =
        resolve_angles(require_field(cfg, "config", "angles"), "config.angles");

    const json& ts = require_field(cfg, "config", "t_star");
    double t_star;
    if (ts.is_string()) {
        if (ts.get<std::string>() != "max")
            throw ConfigError(
                "config.t_star: expected a number or the string \"max\"");
        const ExtremalSolution e = extremal_probabilities(
            OverlapMatrix::from_angles(src.phi_angles));
        if (!e.feasible)
            throw Unattainable(
                "t_star \"max\": extremal probabilities leave the simplex");
        t_star = max_self_consistent_kT(e.omega_ext, 3);
        if (std::isinf(t_star))
            throw Unattainable(
                "t_star \"max\": the self-consistency condition never fails "
                "(all omega = 1/3); pick a finite t_star");
    } else {
        t_star = get_number(ts, "config.t_star");
        if (t_star < 0.0) throw ConfigError("config.t_star: must be >= 0");
    }

    const SweepResult r =
        temperature_sweep(src.phi_angles, ThermalParams::from_kT(t_star),
                          sweep_grid_from_config(cfg), thread_count());

    if (out.format == "csv") {
        std::string text = "kT_over_omega0,purity,p_min,coherence_abs,is_minimum\n";
        for (std::size_t i = 0; i < r.records.size(); ++i) {
            const SweepRecord& row = r.records[i];
            text += fmt(row.kT_over_omega0) + "," + fmt(row.purity) + "," +
                    fmt(r.p_min) + "," + fmt(row.coherence_abs) + "," +
                    (i == r.minimum_index ? "1" : "0") + "\n";
        }
        emit(out, text);
        return 0;
    }

    Records rec;
    rec.add_num("t_star", t_star);
    rec.add_num("p_min", r.p_min);
    rec.add("omega_ext", fmt_vec(r.omega_ext));
    rec.add("theta_a", fmt_vec(r.theta_a));
    rec.add("phi_angles", fmt_angles(src.phi_angles));
    std::string rows = "[";
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        if (i) rows += ",";
        const SweepRecord& row = r.records[i];
        rows += "{\"kT_over_omega0\":" + fmt(row.kT_over_omega0) +
                ",\"purity\":" + fmt(row.purity) + ",\"p_min\":" +
                fmt(r.p_min) + ",\"coherence_abs\":" + fmt(row.coherence_abs) +
                ",\"is_minimum\":" + (i == r.minimum_index ? "true" : "false") +
                "}";
    }
    rows += "]";
    rec.add("rows", rows);
    emit(out, envelope(cfg, rec, src.diagnostics));
    return 0;
}

int cmd_generate(const json& cfg, const Output& out) {
    reject_unknown(cfg, "config", {"command", "angles", "t_star"});
    const AngleSource src =
        resolve_angles(require_field(cfg, "config", "angles"), "config.angles");
    std::vector<std::string> diags = src.diagnostics;

    Records rec;
    rec.add("phi_angles", fmt_angles(src.phi_angles));
    rec.add_num("gram_residual", gram_diagonality_residual(src.phi_angles));
    rec.add_bool("unphysical", src.unphysical);

    const OverlapMatrix c = OverlapMatrix::from_angles(src.phi_angles);
    rec.add("overlap_matrix", fmt_matrix(c.c2));
    const ExtremalSolution e = extremal_probabilities(c);
    rec.add_bool("extremum_feasible", e.feasible);
    if (e.reason != ExtremalStatus::SingularOverlap) {
        rec.add("omega_ext", fmt_vec(e.omega_ext));
        rec.add_num("p_min", e.p_min);
    } else {
        diags.push_back("SingularOverlap: overlap matrix is not invertible");
    }

    // completing psi subset at t_star (default 0): polar angles from the
    // self-consistency condition, azimuths from triangle closure
    if (e.feasible) {
        const double kT = cfg.contains("t_star")
                              ? get_field_number(cfg, "config", "t_star")
                              : 0.0;
        if (kT < 0.0) throw ConfigError("config.t_star: must be >= 0");
        try {
            const ThermalParams t = ThermalParams::from_kT(kT);
            std::vector<double> theta_a(3);
            for (int m = 0; m < 3; ++m)
                theta_a[m] = self_consistent_theta_a(e.omega_ext[m], t, 3);
            const auto psi_ang = complete_psi_angles(theta_a);
            std::vector<PsiVector> psi;
            for (const auto& a : psi_ang) psi.push_back(psi_from_angles(a, 3));
            rec.add("psi_angles", fmt_angles(psi_ang));
            rec.add_num("resolution_residual", resolution_residual(psi));
        } catch (const Unattainable& ex) {
            diags.push_back(std::string("Unattainable: ") + ex.what());
        } catch (const InvalidSet& ex) {
            diags.push_back(std::string("InvalidSet: ") + ex.what());
        }
    }

    emit(out, envelope(cfg, rec, diags));
    return 0;
}

int cmd_repeat(const json& cfg, const Output& out) {
    reject_unknown(cfg, "config", {"command", "first", "primed"});
    const json& first = require_field(cfg, "config", "first");
    reject_unknown(first, "config.first", {"psi", "phi", "temperature"});
    const auto psi_ang = get_psi_angles(
        require_field(first, "config.first", "psi"), "config.first.psi");
    const auto phi_ang = get_angle_list(
        require_field(first, "config.first", "phi"), "config.first.phi");
    const double kT = get_field_number(first, "config.first", "temperature");
    if (kT < 0.0) throw ConfigError("config.first.temperature: must be >= 0");

    const MeasurementSet set = MeasurementSet::from_angles(psi_ang, phi_ang);
    const PreparedState st = reduced_density(set, ThermalParams::from_kT(kT));

    const json& primed = require_field(cfg, "config", "primed");
    require_object(primed, "config.primed");
    const std::string mode = get_field_string(primed, "config.primed", "mode");

    std::vector<PhiVector> primed_phi;
    std::vector<Vec2> primed_psi;
    std::vector<std::string> diags;
    bool same_phi = false;
    if (mode == "srm") {
        reject_unknown(primed, "config.primed", {"mode", "phi"});
        std::vector<EulerAngles> pa = phi_ang;
        if (primed.contains("phi"))
            pa = get_angle_list(primed.at("phi"), "config.primed.phi");
        same_phi = true;
        for (std::size_t i = 0; i < pa.size() && same_phi; ++i)
            same_phi = std::abs(pa[i].theta - phi_ang[i].theta) < 1e-15 &&
                       std::abs(pa[i].phi - phi_ang[i].phi) < 1e-15;
        for (const auto& a : pa) primed_phi.push_back(phi_from_angles(a));
        if (primed_phi.size() != phi_ang.size())
            throw ConfigError("config.primed.phi: length mismatch");
        const SrmVectors srm = srm_vectors(st, primed_phi);
        primed_psi = srm.vectors;
        if (srm.rank_deficient) diags.push_back("RankDeficient");
    } else if (mode == "explicit") {
        reject_unknown(primed, "config.primed", {"mode", "psi", "phi"});
        const auto pp = get_angle_list(
            require_field(primed, "config.primed", "psi"), "config.primed.psi");
        const auto pf = get_angle_list(
            require_field(primed, "config.primed", "phi"), "config.primed.phi");
        if (pp.size() != phi_ang.size() || pf.size() != phi_ang.size())
            throw ConfigError("config.primed: length mismatch");
        for (const auto& a : pf) primed_phi.push_back(phi_from_angles(a));
        for (const auto& a : pp) primed_psi.push_back(phi_from_angles(a).v);
    } else {
        throw ConfigError(
            "config.primed.mode: expected \"srm\" or \"explicit\"");
    }

    const TransferMatrix d = transfer_matrix(primed_psi, set.phi());
    const std::vector<double> wt = updated_probabilities(d, st.probabilities);
    const double p_first = state_purity(st.rho);
    const double p_second = second_purity(primed_phi, wt);
    const double r = squared_error_r(st, primed_phi, primed_psi);

    Records rec;
    rec.add("omega", fmt_vec(st.probabilities));
    rec.add("omega_tilde", fmt_vec(wt));
    rec.add_num("purity_first", p_first);
    rec.add_num("purity_second", p_second);
    rec.add_num("squared_error", r);
    rec.add("transfer_matrix", fmt_matrix(d.d2));

    if (mode == "srm" && same_phi && std::abs(p_second - p_first) < 1e-12)
        diags.push_back(
            "NoPurityChange: repeating the measurement leaves the purity "
            "unchanged");

    try {
        const std::vector<bool> shift = extremum_shift_check(
            OverlapMatrix::from_phi(set.phi()),
            OverlapMatrix::from_phi(primed_phi), d);
        std::string verdicts = "[";
        bool any = false;
        for (std::size_t i = 0; i < shift.size(); ++i) {
            if (i) verdicts += ",";
            verdicts += shift[i] ? "true" : "false";
            if (shift[i]) any = true;
        }
        rec.add("extremum_shift", verdicts + "]");
        rec.add_bool("extremum_shifted", any);
    } catch (const SingularOverlap& ex) {
        diags.push_back(std::string("SingularOverlap: ") + ex.what());
    }

    emit(out, envelope(cfg, rec, diags));
    return 0;
}

int cmd_oracle(const json& cfg, const Output& out) {
    reject_unknown(cfg, "config", {"command", "overlap", "oracle_grid_step"});
    const json& ov = require_field(cfg, "config", "overlap");
    require_object(ov, "config.overlap");
    const std::string source = get_field_string(ov, "config.overlap", "source");

    OverlapMatrix c{0, RealMatN(1)};
    if (source == "angles") {
        reject_unknown(ov, "config.overlap", {"source", "phi"});
        const auto phi = get_angle_list(
            require_field(ov, "config.overlap", "phi"), "config.overlap.phi");
        c = OverlapMatrix::from_angles(phi);
    } else if (source == "matrix") {
        reject_unknown(ov, "config.overlap", {"source", "values"});
        const json& v = require_field(ov, "config.overlap", "values");
        if (!v.is_array() || v.empty() || v.size() > 4)
            throw ConfigError(
                "config.overlap.values: expected an n x n array, n in [1, 4]");
        const int n = static_cast<int>(v.size());
        RealMatN m(n);
        for (int i = 0; i < n; ++i) {
            const json& row = v.at(i);
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw ConfigError("config.overlap.values: ragged matrix");
            for (int jx = 0; jx < n; ++jx)
                m(i, jx) = get_number(row.at(jx), "config.overlap.values");
        }
        c = OverlapMatrix{n, m};
    } else {
        throw ConfigError(
            "config.overlap.source: expected \"angles\" or \"matrix\"");
    }

    double step = 1e-3;
    if (cfg.contains("oracle_grid_step"))
        step = get_field_number(cfg, "config", "oracle_grid_step");
    if (!(step > 0.0 && step <= 0.1))
        throw ConfigError("config.oracle_grid_step: must be in (0, 0.1]");

    const BruteForceResult b = brute_force_min(c, step);
    const ExtremalSolution e = extremal_probabilities(c);

    Records rec;
    rec.add("grid_minimizer", fmt_vec(b.omega));
    rec.add_num("grid_minimum", b.p);
    rec.add_bool("extremum_feasible", e.feasible);
    std::vector<std::string> diags;
    if (e.reason == ExtremalStatus::SingularOverlap) {
        diags.push_back("SingularOverlap: overlap matrix is not invertible");
    } else {
        rec.add("omega_ext", fmt_vec(e.omega_ext));
        rec.add_num("p_min", e.p_min);
        rec.add_num("value_delta", std::abs(b.p - e.p_min));
        double wd = 0.0;
        for (std::size_t i = 0; i < b.omega.size(); ++i)
            wd = std::max(wd, std::abs(b.omega[i] - e.omega_ext[i]));
        rec.add_num("omega_delta", wd);
        if (!e.feasible)
            diags.push_back(
                "OmegaOutOfRange: no global minimum on the simplex interior; "
                "grid minimizer sits on the boundary");
    }
    emit(out, envelope(cfg, rec, diags));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qubit state preparation by nonselective measurements"};
    app.require_subcommand(1);

    std::string config_path;
    Output out;
    std::vector<std::string> names = {"validate", "prepare",  "sweep",
                                      "generate", "repeat", "oracle"};
    for (const auto& n : names) {
        CLI::App* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "config JSON path, - for stdin")
            ->required();
        sub->add_option("--out", out.path, "output file (default stdout)");
        sub->add_option("--format", out.format, "csv | json")
            ->check(CLI::IsMember({"csv", "json"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        std::string text;
        if (config_path == "-") {
            std::ostringstream ss;
            ss << std::cin.rdbuf();
            text = ss.str();
        } else {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("cannot read config: " + config_path);
            std::ostringstream ss;
            ss << f.rdbuf();
            text = ss.str();
        }

        json cfg;
        try {
            cfg = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") +
                              e.what());
        }
        require_object(cfg, "config");
        if (cfg.contains("command")) {
            const std::string declared =
                get_field_string(cfg, "config", "command");
            if (declared != cmd)
                throw ConfigError("config.command \"" + declared +
                                  "\" does not match the subcommand \"" + cmd +
                                  "\"");
        }
        if (out.format == "csv" && cmd != "sweep")
            throw ConfigError("--format csv is only supported for sweep");

        if (cmd == "validate") return cmd_validate(cfg, out);
        if (cmd == "prepare") return cmd_prepare(cfg, out);
        if (cmd == "sweep") return cmd_sweep(cfg, out);
        if (cmd == "generate") return cmd_generate(cfg, out);
        if (cmd == "repeat") return cmd_repeat(cfg, out);
        return cmd_oracle(cfg, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Unattainable& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const OutOfWindow& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const InvalidSet& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const InvalidAngle& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const GramNotDiagonal& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const NotOnSimplex& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
