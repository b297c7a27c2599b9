#include "commands.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "artifacts.hpp"
#include "rotbec/analysis.hpp"
#include "rotbec/error.hpp"
#include "rotbec/minimizer.hpp"
#include "rotbec/snapshot.hpp"
#include "rotbec/spectrum.hpp"

#ifndef ROTBEC_VERSION
#define ROTBEC_VERSION "0.0.0"
#endif

namespace rotbec::cli {
namespace {

const char* const kSweepColumns =
    "a,a_over_astar,omega,potential_tag,n,L,eps_a,x_a_x,x_a_y,mu,total,kinetic,potential,interaction,rotation,"
    "covariant_kinetic,veff,residual,steps,converged\n";

json townes_record(const TownesConstants& c) {
  return {{"a_star", c.a_star}, {"grad_sq", c.grad_sq}, {"m4", c.m4}, {"m2", c.m2}, {"w0", c.w0}};
}

// Trap record for the manifest. lambda and gamma are null where the blow-up
// analysis does not apply (for instance omega >= omega*).
json trap_record(const EffectivePotential& eff) {
  const ExtendedReal ws = eff.omega_star();
  json rec = {{"tag", eff.spec().tag()},
              {"omega", eff.omega()},
              {"omega_star", ws.infinite ? json("inf") : json(ws.value)},
              {"concentration_point", {eff.concentration_point().x, eff.concentration_point().y}},
              {"lambda", nullptr},
              {"gamma", nullptr},
              {"y0", nullptr}};
  try {
    const BlowupConstants bc = blowup_constants(eff);
    rec["lambda"] = bc.lambda;
    rec["gamma"] = bc.gamma;
    rec["y0"] = {bc.y0.x, bc.y0.y};
  } catch (const Error& e) {
    rec["blowup_unavailable"] = e.what();
  }
  return rec;
}

class Run {
 public:
  Run(const RunConfig& cfg, std::ostream& log)
      : cfg_(cfg), log_(log), writer_(cfg.output), townes_(default_townes()) {
    manifest_["tool"] = "rotbec";
    manifest_["version"] = ROTBEC_VERSION;
    manifest_["config"] = to_json(cfg);
    manifest_["townes"] = townes_record(townes_.constants);
  }

  int dispatch(std::ostream& out) {
    int status = kExitOk;
    if (cfg_.command == "townes") {
      status = townes();
    } else if (cfg_.command == "spectrum") {
      status = spectrum();
    } else if (cfg_.command == "trial-scan") {
      status = trial_scan();
    } else {
      status = sweep();
    }
    manifest_["status"] = status;
    manifest_["artifacts"] = writer_.written();
    writer_.write("manifest.json", manifest_.dump(2) + "\n");
    out << summary_.dump(2) << "\n";
    return status;
  }

 private:
  EffectivePotential effective() const { return {parse_potential(cfg_.potential), cfg_.omega}; }

  MinimizeConfig minimize_config() const {
    MinimizeConfig m;
    m.n = cfg_.n;
    m.half_width = cfg_.half_width;
    m.dt = cfg_.dt;
    m.dt_max = std::max(1.0, cfg_.dt);
    m.tol = cfg_.tol;
    m.max_steps = cfg_.max_steps;
    m.residual_tol = cfg_.residual_tol;
    m.mode = cfg_.strict ? AccuracyMode::strict : AccuracyMode::lenient;
    m.unsafe = cfg_.unsafe;
    m.init.kind = cfg_.init == "vortex" ? InitKind::vortex : cfg_.init == "random" ? InitKind::random : InitKind::gaussian;
    m.init.seed = cfg_.seed;
    return m;
  }

  int townes() {
    const TownesConstants& c = townes_.constants;
    std::ostringstream profile;
    write_profile(profile, townes_.profile);
    writer_.write("townes_profile.txt", profile.str());
    summary_ = townes_record(c);
    summary_["ode_residual"] = max_ode_residual(townes_.profile);
    summary_["invariants_hold"] = profile_invariants_hold(townes_.profile);
    summary_["lambda_harmonic"] = std::pow(c.m2, 0.25);
    manifest_["summary"] = summary_;
    return kExitOk;
  }

  int spectrum() {
    const LinearOp op = cfg_.op == "L" ? LinearOp::L : LinearOp::L_hat;
    const SpectrumReport rep =
        linearized_spectrum(townes_.profile, op, cfg_.sector, cfg_.count, cfg_.spectrum_h, cfg_.spectrum_r_max);
    std::string csv = "index,eigenvalue,residual\n";
    for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
      csv += std::to_string(k) + "," + num15(rep.eigenvalues[k]) + "," + num15(rep.residuals[k]) + "\n";
    }
    writer_.write("spectrum.csv", csv);
    std::string modes = "r";
    for (std::size_t k = 0; k < rep.modes.size(); ++k) modes += ",mode_" + std::to_string(k);
    modes += "\n";
    for (std::size_t j = 0; j < rep.r.size(); ++j) {
      modes += num15(rep.r[j]);
      for (const auto& m : rep.modes) modes += "," + num15(m[j]);
      modes += "\n";
    }
    writer_.write("spectrum_modes.csv", modes);
    summary_ = {{"operator", cfg_.op},
                {"sector", cfg_.sector},
                {"eigenvalues", rep.eigenvalues},
                {"residuals", rep.residuals},
                {"profile_cosine", rep.profile_cosine}};
    manifest_["summary"] = summary_;
    return kExitOk;
  }

  int trial_scan() {
    const EffectivePotential eff = effective();
    manifest_["trap"] = trap_record(eff);
    const double a_star = townes_.constants.a_star;
    const double a = resolve_strengths(cfg_, a_star).front();
    // The trial family is the sanctioned probe of the nonexistence regime, so
    // no gate applies here.
    const GpProblem prob = make_problem(a, eff, 1.0);
    const TrialScan scan = trial_energy_scan(prob, cfg_.tau, {cfg_.x0_x, cfg_.x0_y}, {cfg_.trial_n, cfg_.box_factor});
    std::string csv = "tau,tau_sq,energy\n";
    for (const TrialRow& r : scan.rows) csv += num15(r.tau) + "," + num15(r.tau * r.tau) + "," + num15(r.energy) + "\n";
    writer_.write("trial_scan.csv", csv);
    const auto& c = townes_.constants;
    summary_ = {{"a", a},
                {"a_over_astar", a / a_star},
                {"omega", cfg_.omega},
                {"x0", {cfg_.x0_x, cfg_.x0_y}},
                {"slope", scan.slope},
                {"reference_slope", (1.0 - a / a_star) * c.m4 / (2.0 * a_star)},
                {"min_energy", scan.min_energy}};
    manifest_["summary"] = summary_;
    return kExitOk;
  }

  // Key of everything that changes the numbers of a sweep point. Output
  // location, worker count and the analysis flag are deliberately absent.
  std::string sweep_hash(const std::vector<double>& strengths, bool multistart) const {
    json key = to_json(cfg_);
    for (const char* k : {"command", "output", "workers", "analyze", "trial_scan", "spectrum"}) key.erase(k);
    key["problem"].erase("a_over_astar");
    key["problem"]["a"] = strengths;
    key["minimize"]["multistart"] = multistart;
    return hex64(fnv1a64(key.dump()));
  }

  static json result_record(const MinimizeResult& r) {
    const EnergyBreakdown& b = r.breakdown;
    return {{"kinetic", b.kinetic},
            {"potential", b.potential},
            {"interaction", b.interaction},
            {"rotation", b.rotation},
            {"total", b.total},
            {"covariant_kinetic", b.covariant_kinetic},
            {"veff", b.veff},
            {"quartic", b.quartic},
            {"mass", b.mass},
            {"boundary_mass", b.boundary_mass},
            {"boundary_warning", b.boundary_warning},
            {"mu", r.mu},
            {"residual", r.residual},
            {"eps_a", r.eps_a},
            {"x_a", {r.x_a.x, r.x_a.y}},
            {"steps", r.steps},
            {"converged", r.converged},
            {"final_dt", r.final_dt},
            {"rejected_steps", r.rejected_steps},
            {"mass_dt_reductions", r.mass_dt_reductions},
            {"max_mass_drift", r.max_mass_drift},
            {"trial_energy", r.trial_energy ? json(*r.trial_energy) : json(nullptr)},
            {"non_global", r.non_global}};
  }

  static MinimizeResult result_from(Field2D field, const json& j) {
    MinimizeResult r(std::move(field));
    EnergyBreakdown& b = r.breakdown;
    b.kinetic = j.at("kinetic");
    b.potential = j.at("potential");
    b.interaction = j.at("interaction");
    b.rotation = j.at("rotation");
    b.total = j.at("total");
    b.covariant_kinetic = j.at("covariant_kinetic");
    b.veff = j.at("veff");
    b.quartic = j.at("quartic");
    b.mass = j.at("mass");
    b.boundary_mass = j.at("boundary_mass");
    b.boundary_warning = j.at("boundary_warning");
    r.mu = j.at("mu");
    r.residual = j.at("residual");
    r.eps_a = j.at("eps_a");
    r.x_a = {j.at("x_a")[0].get<double>(), j.at("x_a")[1].get<double>()};
    r.steps = j.at("steps");
    r.converged = j.at("converged");
    r.final_dt = j.at("final_dt");
    r.rejected_steps = j.at("rejected_steps");
    r.mass_dt_reductions = j.at("mass_dt_reductions");
    r.max_mass_drift = j.at("max_mass_drift");
    if (!j.at("trial_energy").is_null()) r.trial_energy = j.at("trial_energy").get<double>();
    r.non_global = j.at("non_global");
    return r;
  }

  std::string csv_row(const SweepPoint& p, const EffectivePotential& eff) const {
    const MinimizeResult& r = p.result;
    const EnergyBreakdown& b = r.breakdown;
    const double a_star = townes_.constants.a_star;
    std::string row;
    for (double v : {p.a, p.a / a_star, eff.omega()}) row += num15(v) + ",";
    row += eff.spec().tag() + "," + std::to_string(r.field.grid().n()) + ",";
    for (double v : {r.field.grid().half_width(), r.eps_a, r.x_a.x, r.x_a.y, r.mu, b.total, b.kinetic, b.potential,
                     b.interaction, b.rotation, b.covariant_kinetic, b.veff, r.residual}) {
      row += num15(v) + ",";
    }
    row += std::to_string(r.steps) + "," + (r.converged ? "1" : "0") + "\n";
    return row;
  }

  int sweep() {
    const EffectivePotential eff = effective();
    manifest_["trap"] = trap_record(eff);
    const double a_star = townes_.constants.a_star;
    const std::vector<double> strengths = resolve_strengths(cfg_, a_star);
    const bool loading_only = cfg_.command == "analyze";
    const bool multistart = cfg_.command != "minimize" && cfg_.multistart;

    SweepConfig sc;
    sc.minimize = minimize_config();
    sc.seed = cfg_.seed;
    sc.workers = cfg_.workers;
    sc.multistart = multistart;
    sc.solve_scale = cfg_.solve_scale;

    // Refuse before any work; the library would refuse at the first point.
    for (double a : strengths) require_existence_regime(make_problem(a, eff, cfg_.solve_scale), cfg_.unsafe);

    const std::string hash = sweep_hash(strengths, multistart);
    manifest_["config_hash"] = hash;
    auto stem = [&](std::size_t i) { return "snap-" + hash + "-" + std::to_string(i); };

    int resumed = 0;
    SweepHooks hooks;
    hooks.load = [&](std::size_t i, const GpProblem&) -> std::optional<MinimizeResult> {
      const std::string s = stem(i);
      if (!writer_.exists(s + ".json") || !writer_.exists(s + ".rbec")) {
        if (loading_only) throw ConfigError("analyze: no stored result for point " + std::to_string(i) + " (" + s + ")");
        return std::nullopt;
      }
      ++resumed;
      log_ << "point " << i << ": loaded " << s << "\n";
      Snapshot snap = read_snapshot(writer_.path(s + ".rbec"));
      return result_from(std::move(snap.field), json::parse(read_file(writer_.path(s + ".json"))));
    };
    hooks.store = [&](std::size_t i, const SweepPoint& p) {
      const std::string s = stem(i);
      writer_.write(s + ".rbec", encode_snapshot(p.result.field, p.a, eff));
      // The record is written last: its presence marks the point complete.
      writer_.write(s + ".json", result_record(p.result).dump(1) + "\n");
      log_ << "point " << i << ": a/a*=" << p.a / a_star << " total=" << p.result.breakdown.total
           << " steps=" << p.result.steps << (p.result.converged ? "" : " (not converged)") << "\n";
    };

    const std::vector<SweepPoint> points = continuation_sweep(strengths, eff, sc, hooks);

    std::string csv = kSweepColumns;
    for (const auto& p : points) csv += csv_row(p, eff);
    writer_.write("sweep.csv", csv);

    json snaps = json::array();
    int unconverged = 0;
    bool disagreement = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string name = stem(i) + ".rbec";
      snaps.push_back({{"file", name}, {"fnv1a64", hex64(fnv1a64(read_file(writer_.path(name))))}});
      if (!points[i].result.converged) ++unconverged;
      disagreement = disagreement || points[i].multistart_disagreement;
    }
    manifest_["snapshots"] = snaps;
    summary_ = {{"points", points.size()},
                {"resumed", resumed},
                {"unconverged", unconverged},
                {"multistart_disagreement", disagreement},
                {"csv", "sweep.csv"}};
    if (!points.front().start_energies.empty()) summary_["start_energies"] = points.front().start_energies;

    if (cfg_.analyze || loading_only) summary_["analysis"] = analyze(points, eff);
    manifest_["summary"] = summary_;

    if (cfg_.strict && unconverged > 0) {
      log_ << "strict: " << unconverged << " point(s) did not converge\n";
      return kExitNumerical;
    }
    return kExitOk;
  }

  json analyze(const std::vector<SweepPoint>& points, const EffectivePotential& eff) {
    const double a_star = townes_.constants.a_star;
    json report;
    std::optional<BlowupConstants> bc;
    try {
      bc = blowup_constants(eff);
    } catch (const Error& e) {
      report["blowup_unavailable"] = e.what();
    }

    std::vector<ScalingPoint> energy, length;
    for (const auto& p : points) {
      if (p.a >= a_star) continue;
      energy.push_back({p.a, p.result.breakdown.total});
      length.push_back({p.a, p.result.eps_a});
    }
    auto fit_record = [&](std::span<const ScalingPoint> pts, ScalingMode mode) -> json {
      if (!bc) return nullptr;
      try {
        const ScalingFit f = fit_scaling(pts, mode, a_star, bc->gamma, bc->lambda);
        return {{"exponent", f.exponent},
                {"coefficient", f.coefficient},
                {"r_squared", f.r_squared},
                {"predicted_exponent", f.predicted_exponent},
                {"predicted_coefficient", f.predicted_coefficient}};
      } catch (const ConfigError& e) {
        return {{"unavailable", e.what()}};
      }
    };
    report["energy_fit"] = fit_record(energy, ScalingMode::energy);
    report["length_fit"] = fit_record(length, ScalingMode::epsilon);

    // Log-log plot data with the leading-order predictions alongside.
    std::string loglog = "a_over_astar,gap,log_gap,total,log_total,eps_a,log_eps_a,predicted_total,predicted_eps_a\n";
    for (const auto& p : points) {
      const double gap = a_star - p.a;
      if (!(gap > 0.0)) continue;
      double pred_e = NAN, pred_eps = NAN;
      if (bc) {
        const double g = bc->gamma;
        pred_e = (1.0 + 2.0 / g) * bc->lambda * bc->lambda / a_star * std::pow(gap, g / (g + 2.0));
        pred_eps = std::pow(gap, 1.0 / (g + 2.0)) / bc->lambda;
      }
      const double e = p.result.breakdown.total;
      loglog += num15(p.a / a_star) + "," + num15(gap) + "," + num15(std::log(gap)) + "," + num15(e) + "," +
                num15(e > 0 ? std::log(e) : NAN) + "," + num15(p.result.eps_a) + "," + num15(std::log(p.result.eps_a)) +
                "," + num15(pred_e) + "," + num15(pred_eps) + "\n";
    }
    writer_.write("loglog.csv", loglog);

    std::string obs =
        "a_over_astar,eps_a,theta_a,profile_sup_err,modulus_sup_err,realpart_sup_err,imag_l2,imag_h1,orthogonality,"
        "rescaled_l2,windings\n";
    json failures = json::array();
    for (const auto& p : points) {
      try {
        const BlowupObservables o = blowup_rescale(p.result, eff.omega(), townes_);
        obs += num15(p.a / a_star);
        for (double v : {o.eps_a, o.theta_a, o.profile_sup_err, o.modulus_sup_err, o.realpart_sup_err, o.imag_l2,
                         o.imag_h1, o.orthogonality, o.rescaled_l2}) {
          obs += "," + num15(v);
        }
        obs += "," + std::to_string(o.windings.size()) + "\n";
      } catch (const Error& e) {
        failures.push_back({{"a_over_astar", p.a / a_star}, {"error", e.what()}});
      }
    }
    writer_.write("observables.csv", obs);
    report["rescale_failures"] = failures;

    const MuLimitReport mu = mu_limit_check(points);
    json mu_rows = json::array();
    for (const MuRow& r : mu.rows) {
      mu_rows.push_back({{"a_over_astar", r.a / a_star}, {"mu_eps2", r.mu_eps2}, {"ratio", r.ratio}});
    }
    report["mu_limit"] = {{"rows", mu_rows}, {"bounded", mu.bounded}};

    const DriftReport drift = x_a_drift_check(points, eff, bc ? bc->y0 : Vec2{});
    json drift_rows = json::array();
    for (const DriftRow& r : drift.rows) {
      drift_rows.push_back({{"a_over_astar", r.a / a_star}, {"scaled", r.scaled}, {"absolute", r.absolute}});
    }
    report["x_a_drift"] = {{"rows", drift_rows}, {"pass", drift.pass}};

    writer_.write("report.json", report.dump(2) + "\n");
    return report;
  }

  const RunConfig& cfg_;
  std::ostream& log_;
  ArtifactWriter writer_;
  const Townes& townes_;
  json manifest_;
  json summary_;
};

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  Run r(cfg, log);
  return r.dispatch(out);
}

}  // namespace rotbec::cli
