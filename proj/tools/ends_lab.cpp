// ends_lab: command-line driver for the two-ended model.
//
//   ends_lab [--config F] [--n N] [--m M] [--seed S] [--out DIR] [--format csv|json] <group> <command> ...
//
// Flags override config-file keys. Every run writes its table to DIR and a
// manifest.json next to it. Exit codes: 0 ok, 1 bad arguments or config,
// 2 numerical non-convergence.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ends_lab.hpp"

namespace el = ends_lab;
using json = nlohmann::ordered_json;

namespace {

struct Global {
  std::string config;
  std::optional<int> n, m;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string format = "csv";
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const std::string t = el::trim(item);
    if (t.empty()) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || used == 0) throw el::DomainError("bad number '" + t + "' in list");
    out.push_back(v);
  }
  if (out.empty()) throw el::DomainError("empty list");
  return out;
}

std::vector<el::RadialPoint> parse_points(const std::string& text) {
  std::vector<el::RadialPoint> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const std::string t = el::trim(item);
    if (!t.empty()) out.push_back(el::parse_point(t));
  }
  if (out.empty()) throw el::DomainError("no points given");
  return out;
}

/// Points on the default evaluation grid: log-spaced s in both ends, then the core.
std::vector<el::RadialPoint> grid_points(double s_max, int per_decade) {
  std::vector<el::RadialPoint> out;
  for (el::Region e : el::kEnds)
    for (double s : el::log_grid(1.0, s_max, per_decade)) out.push_back({e, s});
  out.push_back(el::RadialPoint::core());
  return out;
}

class Run {
 public:
  Run(const Global& g, std::string command, std::vector<std::string> argv)
      : g_(g), command_(std::move(command)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()) {
    if (!g_.config.empty()) params_ = el::load_params_file(g_.config);
    if (g_.n) params_.n = *g_.n;
    if (g_.m) params_.m = *g_.m;
    if (g_.seed) params_.seed = *g_.seed;
    params_.validate();
    if (g_.format != "csv" && g_.format != "json") throw el::ConfigError("--format must be csv or json");
  }

  const el::ModelParams& params() const { return params_; }
  el::Model model() const { return el::Model(params_); }

  /// Writes `table` as <stem>.csv or <stem>.json.
  void emit(const std::string& stem, const el::io::Table& table, json extra = json::object()) {
    if (g_.format == "csv") {
      write(stem + ".csv", table.csv());
    } else {
      json j = std::move(extra);
      j["rows"] = table.json();
      write(stem + ".json", el::io::dump(j));
    }
  }

  void emit_json(const std::string& stem, const json& j) { write(stem + ".json", el::io::dump(j)); }

  void set(const std::string& key, json value) { settings_[key] = std::move(value); }

  void finish() {
    json m;
    m["subcommand"] = command_;
    m["argv"] = argv_;
    m["params"] = el::io::params_json(params_);
    m["seed"] = params_.seed;
    m["tolerances"] = {{"quad_tol", params_.quad_tol}, {"quad_max_depth", params_.quad_max_depth}};
    m["settings"] = settings_;
    m["format"] = g_.format;
    m["threads"] = el::worker_count();
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    m["artifacts"] = artifacts_;
    write("manifest.json", el::io::dump(m));
  }

 private:
  void write(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::path(g_.out) / name;
    el::io::write_file(path, text);
    artifacts_.push_back(path.string());
    std::cout << "wrote " << path.string() << "\n";
  }

  Global g_;
  std::string command_;
  std::vector<std::string> argv_;
  std::chrono::steady_clock::time_point start_;
  el::ModelParams params_;
  json settings_ = json::object();
  std::vector<std::string> artifacts_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the two-ended manifold R^n # R^m"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Global g;
  app.add_option("--config", g.config, "key=value parameter file")->check(CLI::ExistingFile);
  app.add_option("--n", g.n, "small-end dimension");
  app.add_option("--m", g.m, "large-end dimension");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  std::vector<std::string> args(argv, argv + argc);
  std::function<void()> action;

  // ---- geometry ----
  auto* geo = app.add_subcommand("geometry", "volumes and doubling")->require_subcommand(1);

  std::string vol_centers = "endM:10", vol_radii = "0.1,1,10,100";
  auto* vol = geo->add_subcommand("volume", "V(x, r) and V(x, 2r) for each center and radius");
  vol->add_option("--center", vol_centers, "comma-separated points, e.g. endN:4,core")->capture_default_str();
  vol->add_option("--r", vol_radii, "comma-separated radii")->capture_default_str();
  vol->callback([&] {
    action = [&] {
      Run run(g, "geometry volume", args);
      const auto model = run.model();
      const auto centers = parse_points(vol_centers);
      const auto radii = parse_list(vol_radii);
      el::io::Table t({"region", "s", "r", "V", "V2", "ratio"});
      for (const auto& row : el::doubling_scan(model, centers, radii))
        t.row() << el::region_name(row.x.region) << row.x.s << row.r << row.volume << row.volume_2r << row.ratio;
      run.emit("volume", t);
      run.finish();
    };
  });

  std::string dbl_region = "endN", dbl_s = "16,32,64,128,256,512,1024";
  double dbl_factor = 1.0;
  auto* dbl = geo->add_subcommand("doubling", "V(x,2r)/V(x,r) at r = factor * s, with the log-log slope in s");
  dbl->add_option("--region", dbl_region)->capture_default_str();
  dbl->add_option("--s", dbl_s)->capture_default_str();
  dbl->add_option("--r-factor", dbl_factor)->capture_default_str();
  dbl->callback([&] {
    action = [&] {
      Run run(g, "geometry doubling", args);
      const auto model = run.model();
      const el::Region region = el::parse_region(dbl_region);
      if (region == el::Region::Core) throw el::DomainError("doubling scan needs an end");
      const auto ss = parse_list(dbl_s);
      el::io::Table t({"region", "s", "r", "V", "V2", "ratio"});
      std::vector<double> ratios;
      for (double s : ss) {
        const auto row = el::doubling_row(model, el::RadialPoint::in(region, s), dbl_factor * s);
        ratios.push_back(row.ratio);
        t.row() << el::region_name(region) << s << row.r << row.volume << row.volume_2r << row.ratio;
      }
      const double slope = ss.size() >= 2 ? el::fit_loglog_slope(ss, ratios) : 0.0;
      run.set("slope", slope);
      std::cout << "slope of V(x,2r)/V(x,r) in s: " << el::io::num(slope) << "\n";
      run.emit("doubling", t, json{{"slope", slope}});
      run.finish();
    };
  });

  // ---- maximal ----
  auto* mx = app.add_subcommand("maximal", "Hardy-Littlewood maximal functions")->require_subcommand(1);

  std::string ev_f = "chi2", ev_points, ev_op = "uncentered";
  double ev_smax = 1000, ev_rfactor = 1e4;
  int ev_per_decade = 8;
  auto* ev = mx->add_subcommand("eval", "M f on a list of points or the default grid");
  ev->add_option("--f", ev_f, "function literal")->capture_default_str();
  ev->add_option("--points", ev_points, "comma-separated points (default: grid)");
  ev->add_option("--op", ev_op, "centered or uncentered")->check(CLI::IsMember({"centered", "uncentered"}))
      ->capture_default_str();
  ev->add_option("--s-max", ev_smax, "grid extent")->capture_default_str();
  ev->add_option("--per-decade", ev_per_decade, "grid density")->capture_default_str();
  ev->add_option("--r-max-factor", ev_rfactor, "radius cap relative to |x|")->capture_default_str();
  ev->callback([&] {
    action = [&] {
      Run run(g, "maximal eval", args);
      const auto model = run.model();
      const auto f = el::parse_function(ev_f);
      const auto pts = ev_points.empty() ? grid_points(ev_smax, ev_per_decade) : parse_points(ev_points);
      el::SearchConfig cfg;
      cfg.r_max_factor = ev_rfactor;
      std::vector<el::MaxResult> res(pts.size());
      if (ev_op == "centered") {
        el::parallel_for(pts.size(), [&](std::size_t i) { res[i] = el::maximal_centered(model, f, pts[i], cfg); });
      } else {
        double s_max = 1.0;
        for (const auto& p : pts) s_max = std::max(s_max, el::norm(p));
        const el::UncenteredMaximizer um(model, f, cfg, s_max);
        el::parallel_for(pts.size(), [&](std::size_t i) { res[i] = um(pts[i]); });
      }
      el::io::Table t({"region", "s", "value", "arg_end", "arg_u", "arg_r", "boundary_flag"});
      for (std::size_t i = 0; i < pts.size(); ++i)
        t.row() << el::region_name(pts[i].region) << el::norm(pts[i]) << res[i].value
                << el::region_name(res[i].center.region) << el::norm(res[i].center) << res[i].r << res[i].boundary;
      run.set("function", el::format_function(f));
      run.set("operator", ev_op);
      run.set("r_max_factor", ev_rfactor);
      run.emit("maximal", t);
      run.finish();
    };
  });

  std::string ce_s = "10,20,40,80,160";
  auto* ce = mx->add_subcommand("counterexample", "centered vs uncentered M of the small-end indicator on the large end");
  ce->add_option("--s", ce_s)->capture_default_str();
  ce->callback([&] {
    action = [&] {
      Run run(g, "maximal counterexample", args);
      const auto model = run.model();
      const auto ss = parse_list(ce_s);
      const auto rows = el::counterexample_profile(model, ss);
      el::io::Table t({"s", "uncentered", "centered", "ratio", "r_star", "r_predicted"});
      std::vector<double> centered;
      for (const auto& r : rows) {
        t.row() << r.s << r.uncentered << r.centered << r.ratio << r.argmax_r << r.predicted_r;
        centered.push_back(r.centered);
      }
      const double slope = ss.size() >= 2 ? el::fit_loglog_slope(ss, centered) : 0.0;
      run.set("centered_slope", slope);
      std::cout << "slope of log M_c vs log s: " << el::io::num(slope) << "\n";
      run.emit("counterexample", t, json{{"centered_slope", slope}});
      run.finish();
    };
  });

  std::string dc_f = "chi3", dc_end = "endN";
  int dc_exp = 3, dc_per_decade = 8;
  double dc_smin = 4, dc_smax = 4096;
  auto* dc = mx->add_subcommand("decay", "s^e M f(s) / ||f||_1 along one end");
  dc->add_option("--f", dc_f)->capture_default_str();
  dc->add_option("--end", dc_end)->capture_default_str();
  dc->add_option("--exponent", dc_exp)->capture_default_str();
  dc->add_option("--s-min", dc_smin)->capture_default_str();
  dc->add_option("--s-max", dc_smax)->capture_default_str();
  dc->add_option("--per-decade", dc_per_decade)->capture_default_str();
  dc->callback([&] {
    action = [&] {
      Run run(g, "maximal decay", args);
      const auto model = run.model();
      const auto f = el::parse_function(dc_f);
      const auto grid = el::log_grid(dc_smin, dc_smax, dc_per_decade);
      const auto chk = el::decay_bound_check(model, f, el::parse_region(dc_end), dc_exp, grid);
      el::io::Table t({"s", "normalized"});
      for (std::size_t i = 0; i < chk.s.size(); ++i) t.row() << chk.s[i] << chk.normalized[i];
      run.set("constant", chk.constant);
      run.set("max_decade_variation", chk.max_decade_variation);
      std::cout << "constant " << el::io::num(chk.constant) << ", decade variation "
                << el::io::num(chk.max_decade_variation) << "\n";
      run.emit("decay", t, json{{"constant", chk.constant}, {"max_decade_variation", chk.max_decade_variation}});
      run.finish();
    };
  });

  // ---- heat ----
  auto* heat = app.add_subcommand("heat", "model heat kernel and heat maximal function")->require_subcommand(1);
  double kC = el::KernelConstants{}.C, kc = el::KernelConstants{}.c;
  heat->add_option("--C", kC, "kernel amplitude")->capture_default_str();
  heat->add_option("--c", kc, "Gaussian rate")->capture_default_str();

  std::string hk_x = "endM:3", hk_y = "core", hk_t = "0.01,0.1,1,10,100,1000";
  std::optional<double> hk_d;
  auto* hkc = heat->add_subcommand("kernel", "h_t(x, y), its regime, and the mass at x");
  hkc->add_option("--x", hk_x)->capture_default_str();
  hkc->add_option("--y", hk_y)->capture_default_str();
  hkc->add_option("--t", hk_t)->capture_default_str();
  hkc->add_option("--d", hk_d, "distance (default: the minimal distance between the shells)");
  hkc->callback([&] {
    action = [&] {
      Run run(g, "heat kernel", args);
      const el::HeatKernel hk(run.model(), {kC, kc});
      const auto x = el::parse_point(hk_x), y = el::parse_point(hk_y);
      const double d = hk_d ? *hk_d : hk.model().min_distance(x, y);
      el::io::Table t({"t", "regime", "d", "kernel", "mass", "tail_bound"});
      for (double tt : parse_list(hk_t)) {
        const auto mass = hk.kernel_mass(x, tt);
        t.row() << tt << el::regime_name(el::classify_regime(x, y, tt)) << d << hk.eval(x, y, d, tt) << mass.mass
                << mass.tail_bound;
      }
      run.set("C", kC);
      run.set("c", kc);
      run.emit("kernel", t);
      run.finish();
    };
  });

  std::string hm_f = "chi3", hm_points;
  double hm_smax = 1000;
  int hm_per_decade = 8;
  auto* hm = heat->add_subcommand("maximal", "sup_t |exp(-t Delta) f| on points or the default grid");
  hm->add_option("--f", hm_f)->capture_default_str();
  hm->add_option("--points", hm_points);
  hm->add_option("--s-max", hm_smax)->capture_default_str();
  hm->add_option("--per-decade", hm_per_decade)->capture_default_str();
  hm->callback([&] {
    action = [&] {
      Run run(g, "heat maximal", args);
      const el::HeatKernel hk(run.model(), {kC, kc});
      const auto f = el::parse_function(hm_f);
      const auto pts = hm_points.empty() ? grid_points(hm_smax, hm_per_decade) : parse_points(hm_points);
      std::vector<el::HeatMaxResult> res(pts.size());
      el::parallel_for(pts.size(), [&](std::size_t i) { res[i] = el::heat_maximal(hk, f, pts[i]); });
      el::io::Table t({"region", "s", "t_argmax", "value"});
      for (std::size_t i = 0; i < pts.size(); ++i)
        t.row() << el::region_name(pts[i].region) << el::norm(pts[i]) << res[i].t << res[i].value;
      run.set("function", el::format_function(f));
      run.set("C", kC);
      run.set("c", kc);
      run.emit("heat_maximal", t);
      run.finish();
    };
  });

  std::size_t hi_samples = 10000;
  bool hi_no_poisson = false;
  auto* hin = heat->add_subcommand("inequalities", "empirical sups of the large-time scalar bounds");
  hin->add_option("--samples", hi_samples, "samples in the first run (the second doubles it)")->capture_default_str();
  hin->add_flag("--no-poisson", hi_no_poisson, "skip the Poisson domination check");
  hin->callback([&] {
    action = [&] {
      Run run(g, "heat inequalities", args);
      const el::HeatKernel hk(run.model(), {kC, kc});
      const auto reps = el::inequality_checks(hk, hi_samples, run.params().seed, !hi_no_poisson);
      el::io::Table t({"inequality_name", "samples", "empirical_sup", "stability_ratio"});
      for (const auto& r : reps) t.row() << r.name << r.samples << r.empirical_sup << r.stability_ratio;
      run.set("samples", hi_samples);
      run.emit("inequalities", t);
      run.finish();
    };
  });

  // ---- weaktype ----
  auto* wt = app.add_subcommand("weaktype", "weak-(1,1) and L^p constants")->require_subcommand(1);
  std::string wt_ops = "M_centered,M_uncentered,M_heat";
  double wt_smax = 1000;
  int wt_per_decade = 8, wt_alpha = 16;
  bool wt_no_scaling = false;
  auto* wr = wt->add_subcommand("report", "k_weak, L2 and L-infinity ratios for the standard family");
  wr->add_option("--ops", wt_ops)->capture_default_str();
  wr->add_option("--s-max", wt_smax)->capture_default_str();
  wr->add_option("--per-decade", wt_per_decade)->capture_default_str();
  wr->add_option("--alpha-per-decade", wt_alpha)->capture_default_str();
  wr->add_flag("--no-scaling", wt_no_scaling, "skip the f -> 3f rerun");
  wr->callback([&] {
    action = [&] {
      Run run(g, "weaktype report", args);
      const auto model = run.model();
      std::vector<el::Operator> ops;
      std::stringstream ss(wt_ops);
      for (std::string item; std::getline(ss, item, ',');) ops.push_back(el::parse_operator(el::trim(item)));
      el::FamilyReportConfig cfg;
      cfg.profile.grid = {wt_smax, wt_per_decade};
      cfg.profile.kernel = {kC, kc};
      cfg.weak.alpha_per_decade = wt_alpha;
      cfg.check_scaling = !wt_no_scaling;
      const auto rows = el::family_report(model, cfg, ops);
      el::io::Table t({"function", "operator", "k_weak", "l2_ratio", "linf_ratio"});
      for (const auto& r : rows) t.row() << r.function << el::operator_name(r.op) << r.k_weak << r.l2_ratio << r.linf_ratio;
      json meta{{"seed", run.params().seed},
                {"grids",
                 {{"s_max", wt_smax}, {"s_per_decade", wt_per_decade}, {"alpha_per_decade", wt_alpha}}}};
      if (g.format == "csv") {
        run.emit("weaktype", t);
      } else {
        json j;
        j["params"] = el::io::params_json(run.params());
        j["rows"] = t.json();
        j["meta"] = meta;
        run.emit_json("weaktype", j);
      }
      run.set("grids", meta["grids"]);
      run.finish();
    };
  });

  // ---- oracle ----
  auto* orc = app.add_subcommand("oracle", "Monte-Carlo cross-checks")->require_subcommand(1);
  std::size_t oc_trials = 100, oc_samples = 200000;
  auto* oc = orc->add_subcommand("compare", "quadrature vs Monte-Carlo on random balls");
  oc->add_option("--trials", oc_trials, "balls in total, alternating ends")->capture_default_str();
  oc->add_option("--samples", oc_samples)->capture_default_str();
  oc->callback([&] {
    action = [&] {
      Run run(g, "oracle compare", args);
      const auto model = run.model();
      el::McConfig cfg;
      cfg.samples = oc_samples;
      cfg.seed = run.params().seed;
      const auto rep = el::compare_engines(model, oc_trials, cfg);
      el::io::Table t({"trial", "function", "region", "s", "r", "quad_volume", "mc_volume", "mc_volume_stderr",
                       "quad_average", "mc_average", "mc_average_stderr", "pass"});
      for (const auto& r : rep.rows)
        t.row() << r.trial << r.function << el::region_name(r.ball.center.region) << r.ball.center.s << r.ball.radius
                << r.quad_volume << r.mc_volume.estimate << r.mc_volume.stderr << r.quad_average
                << r.mc_average.estimate << r.mc_average.stderr << r.pass;
      json j;
      j["trials"] = rep.trials;
      j["max_rel_dev"] = rep.max_rel_dev;
      j["failures"] = rep.failures;
      j["pass"] = rep.pass();
      run.emit_json("oracle", j);
      run.emit("oracle_rows", t);
      std::cout << (rep.pass() ? "PASS" : "FAIL") << " max normalized deviation " << el::io::num(rep.max_rel_dev)
                << "\n";
      run.finish();
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : 1;
  }
  try {
    if (action) action();
    return 0;
  } catch (const el::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
