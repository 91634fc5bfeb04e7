#include "pgff/experiments.hh"
#include "pgff/acceptance.hh"
#include "pgff/analytic.hh"
#include "pgff/harmonic.hh"
#include "pgff/sampler.hh"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef PGFF_VERSION
#define PGFF_VERSION "unknown"
#endif

namespace pgff {

std::string version_string() { return PGFF_VERSION; }

// ---- config ---------------------------------------------------------------

Json RunConfig::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["d"] = d;
  j["N"] = N;
  j["ell"] = ell;
  j["a"] = a;
  j["b"] = b;
  j["epsilon"] = epsilon;
  j["epsilon_grid"] = epsilon_grid;
  j["xi"] = xi;
  j["beta"] = beta;
  j["gamma"] = gamma;
  j["eta"] = eta;
  j["seed"] = seed;
  j["sweeps"] = sweeps;
  j["burn_in"] = burn_in;
  j["thinning"] = thinning;
  j["threads"] = threads;
  j["schedule"] = schedule;
  j["init"] = init;
  j["images"] = images;
  j["samples"] = samples;
  j["walk_steps"] = walk_steps;
  j["sites"] = sites;
  j["psi"] = psi;
  j["out"] = out;
  return j;
}

namespace {

template <class T> void read(const Json &j, const char *key, T &dst) {
  try {
    dst = j.at(key).get<T>();
  } catch (const Json::exception &e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void assign(RunConfig &c, const std::string &key, const Json &v) {
  Json j;
  j[key] = v;
  if (key == "experiment") read(j, "experiment", c.experiment);
  else if (key == "d") read(j, "d", c.d);
  else if (key == "N") read(j, "N", c.N);
  else if (key == "ell") read(j, "ell", c.ell);
  else if (key == "a") read(j, "a", c.a);
  else if (key == "b") read(j, "b", c.b);
  else if (key == "epsilon") read(j, "epsilon", c.epsilon);
  else if (key == "epsilon_grid") read(j, "epsilon_grid", c.epsilon_grid);
  else if (key == "xi") read(j, "xi", c.xi);
  else if (key == "beta") read(j, "beta", c.beta);
  else if (key == "gamma") read(j, "gamma", c.gamma);
  else if (key == "eta") read(j, "eta", c.eta);
  else if (key == "seed") read(j, "seed", c.seed);
  else if (key == "sweeps") read(j, "sweeps", c.sweeps);
  else if (key == "burn_in") read(j, "burn_in", c.burn_in);
  else if (key == "thinning") read(j, "thinning", c.thinning);
  else if (key == "threads") read(j, "threads", c.threads);
  else if (key == "schedule") read(j, "schedule", c.schedule);
  else if (key == "init") read(j, "init", c.init);
  else if (key == "images") read(j, "images", c.images);
  else if (key == "samples") read(j, "samples", c.samples);
  else if (key == "walk_steps") read(j, "walk_steps", c.walk_steps);
  else if (key == "sites") read(j, "sites", c.sites);
  else if (key == "psi") read(j, "psi", c.psi);
  else if (key == "out") read(j, "out", c.out);
  else throw ConfigError("unknown config key '" + key + "'");
}

InitKind parse_init(const std::string &s) {
  if (s == "zero") return InitKind::zero;
  if (s == "flat") return InitKind::flat;
  if (s == "pinned") return InitKind::pinned;
  throw ConfigError("init must be zero | flat | pinned, got '" + s + "'");
}

void require(bool ok, const std::string &rule) {
  if (!ok)
    throw ConfigError(rule);
}

bool needs_cylinder(const std::string &e) {
  return e == "sample" || e == "greens" || e == "capacity" || e == "partition-check";
}

} // namespace

RunConfig RunConfig::from_json(const Json &j) {
  if (!j.is_object())
    throw ConfigError("config must be a JSON object");
  RunConfig c;
  for (const auto &[k, v] : j.items())
    assign(c, k, v);
  return c;
}

void RunConfig::set(const std::string &assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json v = Json::parse(text, nullptr, false);
  if (v.is_discarded())
    v = text;
  assign(*this, key, v);
}

void validate(const RunConfig &c) {
  const auto &names = experiment_names();
  require(std::find(names.begin(), names.end(), c.experiment) != names.end(),
          "unknown experiment '" + c.experiment + "'");
  if (c.experiment == "acceptance") {
    require(c.threads >= 0, "threads must be >= 0");
    return;
  }
  require(c.d >= 1 && c.d <= 6, "d must lie in 1..6");
  if (needs_cylinder(c.experiment)) {
    require(c.N >= 2 && c.N % 2 == 0, "N must be even and >= 2");
    const double sites = (c.N + 1) * std::pow(c.N, c.d - 1);
    require(sites <= 2e7, "cylinder with more than 2e7 sites");
  }
  require(std::isfinite(c.a) && std::isfinite(c.b), "a and b must be finite");
  require(std::isfinite(c.epsilon) && c.epsilon >= 0, "epsilon must be finite and >= 0");
  for (double e : c.epsilon_grid)
    require(std::isfinite(e) && e >= 0, "epsilon_grid entries must be finite and >= 0");
  require(std::isfinite(c.xi) && c.xi >= 0, "xi must be >= 0 (0 selects the critical value)");
  require(c.beta > 0 && c.beta < 1, "beta must lie in (0, 1)");
  require(c.gamma > 0 && c.gamma < 1, "gamma must lie in (0, 1)");
  require(c.eta > 0, "eta must be > 0");
  require(c.sweeps >= 1, "sweeps must be >= 1");
  require(c.burn_in >= 0 && c.burn_in < c.sweeps, "burn_in must lie in [0, sweeps)");
  require(c.thinning >= 1, "thinning must be >= 1");
  require(c.threads >= 0, "threads must be >= 0");
  try {
    parse_schedule(c.schedule);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  parse_init(c.init);
  require(c.ell >= 1, "ell must be >= 1");
  require(c.images >= 0, "images must be >= 0");
  require(c.samples >= 1, "samples must be >= 1");
  require(c.walk_steps >= 1, "walk_steps must be >= 1");

  if (c.experiment == "sample") {
    const double s = std::round(std::pow(c.N, c.beta));
    require(std::abs(std::pow(c.N, c.beta) - s) <= 1e-9 * s && c.N % static_cast<int>(s) == 0,
            "N^beta must be an integer dividing N");
    require(c.a >= 0 && c.b >= 0, "sample needs a, b >= 0");
  }
  if (c.experiment == "variational") {
    require(c.a >= 0 && c.b >= 0, "variational needs a, b >= 0");
    require(c.xi > 0 || c.a + c.b > 0, "critical xi needs a + b > 0");
  }
  if (c.experiment == "free-energy")
    require(c.d >= 3 || c.ell <= 3, "free-energy window needs d >= 3");
  if (c.experiment == "greens")
    require(c.d >= 2, "image sum needs d >= 2");
  if (c.experiment == "domination") {
    require(c.sites >= 1 && static_cast<std::size_t>(c.sites) <= max_tiny_sites,
            "domination region must have 1.." + std::to_string(max_tiny_sites) + " sites");
    require(c.psi >= 0 && std::isfinite(c.psi), "domination boundary psi must be >= 0");
    require(c.samples >= 10, "domination needs samples >= 10");
    require(std::pow(c.ell, c.d) >= c.sites, "domination region larger than the box");
  }
}

// ---- report ---------------------------------------------------------------

void Report::check(const std::string &name, bool ok, const std::string &detail) {
  Json c;
  c["name"] = name;
  c["pass"] = ok;
  c["detail"] = detail;
  checks.push_back(c);
  pass = pass && ok;
}

Json Report::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["version"] = version;
  j["config"] = config;
  j["metrics"] = metrics;
  j["budgets"] = budgets;
  j["checks"] = checks;
  j["pass"] = pass;
  j["wall_seconds"] = wall_seconds;
  return j;
}

std::vector<std::filesystem::path> emit_report(const Report &r, const std::filesystem::path &dir) {
  namespace fs = std::filesystem;
  const std::string seed = r.config.contains("seed") ? r.config["seed"].dump() : "0";
  const fs::path sub = dir / (r.experiment + "-seed" + seed);
  fs::create_directories(sub);
  std::vector<fs::path> out;
  auto write_text = [&](const fs::path &p, const std::string &text) {
    std::ofstream f(p, std::ios::binary);
    if (!f)
      throw std::runtime_error("cannot open " + p.string() + " for writing");
    f << text;
    if (!f)
      throw std::runtime_error("write failed: " + p.string());
    out.push_back(p);
  };
  write_text(sub / "report.json", r.to_json().dump(2) + "\n");
  for (const auto &a : r.artifacts) {
    if (a.snapshot) {
      const Lattice lat = Lattice::cylinder(a.field.d, a.field.N);
      write_snapshot((sub / a.name).string(), lat, a.field.phi);
      out.push_back(sub / a.name);
    } else {
      write_text(sub / a.name, a.text);
    }
  }
  return out;
}

// ---- calibration ----------------------------------------------------------

Calibration calibrate_critical_eps(int d, int ell, double a, double b, double lo, double hi,
                                   double step, const ThermoOptions &opt) {
  if (!(hi > lo) || step <= 0)
    throw std::invalid_argument("calibration grid needs lo < hi and step > 0");
  Calibration c;
  c.target_xi = critical_xi(a, b);
  c.ell = ell;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int k = 0; k <= n; ++k)
    c.log_eps.push_back(lo + k * step);
  const FreeEnergyEstimate f = xi_thermo_integration(d, ell, std::exp(c.log_eps.back()), opt);
  c.statistical_se = f.statistical_se;
  c.discretisation = f.discretisation;
  c.gap = f.gap;
  for (double u : c.log_eps) {
    const auto it = std::upper_bound(f.log_eps.begin(), f.log_eps.end(), u);
    const std::size_t k = std::clamp<std::size_t>(it - f.log_eps.begin(), 1, f.log_eps.size() - 1);
    const double w = (u - f.log_eps[k - 1]) / (f.log_eps[k] - f.log_eps[k - 1]);
    c.xi_hat.push_back((1 - w) * f.xi_cumulative[k - 1] + w * f.xi_cumulative[k]);
  }
  for (std::size_t k = 0; k + 1 < c.xi_hat.size(); ++k) {
    if (c.xi_hat[k] <= c.target_xi && c.target_xi < c.xi_hat[k + 1]) {
      c.found = true;
      c.log_eps_lo = c.log_eps[k];
      c.log_eps_hi = c.log_eps[k + 1];
      break;
    }
  }
  return c;
}

// ---- experiments ----------------------------------------------------------

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

Json profile_json(const Profile1D &g) {
  Json k = Json::array();
  for (const auto &kn : g.knots())
    k.push_back({kn.t, kn.value});
  return k;
}

void run_sample(const RunConfig &c, Report &r) {
  const Lattice lat = build_lattice(c.d, c.N, LatticeKind::cylinder);
  ChainConfig cc;
  cc.sweeps = c.sweeps;
  cc.burn_in = c.burn_in;
  cc.thinning = c.thinning;
  cc.seed = c.seed;
  cc.schedule = parse_schedule(c.schedule);
  cc.threads = resolve_threads(c.threads);
  cc.xi = c.xi;
  cc.init = parse_init(c.init);
  const double eps = c.epsilon_grid.empty() ? c.epsilon : c.epsilon_grid.back();

  std::vector<double> cg_dist, volume;
  const ChainResult res = run_chain(lat, c.a, c.b, eps, cc, [&](const FieldState &st, const TrajectoryRow &) {
    cg_dist.push_back(lp_distance(coarse_grain(lat, st, c.beta), macro_step(lat, st), 1));
    volume.push_back(wetted_region(lat, st, c.beta, c.gamma, c.eta).volume_ratio);
  });

  std::ostringstream csv;
  csv << "sweep,pinned_fraction,l1_to_hhat,l1_to_hbar,omega_plus,energy,l1_cg_to_step,wetted_volume_ratio\n";
  std::vector<double> pinned, omega;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto &row = res.rows[i];
    csv << row.sweep << ',' << fmt(row.pinned_fraction) << ',' << fmt(row.l1_to_hhat) << ','
        << fmt(row.l1_to_hbar) << ',' << (row.omega_plus ? 1 : 0) << ',' << fmt(row.energy) << ','
        << fmt(cg_dist[i]) << ',' << fmt(volume[i]) << '\n';
    if (row.sweep > c.burn_in) {
      pinned.push_back(row.pinned_fraction);
      omega.push_back(row.omega_plus ? 1.0 : 0.0);
    }
  }
  r.artifacts.push_back({"trajectory.csv", csv.str(), false, {}});
  r.artifacts.push_back({"final.pgff", {}, true, {c.d, c.N, res.final.phi}});

  auto put = [&](const char *key, const MeanSE &m) {
    r.metrics[key] = m.mean;
    r.metrics[std::string(key) + "_se"] = m.se;
  };
  r.metrics["epsilon"] = eps;
  r.metrics["recorded_sweeps"] = res.rows.size();
  r.metrics["hhat_preference"] = res.hhat_preference;
  r.metrics["hhat_preference_se"] = res.hhat_preference_se;
  put("pinned_fraction", batch_means(pinned, 20));
  put("omega_plus_fraction", batch_means(omega, 20));
  r.metrics["rhat_pinned"] = res.rhat_pinned;
  r.metrics["rhat_l1"] = res.rhat_l1;
  const double limit = std::pow(c.N, -c.eta);
  const double within = static_cast<double>(std::count_if(cg_dist.begin(), cg_dist.end(),
                                                          [&](double x) { return x <= limit; })) /
                        static_cast<double>(cg_dist.size());
  r.metrics["cg_within_fraction"] = within;
  r.metrics["cg_limit"] = limit;
  r.metrics["final_energy"] = hamiltonian(lat, res.final.phi);
  r.metrics["final_step_polilinear_bound"] = step_polilinear_bound(lat, res.final);
  r.check("finite trajectory", true);
  if (eps == 0)
    r.check("no pinning at eps = 0", std::all_of(res.rows.begin(), res.rows.end(),
                                                 [](const TrajectoryRow &x) { return x.pinned_fraction == 0; }));
}

void run_variational(const RunConfig &c, Report &r) {
  const double xi = c.xi > 0 ? c.xi : critical_xi(c.a, c.b);
  const VariationalParams p{c.a, c.b, xi};
  r.metrics["xi"] = xi;
  r.metrics["xi_crit"] = c.a + c.b > 0 ? critical_xi(c.a, c.b) : 0.0;
  r.metrics["sigma_flat"] = sigma_flat(p);
  const Minimizers m = build_minimizers(p);
  r.metrics["flat_knots"] = profile_json(m.flat);
  r.metrics["has_pinned"] = m.pinned.has_value();
  if (m.pinned) {
    const auto [sl, sr] = contact_points(p);
    r.metrics["knots"] = {sl, sr};
    r.metrics["sigma_pinned"] = sigma_pinned(p);
    r.metrics["pinned_knots"] = profile_json(*m.pinned);
    r.metrics["l1_flat_pinned"] = lp_distance_1d(m.flat, *m.pinned, 1);
    const double err = std::abs(sigma_1d(*m.pinned, p).sigma - sigma_pinned(p));
    r.check("pinned energy closed form", err <= 1e-12, "error " + fmt(err));
  }
  r.metrics["sigma_min"] = sigma_min(p);
  const double err = std::abs(sigma_1d(m.flat, p).sigma - sigma_flat(p));
  r.check("flat energy closed form", err <= 1e-12, "error " + fmt(err));
}

void run_free_energy(const RunConfig &c, Report &r) {
  std::vector<double> grid = c.epsilon_grid.empty() ? std::vector<double>{c.epsilon} : c.epsilon_grid;
  const bool brute = std::pow(c.ell, c.d) <= static_cast<double>(max_bruteforce_sites);
  ThermoOptions opt;
  opt.seed = c.seed;
  opt.threads = resolve_threads(c.threads);
  opt.sweeps = c.sweeps;
  opt.burn_in = c.burn_in;
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "epsilon,method,xi_hat,half_width,gap,window_lo,window_hi\n";
  for (double eps : grid) {
    const FreeEnergyEstimate f = brute ? xi_bruteforce(c.d, c.ell, eps)
                                       : xi_thermo_integration(c.d, c.ell, eps, opt);
    Json row;
    row["epsilon"] = eps;
    row["method"] = to_string(f.method);
    row["xi_hat"] = f.xi_hat;
    row["half_width"] = f.half_width;
    row["gap"] = f.gap;
    row["window"] = {f.window_lo, f.window_hi};
    if (!brute) {
      row["statistical_se"] = f.statistical_se;
      row["discretisation"] = f.discretisation;
      row["remainder"] = f.remainder;
      row["remainder_bound"] = f.remainder_bound;
    }
    rows.push_back(row);
    csv << fmt(eps) << ',' << to_string(f.method) << ',' << fmt(f.xi_hat) << ','
        << fmt(f.half_width) << ',' << fmt(f.gap) << ',' << fmt(f.window_lo) << ','
        << fmt(f.window_hi) << '\n';
    if (eps >= 1 && c.d >= 3)
      r.check("window at eps=" + fmt(eps),
              f.xi_hat + f.half_width >= f.window_lo && f.xi_hat - f.half_width <= f.window_hi);
  }
  r.metrics["estimates"] = rows;
  r.budgets["method"] = brute ? "exact enumeration" : "thermodynamic integration";
  r.artifacts.push_back({"free_energy.csv", csv.str(), false, {}});
}

void run_greens(const RunConfig &c, Report &r) {
  const Lattice lat = build_lattice(c.d, c.N, LatticeKind::cylinder);
  const auto diag = greens_diagonal_by_layer(lat);
  std::ostringstream csv;
  csv << "i1,G_diag,capacity_singleton\n";
  double worst = 0;
  for (std::size_t k = 0; k < diag.size(); ++k) {
    const Site s = static_cast<Site>((k + 1) * lat.layer_size());
    const double cap = capacity(lat, Region({s})).value;
    worst = std::max(worst, std::abs(cap - 1.0 / diag[k]));
    csv << k + 1 << ',' << fmt(diag[k]) << ',' << fmt(cap) << '\n';
  }
  r.artifacts.push_back({"greens_diagonal.csv", csv.str(), false, {}});
  r.metrics["diagonal"] = diag;
  r.metrics["cN"] = *std::max_element(diag.begin(), diag.end());
  r.check("singleton capacity = 1/G", worst <= 1e-10, "max error " + fmt(worst));

  const Site src = static_cast<Site>((c.N / 2) * lat.layer_size());
  const GreensTable g = greens(lat, src);
  const ImageSum im = greens_image_sum(lat, src, c.images);
  double err = 0;
  for (Site s : lat.interior())
    err = std::max(err, std::abs(g[s] - im.values[s]));
  r.metrics["image_sum_max_error"] = err;
  r.metrics["image_slab_sites"] = im.slab_sites;
  r.budgets["solver_residual"] = std::max(g.residual, im.residual);
  r.check("image sum within 1e-6", err <= 1e-6, "max error " + fmt(err));
}

Region grow_blob(const Lattice &lat, std::size_t n, KeyedRng &rng) {
  std::vector<Site> in{lat.interior()[rng() % lat.interior_count()]};
  std::vector<std::uint8_t> mark(lat.site_count(), 0);
  mark[in[0]] = 1;
  while (in.size() < n) {
    const Site s = in[rng() % in.size()];
    const auto t = lat.neighbor(s, rng() % lat.degree());
    if (t != no_site && lat.is_interior(t) && !mark[t]) {
      mark[t] = 1;
      in.push_back(static_cast<Site>(t));
    }
  }
  return Region(std::move(in));
}

void run_capacity(const RunConfig &c, Report &r) {
  const Lattice lat = build_lattice(c.d, c.N, LatticeKind::cylinder);
  const std::size_t max_size = std::min<std::size_t>(512, lat.interior_count());
  const std::size_t count = static_cast<std::size_t>(std::min<long>(c.samples, 1000));
  const double expo = c.d > 2 ? (c.d - 2.0) / c.d : 0.0;
  double worst = std::numeric_limits<double>::infinity();
  std::ostringstream csv;
  csv << "size,capacity,ratio\n";
  for (std::size_t i = 0; i < count; ++i) {
    KeyedRng rng(c.seed, 0xCA9, i);
    const std::size_t n = std::min<std::size_t>(max_size, 8 + rng() % (max_size - 7));
    const Region a = grow_blob(lat, n, rng);
    const double cap = capacity(lat, a).value;
    const double ratio = cap / std::pow(static_cast<double>(n), expo);
    worst = std::min(worst, ratio);
    csv << n << ',' << fmt(cap) << ',' << fmt(ratio) << '\n';
  }
  r.artifacts.push_back({"capacity.csv", csv.str(), false, {}});
  r.metrics["sets"] = count;
  r.metrics["min_ratio"] = worst;
  r.metrics["exponent"] = expo;
  r.check("capacity ratio positive", worst > 0, "min ratio " + fmt(worst));
}

void run_partition_check(const RunConfig &c, Report &r) {
  const Lattice lat = build_lattice(c.d, c.N, LatticeKind::cylinder);
  const Region all = full_interior(lat);
  const double base = log_partition_free(lat, all).value;
  r.metrics["log_z_free"] = base;
  double worst = 0;
  std::vector<std::pair<double, double>> pairs{{c.a, c.b}};
  for (double x : {0.0, 0.5, 1.0})
    for (double y : {0.0, 0.5, 1.0})
      pairs.emplace_back(x, y);
  const double vol = std::pow(c.N, c.d);
  for (auto [x, y] : pairs) {
    const LogPartition lp = log_partition_boundary(lat, all, x * c.N, y * c.N);
    worst = std::max(worst, std::abs(lp.shift + 0.5 * vol * (x - y) * (x - y)));
  }
  r.metrics["slab_identity_residual"] = worst;
  r.check("slab identity", worst <= 1e-8, "residual " + fmt(worst));

  if (lat.interior_count() <= 2000) {
    const LogPartition loop = log_partition_loop_sum(lat, all);
    const double diff = std::abs(loop.value - base);
    r.metrics["loop_sum_difference"] = diff;
    r.metrics["loop_sum_steps"] = loop.terms;
    r.budgets["loop_sum_tail"] = loop.error_budget;
    r.check("loop sum within budget", diff <= loop.error_budget, "difference " + fmt(diff));
  }

  const WalkConstants w = walk_constants(c.d, c.N, c.d >= 3 ? c.walk_steps : 0,
                                         static_cast<std::size_t>(c.samples), c.seed,
                                         resolve_threads(c.threads));
  Json wc;
  wc["d"] = w.d;
  wc["N"] = w.N;
  wc["q"] = w.q;
  wc["q_err"] = w.q_err;
  wc["qN"] = w.qN;
  wc["qN_err"] = w.qN_err;
  wc["qhat0"] = w.qhat0;
  wc["cN"] = w.cN;
  if (c.d >= 3) {
    wc["g00"] = w.g00;
    wc["g00_err"] = w.g00_err;
    wc["n_r"] = w.n_r;
    wc["mc_samples"] = w.mc_samples;
    wc["r_hat"] = w.r_hat;
    wc["r_se"] = w.r_se;
    wc["r_tail"] = w.r_tail;
    wc["r_upper"] = w.r_upper;
    wc["margin"] = w.margin;
    wc["margin_se"] = w.margin_se;
    r.check("qN >= q", w.qN >= w.q);
    r.check("r below g00 by 3 sigma", w.margin >= 3 * w.margin_se,
            "margin " + fmt(w.margin) + " se " + fmt(w.margin_se));
  }
  r.metrics["walk_constants"] = wc;
}

void run_domination(const RunConfig &c, Report &r) {
  const Lattice box = Lattice::free_box(c.d, c.ell);
  const Region a(std::vector<Site>(box.interior().begin(), box.interior().begin() + c.sites));
  std::vector<double> boundary(box.site_count(), 0.0);
  for (std::size_t s = 0; s < box.site_count(); ++s)
    if (!a.contains(static_cast<Site>(s)))
      boundary[s] = c.psi;
  const double eps = c.epsilon_grid.empty() ? c.epsilon : c.epsilon_grid.back();
  const DominationReport d =
      domination_check(box, a, boundary, eps, static_cast<std::size_t>(c.samples), c.seed);
  r.metrics["samples"] = d.samples;
  r.metrics["proposals"] = d.proposals;
  r.metrics["acceptance"] = d.acceptance;
  r.metrics["worst_sigma"] = d.worst_sigma;
  r.metrics["checks"] = d.checks;
  r.check("empirical domination", d.pass, "worst " + fmt(d.worst_sigma) + " sigma");
  const double margin = domination_singleton_margin(c.d, eps);
  r.metrics["singleton_margin"] = margin;
  r.check("singleton domination", margin >= -1e-12, "margin " + fmt(margin));
}

void run_acceptance_experiment(const RunConfig &c, Report &r,
                               const std::function<void(const std::string &)> &log) {
  AcceptanceOptions opt;
  opt.seed = c.seed;
  opt.threads = resolve_threads(c.threads);
  const auto results = run_acceptance(opt, [&](const CriterionResult &x) {
    if (log)
      log(format_result(x));
  });
  Json table = Json::array();
  std::ostringstream csv;
  csv << "id,name,pass,seconds,detail\n";
  for (const auto &x : results) {
    Json row;
    row["id"] = x.id;
    row["name"] = x.name;
    row["pass"] = x.pass;
    row["seconds"] = x.seconds;
    row["limit_seconds"] = x.limit_seconds;
    row["detail"] = x.detail;
    row["metrics"] = x.metrics;
    table.push_back(row);
    csv << x.id << ',' << x.name << ',' << (x.pass ? 1 : 0) << ',' << fmt(x.seconds) << ",\""
        << x.detail << "\"\n";
    r.check(std::to_string(x.id) + " " + x.name, x.pass, x.detail);
  }
  r.metrics["criteria"] = table;
  r.artifacts.push_back({"acceptance.csv", csv.str(), false, {}});
}

} // namespace

Report run_experiment(const RunConfig &cfg,
                      const std::function<void(const std::string &)> &log) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  r.experiment = cfg.experiment;
  r.version = version_string();
  r.config = cfg.to_json();
  try {
    if (cfg.experiment == "sample") run_sample(cfg, r);
    else if (cfg.experiment == "variational") run_variational(cfg, r);
    else if (cfg.experiment == "free-energy") run_free_energy(cfg, r);
    else if (cfg.experiment == "greens") run_greens(cfg, r);
    else if (cfg.experiment == "capacity") run_capacity(cfg, r);
    else if (cfg.experiment == "partition-check") run_partition_check(cfg, r);
    else if (cfg.experiment == "domination") run_domination(cfg, r);
    else run_acceptance_experiment(cfg, r, log);
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw std::runtime_error(cfg.experiment + ": " + e.what());
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

} // namespace pgff
