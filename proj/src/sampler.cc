#include "pgff/sampler.hh"
#include "pgff/analytic.hh"
#include "pgff/observables.hh"
#include "pgff/partition.hh"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace pgff {

namespace {

double logistic(double r) {
  if (r >= 0)
    return 1.0 / (1.0 + std::exp(-r));
  const double e = std::exp(r);
  return e / (1.0 + e);
}

struct SiteKernel {
  int d;
  double log_eps;
  double c0; // (1/2) log(pi/d)
  double sd;

  SiteKernel(int dim, double eps)
      : d(dim), log_eps(std::log(eps)), c0(0.5 * std::log(pi / dim)),
        sd(std::sqrt(1.0 / (2.0 * dim))) {}

  void update(const Lattice &lat, FieldState &st, Site s) const {
    double sum = 0;
    for (auto t : lat.neighbors(s))
      sum += st.phi[t];
    const double m = sum / (2.0 * d);
    const double p = logistic(log_eps - d * m * m - c0);
    KeyedRng rng(st.seed, st.sweep, s);
    if (rng.uniform() < p) {
      st.phi[s] = 0.0;
      st.pinned[s] = 1;
    } else {
      st.phi[s] = m + sd * rng.normal();
      st.pinned[s] = 0;
    }
  }
};

} // namespace

SiteConditional site_conditional(double neighbour_sum, int d, double eps) {
  if (eps < 0)
    throw std::invalid_argument("eps must be >= 0");
  if (d < 1)
    throw std::invalid_argument("d must be >= 1");
  SiteConditional c;
  c.mean = neighbour_sum / (2.0 * d);
  c.variance = 1.0 / (2.0 * d);
  c.p_pin = logistic(std::log(eps) - d * c.mean * c.mean - 0.5 * std::log(pi / d));
  return c;
}

Schedule parse_schedule(const std::string &s) {
  if (s == "sequential")
    return Schedule::sequential;
  if (s == "checkerboard")
    return Schedule::checkerboard;
  throw std::invalid_argument("unknown schedule '" + s + "' (sequential | checkerboard)");
}

void sweep(const Lattice &lat, FieldState &st, double eps, Schedule schedule, int threads) {
  if (eps < 0)
    throw std::invalid_argument("eps must be >= 0");
  const SiteKernel k(lat.dim(), eps);
  if (schedule == Schedule::sequential) {
    for (Site s : lat.interior())
      k.update(lat, st, s);
  } else {
    if (!lat.bipartite())
      throw std::invalid_argument("checkerboard schedule needs a bipartite lattice");
    for (int c = 0; c < 2; ++c) {
      const auto cls = lat.color_class(c);
      // thread start-up costs more than a few thousand site updates
      const int t = cls.size() >= 4096 ? threads : 1;
      parallel_for(cls.size(), t, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
          k.update(lat, st, cls[i]);
      });
    }
  }
  ++st.sweep;
}

ChainResult run_chain(const Lattice &lat, double a, double b, double eps,
                      const ChainConfig &cfg, const ChainObserver &observer) {
  return run_chain(lat, make_state(lat, a, b, cfg.seed, cfg.init), eps, cfg, observer);
}

ChainResult run_chain(const Lattice &lat, FieldState start, double eps,
                      const ChainConfig &cfg, const ChainObserver &observer) {
  if (cfg.sweeps < 1 || cfg.burn_in < 0 || cfg.burn_in >= cfg.sweeps)
    throw std::invalid_argument("chain needs 0 <= burn_in < sweeps");
  if (cfg.thinning < 1)
    throw std::invalid_argument("thinning must be >= 1");
  if (eps < 0)
    throw std::invalid_argument("eps must be >= 0");

  const double a = start.a, b = start.b;
  const bool cylinder = lat.kind() == LatticeKind::cylinder;
  const Profile1D hbar = Profile1D::line(a, b);
  std::optional<Profile1D> hhat;
  if (cylinder && a > 0 && b > 0) {
    const double xi = cfg.xi > 0 ? cfg.xi : critical_xi(a, b);
    hhat = build_minimizers({a, b, xi}).pinned;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ChainResult res;
  res.final = std::move(start);
  FieldState &st = res.final;
  const std::uint64_t first = st.sweep;
  for (long s = 1; s <= cfg.sweeps; ++s) {
    sweep(lat, st, eps, cfg.schedule, cfg.threads);
    if (s % cfg.thinning != 0)
      continue;
    TrajectoryRow row;
    row.sweep = static_cast<long>(st.sweep - first);
    row.pinned_fraction = pinned_fraction(lat, st);
    row.energy = hamiltonian(lat, st.phi);
    if (!std::isfinite(row.energy))
      throw std::runtime_error("non-finite field after sweep " + std::to_string(row.sweep));
    row.omega_plus = omega_plus(lat, st);
    if (cylinder) {
      const MacroProfile h = macro_step(lat, st);
      row.l1_to_hbar = lp_distance(h, hbar, 1);
      row.l1_to_hhat = hhat ? lp_distance(h, *hhat, 1) : nan;
    } else {
      row.l1_to_hbar = row.l1_to_hhat = nan;
    }
    if (observer)
      observer(st, row);
    res.rows.push_back(row);
  }

  std::vector<double> pref, pinned, diff;
  for (const auto &r : res.rows) {
    if (r.sweep <= cfg.burn_in)
      continue;
    pinned.push_back(r.pinned_fraction);
    if (hhat) {
      pref.push_back(r.l1_to_hhat < r.l1_to_hbar ? 1.0 : 0.0);
      diff.push_back(r.l1_to_hhat - r.l1_to_hbar);
    }
  }
  if (!pref.empty()) {
    const MeanSE m = batch_means(pref, std::min<int>(20, static_cast<int>(pref.size() / 2) + 1));
    res.hhat_preference = m.mean;
    res.hhat_preference_se = m.se;
    res.rhat_l1 = split_rhat(diff);
  } else {
    res.hhat_preference = res.hhat_preference_se = res.rhat_l1 = nan;
  }
  res.rhat_pinned = split_rhat(pinned);
  return res;
}

std::vector<double> TinyExact::draw(KeyedRng &rng) const {
  const double u = rng.uniform();
  std::size_t mask = subset_prob.size() - 1;
  double acc = 0;
  for (std::size_t k = 0; k < subset_prob.size(); ++k) {
    acc += subset_prob[k];
    if (u < acc) {
      mask = k;
      break;
    }
  }
  while (subset_prob[mask] == 0 && mask > 0)
    --mask;
  std::vector<double> out(sites.size(), 0.0);
  const Eigen::VectorXd &mu = subset_mean[mask];
  if (mu.size() > 0) {
    Eigen::VectorXd z(mu.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
      z[i] = rng.normal();
    const Eigen::VectorXd x = mu + subset_chol[mask] * z;
    Eigen::Index j = 0;
    for (std::size_t k = 0; k < sites.size(); ++k)
      if ((mask >> k) & 1u)
        out[k] = x[j++];
  }
  return out;
}

TinyExact exact_tiny(const Lattice &lat, const Region &a, const std::vector<double> &boundary,
                     double eps) {
  if (eps < 0)
    throw std::invalid_argument("eps must be >= 0");
  const std::size_t n = a.size();
  if (n == 0 || n > max_tiny_sites)
    throw std::invalid_argument("exact enumeration needs 1.." + std::to_string(max_tiny_sites) +
                                " sites, got " + std::to_string(n));
  TinyExact ex;
  ex.sites = a.sites;
  ex.boundary = boundary;
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> logw(count);
  ex.subset_mean.resize(count);
  ex.subset_chol.resize(count);
  const double log_eps = std::log(eps);
  std::vector<double> phi;
  std::vector<Site> free;
  for (std::size_t mask = 0; mask < count; ++mask) {
    phi = boundary;
    free.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if ((mask >> k) & 1u)
        free.push_back(ex.sites[k]);
      else
        phi[ex.sites[k]] = 0.0;
    }
    const std::size_t pinned = n - free.size();
    const GaussianBlock g = gaussian_block(lat, free, phi, true);
    for (std::size_t k = 0; k < free.size(); ++k)
      phi[free[k]] = g.mean[k];
    if (pinned > 0 && eps == 0)
      logw[mask] = -std::numeric_limits<double>::infinity();
    else
      logw[mask] = (pinned > 0 ? static_cast<double>(pinned) * log_eps : 0.0) + g.log_z -
                   region_energy(lat, a, phi);
    ex.subset_mean[mask] = g.mean;
    if (!free.empty())
      ex.subset_chol[mask] = Eigen::LLT<Eigen::MatrixXd>(g.cov).matrixL();
  }
  const double lz = log_sum_exp(logw);
  ex.subset_prob.resize(count);
  for (std::size_t mask = 0; mask < count; ++mask)
    ex.subset_prob[mask] = std::exp(logw[mask] - lz);

  ex.pin_prob.assign(n, 0.0);
  ex.mean.assign(n, 0.0);
  ex.mean_free.assign(n, 0.0);
  ex.second_free.assign(n, 0.0);
  for (std::size_t mask = 0; mask < count; ++mask) {
    const double p = ex.subset_prob[mask];
    Eigen::Index j = 0;
    const Eigen::VectorXd &mu = ex.subset_mean[mask];
    for (std::size_t k = 0; k < n; ++k) {
      if ((mask >> k) & 1u) {
        const Eigen::MatrixXd &l = ex.subset_chol[mask];
        const double var = l.row(j).squaredNorm();
        ex.mean[k] += p * mu[j];
        ex.mean_free[k] += p * mu[j];
        ex.second_free[k] += p * (mu[j] * mu[j] + var);
        ++j;
      } else {
        ex.pin_prob[k] += p;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double pf = 1.0 - ex.pin_prob[k];
    if (pf > 0) {
      ex.mean_free[k] /= pf;
      ex.second_free[k] /= pf;
    }
  }
  return ex;
}

TinyExact exact_tiny_sampler(const Lattice &lat, double a, double b, double eps) {
  if (lat.interior_count() > 6)
    throw std::invalid_argument("exact_tiny_sampler supports at most 6 interior sites, got " +
                                std::to_string(lat.interior_count()));
  const double N = lat.side();
  return exact_tiny(lat, full_interior(lat), boundary_values(lat, a * N, b * N), eps);
}

DominationReport domination_check(const Lattice &lat, const Region &a,
                                  const std::vector<double> &boundary, double eps,
                                  std::size_t samples, std::uint64_t seed) {
  for (double v : boundary)
    if (v < 0)
      throw std::invalid_argument("domination check needs nonnegative boundary data");
  if (samples < 10)
    throw std::invalid_argument("domination check needs at least 10 samples");
  const TinyExact ex = exact_tiny(lat, a, boundary, eps);
  const std::size_t n = a.size();

  std::vector<std::vector<double>> pinned_draws(n), plus_draws(n);
  for (std::size_t i = 0; i < samples; ++i) {
    KeyedRng rng(seed, 1, i);
    const auto x = ex.draw(rng);
    for (std::size_t k = 0; k < n; ++k)
      pinned_draws[k].push_back(x[k]);
  }

  const GaussianBlock g = gaussian_block(lat, a.sites, boundary, true);
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(g.cov).matrixL();
  DominationReport rep;
  rep.samples = samples;
  std::size_t accepted = 0;
  Eigen::VectorXd z(n);
  while (accepted < samples) {
    KeyedRng rng(seed, 2, rep.proposals++);
    for (std::size_t k = 0; k < n; ++k)
      z[k] = rng.normal();
    const Eigen::VectorXd x = g.mean + l * z;
    if ((x.array() >= 0).all()) {
      ++accepted;
      for (std::size_t k = 0; k < n; ++k)
        plus_draws[k].push_back(x[k]);
    }
    if (rep.proposals >= 10000 &&
        static_cast<double>(accepted) / static_cast<double>(rep.proposals) < 1e-4)
      throw std::runtime_error("rejection sampler acceptance below 1e-4");
  }
  rep.acceptance = static_cast<double>(accepted) / static_cast<double>(rep.proposals);

  rep.worst_sigma = std::numeric_limits<double>::infinity();
  bool ok = true;
  const double ns = static_cast<double>(samples);
  for (std::size_t k = 0; k < n; ++k) {
    auto &pe = pinned_draws[k];
    auto &pp = plus_draws[k];
    std::sort(pe.begin(), pe.end());
    std::sort(pp.begin(), pp.end());
    for (int q = 0; q <= 40; ++q) {
      const double x = q == 0 ? 0.0 : pp[std::min(samples - 1, static_cast<std::size_t>(q * ns / 41))];
      const double fe = static_cast<double>(std::upper_bound(pe.begin(), pe.end(), x) - pe.begin()) / ns;
      const double fp = static_cast<double>(std::upper_bound(pp.begin(), pp.end(), x) - pp.begin()) / ns;
      const double sigma = std::sqrt(fe * (1 - fe) / ns + fp * (1 - fp) / ns);
      ++rep.checks;
      if (sigma > 0) {
        rep.worst_sigma = std::min(rep.worst_sigma, (fe - fp) / sigma);
        ok = ok && fe - fp >= -3 * sigma;
      } else {
        ok = ok && fe >= fp;
      }
    }
  }
  rep.pass = ok;
  return rep;
}

double domination_singleton_margin(int d, double eps) {
  const double p = site_conditional(0.0, d, eps).p_pin;
  const double s = std::sqrt(2.0 * d);
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  double margin = std::numeric_limits<double>::infinity();
  for (int i = -4000; i <= 4000; ++i) {
    const double x = i * 1e-3;
    const double fe = (x >= 0 ? p : 0.0) + (1 - p) * phi(x * s);
    const double fp = std::max(0.0, 2 * phi(x * s) - 1);
    margin = std::min(margin, fe - fp);
  }
  return margin;
}

} // namespace pgff
