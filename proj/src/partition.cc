#include "pgff/partition.hh"
#include "pgff/field.hh"
#include "pgff/harmonic.hh"
#include "pgff/sampler.hh"
#include "pgff/util.hh"

#include <Eigen/Eigenvalues>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pgff {

std::string to_string(PartitionMethod m) {
  switch (m) {
  case PartitionMethod::logdet: return "logdet";
  case PartitionMethod::loop_sum: return "loop-sum";
  case PartitionMethod::brute_force: return "brute-force";
  case PartitionMethod::thermo_integration: return "thermo-integration";
  }
  return "?";
}

namespace {

double half_log_pi_over_d(int d) { return 0.5 * std::log(pi / d); }

// Perron root bound for a nonnegative symmetric matrix: max_i (P x)_i / x_i
// for a positive x, here the (absolute) top eigenvector.
double perron_upper_bound(const Eigen::SparseMatrix<double> &p) {
  const Eigen::Index m = p.rows();
  if (m == 1)
    return 0.0;
  Eigen::VectorXd x;
  if (m <= 1500) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(p), Eigen::ComputeEigenvectors);
    x = es.eigenvectors().col(m - 1).cwiseAbs();
  }
  if (x.size() == 0 || x.minCoeff() <= 1e-280) {
    x = Eigen::VectorXd::Ones(m);
    for (int it = 0; it < 20000; ++it) {
      Eigen::VectorXd y = 0.5 * (x + p * x);
      x = y / y.maxCoeff();
    }
  }
  const Eigen::VectorXd px = p * x;
  double rho = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    rho = std::max(rho, px[i] / x[i]);
  return rho;
}

} // namespace

LogPartition log_partition_free(const Lattice &lat, const Region &a) {
  LogPartition out;
  out.method = PartitionMethod::logdet;
  if (a.empty())
    return out;
  const double c = half_log_pi_over_d(lat.dim());
  for (const Region &comp : components(lat, a)) {
    DirichletSystem sys(lat, comp);
    out.value += c * static_cast<double>(comp.size()) - 0.5 * sys.logdet();
  }
  out.terms = 1;
  return out;
}

LogPartition log_partition_loop_sum(const Lattice &lat, const Region &a,
                                    const LoopSumOptions &opt) {
  LogPartition out;
  out.method = PartitionMethod::loop_sum;
  if (a.empty())
    return out;
  const double total = static_cast<double>(a.size());
  double loops = 0, tail = 0;
  for (const Region &comp : components(lat, a)) {
    const std::size_t m = comp.size();
    if (m > opt.max_component)
      throw std::invalid_argument("loop sum: component of " + std::to_string(m) +
                                  " sites exceeds limit");
    DirichletSystem sys(lat, comp);
    Eigen::SparseMatrix<double> id(m, m);
    id.setIdentity();
    const Eigen::SparseMatrix<double> p = id - sys.matrix();
    const double rho = perron_upper_bound(p);
    if (!(rho < 1))
      throw std::runtime_error("loop sum: spectral radius bound is not below 1");
    // tail bound on the walk sum I for this component
    const double budget = 2.0 * opt.target * static_cast<double>(m) / total;
    const double r2 = rho * rho;
    Eigen::MatrixXd y = Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd z(m, m);
    double comp_tail = 0;
    long k = 0;
    while (true) {
      z.noalias() = p * y;
      y.swap(z);
      ++k;
      if (k % 2 != 0)
        continue;
      const double tr = y.trace();
      loops += tr / static_cast<double>(k);
      const long n = k / 2;
      comp_tail = tr * r2 / ((1 - r2) * 2.0 * static_cast<double>(n + 1));
      if (comp_tail <= budget)
        break;
      if (k >= opt.max_steps)
        throw std::runtime_error("loop sum: tail bound not reached within max_steps");
    }
    tail += comp_tail;
    out.terms = std::max(out.terms, k);
  }
  out.value = half_log_pi_over_d(lat.dim()) * total + 0.5 * loops;
  out.error_budget = 0.5 * tail;
  return out;
}

LogPartition log_partition_boundary(const Lattice &lat, const Region &a, double alpha,
                                    double beta) {
  LogPartition out = log_partition_free(lat, a);
  if (a.empty())
    return out;
  std::vector<double> psi(lat.site_count(), beta);
  for (std::size_t s = 0; s < psi.size(); ++s)
    if (lat.side_of(s) == BoundarySide::left)
      psi[s] = alpha;
  const HarmonicField h = solve_dirichlet(lat, a, psi);
  out.shift = -h.energy;
  out.value += out.shift;
  return out;
}

GaussianBlock gaussian_block(const Lattice &lat, const std::vector<Site> &sites,
                             const std::vector<double> &outside, bool with_cov) {
  GaussianBlock g;
  const std::size_t n = sites.size();
  if (n == 0)
    return g;
  auto local = [&sites](std::int64_t s) -> std::int64_t {
    auto it = std::lower_bound(sites.begin(), sites.end(), static_cast<Site>(s));
    return (it != sites.end() && *it == static_cast<Site>(s)) ? it - sites.begin() : -1;
  };
  const double w = 1.0 / static_cast<double>(lat.degree());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (auto t : lat.neighbors(sites[k])) {
      if (t == no_site)
        continue;
      const auto j = local(t);
      if (j >= 0)
        m(k, j) -= w;
      else
        rhs[k] += w * outside[t];
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("dense Cholesky failed");
  const Eigen::MatrixXd l = llt.matrixL();
  double logdet = 0;
  for (std::size_t k = 0; k < n; ++k)
    logdet += 2 * std::log(l(k, k));
  g.log_z = half_log_pi_over_d(lat.dim()) * static_cast<double>(n) - 0.5 * logdet;
  g.mean = llt.solve(rhs);
  if (with_cov)
    g.cov = llt.solve(Eigen::MatrixXd::Identity(n, n)) * w;
  return g;
}

PinExpansion pin_expansion(const Lattice &lat, const Region &a,
                           const std::vector<double> &boundary, double eps, int threads) {
  if (eps < 0)
    throw std::invalid_argument("eps must be >= 0");
  const std::size_t n = a.size();
  if (n > max_bruteforce_sites)
    throw std::invalid_argument("pinning expansion over " + std::to_string(n) +
                                " sites: at most " + std::to_string(max_bruteforce_sites) +
                                " supported (2^|A| subsets)");
  PinExpansion ex;
  ex.sites = a.sites;
  const std::size_t count = std::size_t{1} << n;
  ex.log_weight.assign(count, 0.0);
  const double log_eps = std::log(eps);
  parallel_for(count, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> phi;
    std::vector<Site> free;
    for (std::size_t mask = lo; mask < hi; ++mask) {
      phi = boundary;
      free.clear();
      for (std::size_t k = 0; k < n; ++k) {
        if ((mask >> k) & 1u)
          free.push_back(ex.sites[k]);
        else
          phi[ex.sites[k]] = 0.0;
      }
      const std::size_t pinned = n - free.size();
      if (pinned > 0 && eps == 0) {
        ex.log_weight[mask] = -std::numeric_limits<double>::infinity();
        continue;
      }
      const GaussianBlock g = gaussian_block(lat, free, phi);
      for (std::size_t k = 0; k < free.size(); ++k)
        phi[free[k]] = g.mean[k];
      ex.log_weight[mask] = (pinned > 0 ? static_cast<double>(pinned) * log_eps : 0.0) +
                            g.log_z - region_energy(lat, a, phi);
    }
  });
  ex.log_z = log_sum_exp(ex.log_weight);
  return ex;
}

LogPartition log_partition_pinned_bruteforce(const Lattice &lat, const Region &a, double eps,
                                             int threads) {
  LogPartition out;
  out.method = PartitionMethod::brute_force;
  if (a.empty())
    return out;
  const PinExpansion ex =
      pin_expansion(lat, a, std::vector<double>(lat.site_count(), 0.0), eps, threads);
  out.value = ex.log_z;
  out.terms = static_cast<long>(ex.log_weight.size());
  return out;
}

std::vector<double> return_probabilities(int d, int period, int n_max) {
  if (d < 1 || n_max < 0)
    throw std::invalid_argument("return_probabilities needs d >= 1, n_max >= 0");
  if (period < 0 || period == 1)
    throw std::invalid_argument("period must be 0 (infinite) or >= 2");
  const int steps = 2 * n_max;

  // one-dimensional return probabilities after m = 0..steps steps
  auto one_dim = [steps](int per) {
    std::vector<double> ret(steps + 1);
    const int size = per == 0 ? 2 * steps + 3 : per;
    const int origin = per == 0 ? steps + 1 : 0;
    std::vector<double> cur(size, 0.0), nxt(size);
    cur[origin] = 1.0;
    ret[0] = 1.0;
    for (int m = 1; m <= steps; ++m) {
      for (int x = 0; x < size; ++x) {
        const int l = per == 0 ? x - 1 : (x - 1 + per) % per;
        const int r = per == 0 ? x + 1 : (x + 1) % per;
        nxt[x] = 0.5 * ((l >= 0 ? cur[l] : 0.0) + (r < size ? cur[r] : 0.0));
      }
      cur.swap(nxt);
      ret[m] = cur[origin];
    }
    return ret;
  };

  const std::vector<double> line = one_dim(0);
  const std::vector<double> ring = period == 0 ? line : one_dim(period);
  std::vector<double> acc = line, next(steps + 1);
  for (int j = 2; j <= d; ++j) {
    const double lp = std::log(1.0 / j), lq = std::log((j - 1.0) / j);
    for (int k = 0; k <= steps; ++k) {
      double s = 0;
      for (int m = 0; m <= k; ++m) {
        if (ring[m] == 0 || acc[k - m] == 0)
          continue;
        const double lb = std::lgamma(k + 1.0) - std::lgamma(m + 1.0) - std::lgamma(k - m + 1.0) +
                          m * lp + (k - m) * lq;
        s += std::exp(lb) * ring[m] * acc[k - m];
      }
      next[k] = s;
    }
    acc.swap(next);
  }
  std::vector<double> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n)
    out[n] = acc[2 * n];
  return out;
}

namespace {

struct BesselIntegrand {
  int d;
  bool subtract;
};

double bessel_integrand(double t, void *params) {
  const auto *p = static_cast<const BesselIntegrand *>(params);
  const double g = std::pow(gsl_sf_bessel_I0_scaled(t / p->d), p->d);
  if (!p->subtract)
    return g;
  if (t < 1e-6)
    return t / (4.0 * p->d);
  return (g - std::exp(-t)) / t;
}

Quadrature integrate_bessel(int d, bool subtract) {
  gsl_set_error_handler_off();
  gsl_integration_workspace *ws = gsl_integration_workspace_alloc(2000);
  BesselIntegrand par{d, subtract};
  gsl_function f{&bessel_integrand, &par};
  Quadrature q;
  const int status = gsl_integration_qagiu(&f, 0.0, 1e-13, 1e-11, 2000, ws, &q.value, &q.error);
  gsl_integration_workspace_free(ws);
  if (status != GSL_SUCCESS && q.error > 1e-8)
    throw std::runtime_error(std::string("walk-constant quadrature failed: ") +
                             gsl_strerror(status));
  return q;
}

} // namespace

Quadrature loop_constant_q(int d) {
  if (d < 1)
    throw std::invalid_argument("q needs d >= 1");
  return integrate_bessel(d, true);
}

Quadrature green_origin(int d) {
  if (d < 3)
    throw std::invalid_argument("G(0,0) is finite only for d >= 3");
  return integrate_bessel(d, false);
}

Quadrature loop_constant_qN(int d, int N) {
  if (d < 1 || N < 2)
    throw std::invalid_argument("qN needs d >= 1, N >= 2");
  const double b = 1.0 / d;
  auto lg = [b](double a) { return std::log(0.5 * (a + std::sqrt(std::max(0.0, a * a - b * b)))); };
  std::vector<int> k(std::max(d - 1, 0), 0);
  double sum = 0;
  std::size_t count = 0;
  while (true) {
    double c = 0;
    for (int v : k)
      c += std::cos(2 * pi * v / N);
    c /= d;
    sum += lg(1 - c) + lg(1 + c);
    ++count;
    int a = static_cast<int>(k.size()) - 1;
    for (; a >= 0; --a) {
      if (++k[a] < N)
        break;
      k[a] = 0;
    }
    if (a < 0)
      break;
  }
  Quadrature q;
  q.value = -0.5 * sum / static_cast<double>(count);
  q.error = 1e-14 * std::abs(q.value) + 1e-15;
  return q;
}

WalkConstants walk_constants(int d, int N, int n_max, std::size_t mc_samples,
                             std::uint64_t seed, int threads) {
  WalkConstants w;
  w.d = d;
  w.N = N;
  const Quadrature q = loop_constant_q(d);
  w.q = q.value;
  w.q_err = q.error;
  const Quadrature qn = loop_constant_qN(d, N);
  w.qN = qn.value;
  w.qN_err = qn.error;
  w.qhat0 = 0.5 * (std::log(pi / d) + w.q);
  const Lattice cyl = build_lattice(d, N, LatticeKind::cylinder);
  const auto diag = greens_diagonal_by_layer(cyl);
  w.cN = *std::max_element(diag.begin(), diag.end());
  if (d < 3) {
    w.g00 = std::numeric_limits<double>::infinity();
    return w;
  }
  const Quadrature g = green_origin(d);
  w.g00 = g.value;
  w.g00_err = g.error;
  if (mc_samples == 0 || n_max < 1)
    return w;

  w.n_r = n_max;
  w.mc_samples = mc_samples;
  const auto ret = return_probabilities(d, 0, n_max);
  double partial = 0;
  for (double p : ret)
    partial += p;
  w.r_tail = std::max(0.0, 0.5 * (w.g00 + w.g00_err - partial));

  std::vector<double> xs(mc_samples);
  const int steps = 2 * n_max;
  parallel_for(mc_samples, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<int> pos(d);
    for (std::size_t i = lo; i < hi; ++i) {
      KeyedRng rng(seed, 0x5241, i);
      std::fill(pos.begin(), pos.end(), 0);
      int running_max = 0, nonzero = 0;
      double x = 0;
      for (int m = 1; m <= steps; ++m) {
        const std::uint64_t u = rng() % static_cast<std::uint64_t>(2 * d);
        const int axis = static_cast<int>(u >> 1);
        const int before = pos[axis];
        pos[axis] += (u & 1u) ? -1 : 1;
        nonzero += (pos[axis] != 0) - (before != 0);
        running_max = std::max(running_max, std::abs(pos[axis]));
        if (m % 2 == 0 && nonzero == 0)
          x += static_cast<double>(running_max) / m;
      }
      xs[i] = x;
    }
  });
  const MeanSE r = iid_mean(xs);
  w.r_hat = r.mean;
  w.r_se = r.se;
  w.r_upper = w.r_hat + w.r_tail;
  w.margin = w.g00 - w.r_upper;
  w.margin_se = w.r_se;
  return w;
}

std::pair<double, double> xi_window(int d, double eps, double gap) {
  const double qhat0 = 0.5 * (std::log(pi / d) + loop_constant_q(d).value);
  return {std::log(eps) - qhat0 - gap, std::log(2 * eps) + gap};
}

namespace {

void fill_window(FreeEnergyEstimate &f) {
  const double box = std::pow(f.ell, f.d);
  const double surface = 2.0 * f.d * std::pow(f.ell, f.d - 1);
  f.gap = f.d >= 3 ? green_origin(f.d).value / 4.0 * surface / box
                   : std::numeric_limits<double>::infinity();
  if (f.eps > 0) {
    const auto [lo, hi] = xi_window(f.d, f.eps, f.gap);
    f.window_lo = lo;
    f.window_hi = hi;
  }
}

} // namespace

FreeEnergyEstimate xi_bruteforce(int d, int ell, double eps) {
  if (d < 1 || ell < 1)
    throw std::invalid_argument("xi_bruteforce needs d, ell >= 1");
  const Lattice box = Lattice::free_box(d, ell);
  const Region all = full_interior(box);
  if (all.size() > max_bruteforce_sites)
    throw std::invalid_argument("xi_bruteforce: box has " + std::to_string(all.size()) +
                                " sites, at most 20 supported");
  const PinExpansion ex =
      pin_expansion(box, all, std::vector<double>(box.site_count(), 0.0), eps);
  FreeEnergyEstimate f;
  f.d = d;
  f.ell = ell;
  f.eps = eps;
  f.method = PartitionMethod::brute_force;
  f.xi_hat = (ex.log_z - ex.log_weight.back()) / static_cast<double>(all.size());
  fill_window(f);
  return f;
}

FreeEnergyEstimate xi_thermo_integration(int d, int ell, double eps, const ThermoOptions &opt) {
  if (d < 1 || ell < 1)
    throw std::invalid_argument("xi_thermo_integration needs d, ell >= 1");
  if (eps < 0)
    throw std::invalid_argument("eps must be >= 0");
  if (opt.sweeps < 2 || opt.burn_in < 0 || opt.nodes_per_unit <= 0)
    throw std::invalid_argument("invalid thermodynamic-integration budget");
  const Lattice box = Lattice::free_box(d, ell);
  if (box.interior_count() > 4096)
    throw std::invalid_argument("xi_thermo_integration: box larger than 4096 sites");
  const double volume = static_cast<double>(box.interior_count());

  FreeEnergyEstimate f;
  f.d = d;
  f.ell = ell;
  f.eps = eps;
  f.method = PartitionMethod::thermo_integration;
  fill_window(f);
  if (eps == 0)
    return f;

  const double eps_min = opt.eps_min > 0 ? opt.eps_min : 1e-3 * std::sqrt(pi / d);
  const double u0 = std::log(std::min(eps, eps_min));
  const double span = std::log(eps) - u0;
  long k_nodes = std::max<long>(2, static_cast<long>(std::ceil(span * opt.nodes_per_unit)));
  if (k_nodes % 2)
    ++k_nodes;
  const double h = span / k_nodes;

  FieldState st = make_state(box, 0, 0, opt.seed);
  std::vector<double> counts(opt.sweeps);
  for (long k = 0; k <= k_nodes; ++k) {
    const double u = u0 + k * h;
    const double e = std::exp(u);
    for (long s = 0; s < opt.burn_in; ++s)
      sweep(box, st, e, Schedule::checkerboard, opt.threads);
    for (long s = 0; s < opt.sweeps; ++s) {
      sweep(box, st, e, Schedule::checkerboard, opt.threads);
      std::size_t c = 0;
      for (Site site : box.interior())
        c += st.pinned[site];
      counts[s] = static_cast<double>(c);
    }
    const MeanSE m = batch_means(counts);
    f.log_eps.push_back(u);
    f.count_mean.push_back(m.mean);
    f.count_se.push_back(m.se);
  }

  f.remainder = f.count_mean.front();
  f.remainder_bound = volume * std::sqrt(d / pi) * std::exp(u0);
  double trap = 0, var = 0;
  f.xi_cumulative.push_back(f.remainder / volume);
  for (long k = 1; k <= k_nodes; ++k) {
    trap += 0.5 * h * (f.count_mean[k - 1] + f.count_mean[k]);
    f.xi_cumulative.push_back((f.remainder + trap) / volume);
  }
  double coarse = 0;
  for (long k = 2; k <= k_nodes; k += 2)
    coarse += h * (f.count_mean[k - 2] + f.count_mean[k]);
  for (long k = 0; k <= k_nodes; ++k) {
    const double wk = (k == 0 || k == k_nodes) ? 0.5 * h : h;
    var += wk * wk * f.count_se[k] * f.count_se[k];
  }
  f.discretisation = std::abs(trap - coarse) / 3.0 / volume;
  f.statistical_se = std::sqrt(var + f.count_se[0] * f.count_se[0]) / volume;
  f.xi_hat = f.xi_cumulative.back();
  f.half_width = 2.0 * f.statistical_se + f.discretisation;
  return f;
}

} // namespace pgff
