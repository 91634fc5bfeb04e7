#pragma once

#include "pgff/field.hh"
#include "pgff/lattice.hh"
#include "pgff/util.hh"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pgff {

struct SiteConditional {
  double p_pin = 0;
  double mean = 0;
  double variance = 0;
};

/// Law of one site given the sum S of its 2d neighbours: an atom at 0 with
/// probability p_pin, otherwise Normal(S/2d, 1/2d).
SiteConditional site_conditional(double neighbour_sum, int d, double eps);

enum class Schedule { sequential, checkerboard };
Schedule parse_schedule(const std::string &s);

/// Resamples every interior site once. Draws are keyed by (seed, sweep, site),
/// so the checkerboard schedule gives the same result for any thread count.
void sweep(const Lattice &lat, FieldState &st, double eps,
           Schedule schedule = Schedule::checkerboard, int threads = 1);

struct ChainConfig {
  long sweeps = 10000; ///< total, including burn-in
  long burn_in = 1000;
  long thinning = 10;
  std::uint64_t seed = 1;
  Schedule schedule = Schedule::checkerboard;
  int threads = 1;
  double xi = 0;       ///< xi used for the pinned reference profile; 0 = critical
  InitKind init = InitKind::zero;
};

struct TrajectoryRow {
  long sweep = 0;
  double pinned_fraction = 0;
  double l1_to_hhat = 0; ///< NaN when the pinned profile does not exist
  double l1_to_hbar = 0;
  bool omega_plus = false;
  double energy = 0;
};

struct ChainResult {
  std::vector<TrajectoryRow> rows;
  FieldState final;
  double hhat_preference = 0;     ///< post burn-in fraction with l1_to_hhat < l1_to_hbar
  double hhat_preference_se = 0;
  double rhat_pinned = 0;         ///< split-chain diagnostic
  double rhat_l1 = 0;
};

/// Called on every recorded sweep.
using ChainObserver = std::function<void(const FieldState &, const TrajectoryRow &)>;

ChainResult run_chain(const Lattice &lat, double a, double b, double eps,
                      const ChainConfig &cfg, const ChainObserver &observer = {});
/// Continues from a given state (its seed and sweep counter are kept).
ChainResult run_chain(const Lattice &lat, FieldState start, double eps,
                      const ChainConfig &cfg, const ChainObserver &observer = {});

/// Exact law of the pinned field on a handful of sites, by enumerating all
/// pinning patterns.
struct TinyExact {
  std::vector<Site> sites;
  std::vector<double> boundary;     ///< full lattice vector
  std::vector<double> subset_prob;  ///< per mask, bit k set = site k free
  std::vector<Eigen::VectorXd> subset_mean; ///< mean of the free sites
  std::vector<Eigen::MatrixXd> subset_chol; ///< Cholesky factor of their covariance
  std::vector<double> pin_prob;     ///< per site
  std::vector<double> mean;         ///< E phi_i
  std::vector<double> mean_free;    ///< E[phi_i | i free]
  std::vector<double> second_free;  ///< E[phi_i^2 | i free]

  /// One exact draw; values in `sites` order.
  std::vector<double> draw(KeyedRng &rng) const;
};

inline constexpr std::size_t max_tiny_sites = 12;

TinyExact exact_tiny(const Lattice &lat, const Region &a, const std::vector<double> &boundary,
                     double eps);
/// Full interior of a lattice with at most six interior sites.
TinyExact exact_tiny_sampler(const Lattice &lat, double a, double b, double eps);

struct DominationReport {
  std::size_t samples = 0;       ///< per law
  std::size_t proposals = 0;     ///< rejection proposals
  double acceptance = 0;
  double worst_sigma = 0;        ///< most negative (F_eps - F_plus) / sigma over sites and x
  std::size_t checks = 0;
  bool pass = false;
};

/// Compares per-site CDFs of the pinned law (exact draws) with the free law
/// conditioned on phi >= 0 (rejection sampling); pass when
/// F_eps(x) >= F_plus(x) - 3 sigma everywhere.
DominationReport domination_check(const Lattice &lat, const Region &a,
                                  const std::vector<double> &boundary, double eps,
                                  std::size_t samples, std::uint64_t seed);

/// Singleton with zero neighbours: both CDFs in closed form; returns
/// min_x (F_eps(x) - F_plus(x)) over a fine grid.
double domination_singleton_margin(int d, double eps);

} // namespace pgff
