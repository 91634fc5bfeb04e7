#pragma once

#include "pgff/lattice.hh"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace pgff {

enum class PartitionMethod { logdet, loop_sum, brute_force, thermo_integration };
std::string to_string(PartitionMethod m);

struct LogPartition {
  double value = 0;
  PartitionMethod method = PartitionMethod::logdet;
  double error_budget = 0; ///< bound on |value - exact| from truncation
  double shift = 0;        ///< boundary-condition shift (log_partition_boundary)
  long terms = 0;          ///< loop-sum steps or enumerated subsets
};

/// log Z_A^0 = (|A|/2) log(pi/d) - (1/2) log det(I - P_A), summed over the
/// connected components of A. Empty A gives 0.
LogPartition log_partition_free(const Lattice &lat, const Region &a);

struct LoopSumOptions {
  double target = 1e-7;           ///< bound on the discarded tail of log Z
  long max_steps = 1000000;       ///< cap on 2 n_max
  std::size_t max_component = 2000;
};

/// Same quantity from the loop expansion (1/2) sum_n tr(P^{2n}) / (2n),
/// truncated once a Collatz-Wielandt bound on the tail drops below target.
LogPartition log_partition_loop_sum(const Lattice &lat, const Region &a,
                                    const LoopSumOptions &opt = {});

/// log Z_A with the left boundary at alpha and every other site outside A at
/// beta; value = log Z_A^0 + shift with shift = -H(harmonic extension).
LogPartition log_partition_boundary(const Lattice &lat, const Region &a, double alpha,
                                    double beta);

/// Gaussian integral over the free sites `sites` with all other sites fixed
/// at `outside`: log normaliser, mean and (optionally) covariance.
struct GaussianBlock {
  double log_z = 0;   ///< (n/2) log(pi/d) - (1/2) log det(I - P)
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov; ///< (1/2d)(I - P)^{-1}, filled on request
};
GaussianBlock gaussian_block(const Lattice &lat, const std::vector<Site> &sites,
                             const std::vector<double> &outside, bool with_cov = false);

/// Log weights of the pinning expansion over A: for every mask (bit k set =
/// k-th site of A free) the weight eps^{#pinned} Z_free e^{-H(mean field)},
/// energy over bonds touching A.
struct PinExpansion {
  std::vector<Site> sites;
  std::vector<double> log_weight;
  double log_z = 0;
};
PinExpansion pin_expansion(const Lattice &lat, const Region &a,
                           const std::vector<double> &boundary, double eps,
                           int threads = 1);

inline constexpr std::size_t max_bruteforce_sites = 20;

LogPartition log_partition_pinned_bruteforce(const Lattice &lat, const Region &a, double eps,
                                             int threads = 1);

/// P(eta_{2n} = 0), n = 0..n_max, for the walk on Z x (Z / period)^{d-1}
/// (period 0 means Z^d), by convolving one-dimensional walks.
std::vector<double> return_probabilities(int d, int period, int n_max);

struct Quadrature {
  double value = 0;
  double error = 0;
};
/// sum_n P_{2n}(0) / (2n) on Z^d.
Quadrature loop_constant_q(int d);
/// Same on Z x T_N^{d-1}, an exact finite sum over the dual torus.
Quadrature loop_constant_qN(int d, int N);
/// G(0,0) on Z^d, d >= 3.
Quadrature green_origin(int d);

struct WalkConstants {
  int d = 0;
  int N = 0;
  double q = 0, q_err = 0;
  double qN = 0, qN_err = 0;
  double g00 = 0, g00_err = 0;
  double qhat0 = 0;
  double cN = 0;
  int n_r = 0;                 ///< walk horizon 2 n_r for r
  std::size_t mc_samples = 0;
  double r_hat = 0, r_se = 0;  ///< Monte Carlo part, n <= n_r
  double r_tail = 0;           ///< bound on the n > n_r part
  double r_upper = 0;          ///< r_hat + r_tail
  double margin = 0;           ///< g00 - r_upper
  double margin_se = 0;
};

WalkConstants walk_constants(int d, int N, int n_max, std::size_t mc_samples,
                             std::uint64_t seed = 1, int threads = 1);

struct FreeEnergyEstimate {
  double xi_hat = 0;
  int ell = 0;
  int d = 0;
  double eps = 0;
  PartitionMethod method = PartitionMethod::brute_force;
  double half_width = 0; ///< statistical + discretisation
  double gap = 0;        ///< (g00/4) |boundary| / |box|
  double window_lo = 0;  ///< log eps - qhat0 - gap
  double window_hi = 0;  ///< log 2 eps + gap
  // thermodynamic integration only
  std::vector<double> log_eps;     ///< nodes
  std::vector<double> count_mean;  ///< E[#pinned] per node
  std::vector<double> count_se;
  std::vector<double> xi_cumulative; ///< xi_hat at each node
  double remainder = 0;       ///< contribution below the first node
  double remainder_bound = 0;
  double discretisation = 0;
  double statistical_se = 0;
};

FreeEnergyEstimate xi_bruteforce(int d, int ell, double eps);

struct ThermoOptions {
  double nodes_per_unit = 10;
  double eps_min = 0; ///< 0: 1e-3 sqrt(pi/d)
  long burn_in = 1000;
  long sweeps = 20000;
  std::uint64_t seed = 1;
  int threads = 1;
};

FreeEnergyEstimate xi_thermo_integration(int d, int ell, double eps,
                                         const ThermoOptions &opt = {});

/// [log eps - qhat0 - gap, log 2 eps + gap].
std::pair<double, double> xi_window(int d, double eps, double gap);

} // namespace pgff
