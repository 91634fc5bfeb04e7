#pragma once

#include "pgff/field.hh"
#include "pgff/lattice.hh"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>
#include <vector>

namespace pgff {

/// The operator I - P restricted to a region, with P(i,j) = (#slots i->j)/2d.
/// Factorised once (sparse LDLT) when the region has at most `direct_limit`
/// sites, otherwise solved by conjugate gradients.
class DirichletSystem {
public:
  static constexpr std::size_t direct_limit = 100000;

  DirichletSystem(const Lattice &lat, Region region, bool force_iterative = false);
  ~DirichletSystem();
  DirichletSystem(DirichletSystem &&) noexcept;
  DirichletSystem &operator=(DirichletSystem &&) noexcept;

  const Lattice &lattice() const { return *lat_; }
  const Region &region() const { return region_; }
  std::size_t size() const { return region_.size(); }
  /// Position of `site` in the region, or -1.
  std::int64_t local(std::size_t site) const { return local_[site]; }
  const Eigen::SparseMatrix<double> &matrix() const { return m_; }
  bool direct() const { return direct_; }
  double tolerance() const { return tol_; }

  Eigen::VectorXd solve(const Eigen::VectorXd &rhs) const;
  /// Harmonic extension into the region of the values `outside` (read at
  /// every site not in the region). Returns the full field.
  std::vector<double> extend(const std::vector<double> &outside, double *residual = nullptr) const;
  /// log det(I - P) from the LDLT factor; throws for iterative systems.
  double logdet() const;
  double residual(const Eigen::VectorXd &x, const Eigen::VectorXd &rhs) const;

private:
  struct Impl;
  const Lattice *lat_;
  Region region_;
  std::vector<std::int64_t> local_;
  Eigen::SparseMatrix<double> m_;
  bool direct_ = true;
  double tol_ = 1e-12;
  std::unique_ptr<Impl> impl_;
};

struct HarmonicField {
  Region region;
  std::vector<double> phi; ///< full lattice vector
  double energy = 0;       ///< bonds touching the region
  double residual = 0;     ///< max-norm residual of the linear system
};

/// Harmonic in `region`, equal to `boundary` at every other site.
HarmonicField solve_dirichlet(const Lattice &lat, const Region &region,
                              const std::vector<double> &boundary);

/// (1/2) sum over boundary pairs (i in A, j outside) of psi_j (psi_j - phi_i).
double boundary_term(const Lattice &lat, const Region &region, const std::vector<double> &phi);

struct GreensTable {
  Site source = 0;
  std::vector<double> values; ///< G(source, .) over all sites, 0 off the region
  double residual = 0;
  double operator[](std::size_t site) const { return values[site]; }
};

/// Column of the Green's function of the walk killed outside the interior.
GreensTable greens(const Lattice &lat, Site source);
GreensTable greens(const DirichletSystem &sys, Site source);

/// G_N(k, k) for one site in every layer i1 = 1..N-1 (index i1 - 1).
std::vector<double> greens_diagonal_by_layer(const Lattice &cylinder);

struct ImageSum {
  std::vector<double> values; ///< cylinder-sized column
  double residual = 0;
  std::size_t slab_sites = 0;
};

/// Green's column on the cylinder rebuilt from a slab of transverse width
/// (2K+1) N by summing over the transverse translates |k|_inf <= K.
ImageSum greens_image_sum(const Lattice &cylinder, Site source, int K);

struct CapacityResult {
  double value = 0;
  std::vector<double> escape; ///< per site of A, in A's order
  double residual = 0;
};

CapacityResult capacity(const Lattice &lat, const Region &a);

struct MesoEnergy {
  double e_n0 = 0;      ///< energy of the harmonic field vanishing off B
  double e_n = 0;       ///< e_n0 - xi |B^c|
  double reference = 0; ///< N^d min Sigma
  double e_star = 0;    ///< e_n - reference
  double gap_bound = 0; ///< xi d N^{d - beta}
  HarmonicField field;
};

MesoEnergy meso_energy(const Lattice &lat, const Region &b_region, double a, double b,
                       double xi, double beta = 0.5);

} // namespace pgff
