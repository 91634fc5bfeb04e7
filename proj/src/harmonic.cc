#include "pgff/harmonic.hh"
#include "pgff/analytic.hh"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <stdexcept>

namespace pgff {

struct DirichletSystem::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                        Eigen::AMDOrdering<int>>
      ldlt;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
};

DirichletSystem::DirichletSystem(const Lattice &lat, Region region, bool force_iterative)
    : lat_(&lat), region_(std::move(region)), impl_(std::make_unique<Impl>()) {
  const std::size_t n = region_.size();
  local_.assign(lat.site_count(), -1);
  for (std::size_t k = 0; k < n; ++k) {
    const Site s = region_.sites[k];
    if (!lat.is_interior(s))
      throw std::invalid_argument("region contains a boundary site");
    local_[s] = static_cast<std::int64_t>(k);
  }
  const double w = 1.0 / static_cast<double>(lat.degree());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n * (lat.degree() + 1));
  for (std::size_t k = 0; k < n; ++k) {
    trips.emplace_back(k, k, 1.0);
    for (auto t : lat.neighbors(region_.sites[k]))
      if (t != no_site && local_[t] >= 0)
        trips.emplace_back(k, local_[t], -w);
  }
  m_.resize(n, n);
  m_.setFromTriplets(trips.begin(), trips.end());
  m_.makeCompressed();

  direct_ = !force_iterative && n <= direct_limit;
  if (n == 0)
    return;
  if (direct_) {
    impl_->ldlt.compute(m_);
    if (impl_->ldlt.info() != Eigen::Success)
      throw std::runtime_error("sparse LDLT factorisation failed");
  } else {
    tol_ = 1e-13;
    impl_->cg.setTolerance(tol_);
    impl_->cg.setMaxIterations(static_cast<Eigen::Index>(20 * n + 1000));
    impl_->cg.compute(m_);
  }
}

DirichletSystem::~DirichletSystem() = default;
DirichletSystem::DirichletSystem(DirichletSystem &&) noexcept = default;
DirichletSystem &DirichletSystem::operator=(DirichletSystem &&) noexcept = default;

Eigen::VectorXd DirichletSystem::solve(const Eigen::VectorXd &rhs) const {
  if (size() == 0)
    return {};
  if (direct_)
    return impl_->ldlt.solve(rhs);
  Eigen::VectorXd x = impl_->cg.solve(rhs);
  if (impl_->cg.info() != Eigen::Success) {
    throw std::runtime_error("conjugate gradients did not converge; residual " +
                             std::to_string(residual(x, rhs)));
  }
  return x;
}

double DirichletSystem::residual(const Eigen::VectorXd &x, const Eigen::VectorXd &rhs) const {
  if (size() == 0)
    return 0;
  return (m_ * x - rhs).lpNorm<Eigen::Infinity>();
}

std::vector<double> DirichletSystem::extend(const std::vector<double> &outside,
                                            double *res) const {
  const std::size_t n = size();
  const double w = 1.0 / static_cast<double>(lat_->degree());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < n; ++k)
    for (auto t : lat_->neighbors(region_.sites[k]))
      if (t != no_site && local_[t] < 0)
        rhs[k] += w * outside[t];
  const Eigen::VectorXd x = solve(rhs);
  if (res)
    *res = residual(x, rhs);
  std::vector<double> phi = outside;
  for (std::size_t k = 0; k < n; ++k)
    phi[region_.sites[k]] = x[k];
  return phi;
}

double DirichletSystem::logdet() const {
  if (!direct_)
    throw std::logic_error("logdet needs the direct factorisation");
  if (size() == 0)
    return 0;
  return impl_->ldlt.vectorD().array().log().sum();
}

HarmonicField solve_dirichlet(const Lattice &lat, const Region &region,
                              const std::vector<double> &boundary) {
  if (region.empty())
    throw std::invalid_argument("solve_dirichlet needs a nonempty region");
  if (boundary.size() != lat.site_count())
    throw std::invalid_argument("boundary data must cover every site");
  for (double v : boundary)
    if (!std::isfinite(v))
      throw std::invalid_argument("boundary data must be finite");
  DirichletSystem sys(lat, region);
  HarmonicField h;
  h.region = region;
  h.phi = sys.extend(boundary, &h.residual);
  h.energy = region_energy(lat, region, h.phi);
  return h;
}

double boundary_term(const Lattice &lat, const Region &region, const std::vector<double> &phi) {
  const auto in = region.mask(lat.site_count());
  double bt = 0;
  for (Site s : region.sites)
    for (auto t : lat.neighbors(s))
      if (t != no_site && !in[t])
        bt += phi[t] * (phi[t] - phi[s]);
  return 0.5 * bt;
}

GreensTable greens(const DirichletSystem &sys, Site source) {
  const auto k = sys.local(source);
  if (k < 0)
    throw std::invalid_argument("Green's function source must be an interior site");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.size());
  rhs[k] = 1.0;
  const Eigen::VectorXd x = sys.solve(rhs);
  GreensTable g;
  g.source = source;
  g.residual = sys.residual(x, rhs);
  g.values.assign(sys.lattice().site_count(), 0.0);
  for (std::size_t j = 0; j < sys.size(); ++j)
    g.values[sys.region().sites[j]] = x[j];
  return g;
}

GreensTable greens(const Lattice &lat, Site source) {
  if (source >= lat.site_count() || !lat.is_interior(source))
    throw std::invalid_argument("Green's function source must be an interior site");
  DirichletSystem sys(lat, full_interior(lat));
  return greens(sys, source);
}

std::vector<double> greens_diagonal_by_layer(const Lattice &cyl) {
  DirichletSystem sys(cyl, full_interior(cyl));
  std::vector<double> out;
  for (int i1 = 1; i1 < cyl.extent(0) - 1; ++i1) {
    const Site s = static_cast<Site>(i1 * cyl.layer_size());
    out.push_back(greens(sys, s)[s]);
  }
  return out;
}

ImageSum greens_image_sum(const Lattice &cyl, Site source, int K) {
  if (cyl.kind() != LatticeKind::cylinder)
    throw std::invalid_argument("image sum needs a cylinder lattice");
  if (K < 0)
    throw std::invalid_argument("image truncation K must be >= 0");
  const int d = cyl.dim();
  const int N = cyl.side();
  const Lattice slab = Lattice::slab(d, N, (2 * K + 1) * N);
  auto to_slab = [&](std::vector<int> c, std::span<const int> shift) {
    for (int a = 1; a < d; ++a)
      c[a] += 1 + (K + shift[a - 1]) * N;
    return slab.encode(c);
  };
  const std::vector<int> zero(std::max(d - 1, 1), 0);
  const Site src = static_cast<Site>(to_slab(cyl.decode(source), zero));
  DirichletSystem sys(slab, full_interior(slab));
  const GreensTable col = greens(sys, src);

  ImageSum out;
  out.residual = col.residual;
  out.slab_sites = slab.interior_count();
  out.values.assign(cyl.site_count(), 0.0);
  std::vector<int> shift(std::max(d - 1, 1), -K);
  for (Site j : cyl.interior()) {
    const auto c = cyl.decode(j);
    double s = 0;
    std::fill(shift.begin(), shift.end(), -K);
    while (true) {
      s += col[to_slab(c, shift)];
      int a = d - 2;
      for (; a >= 0; --a) {
        if (++shift[a] <= K)
          break;
        shift[a] = -K;
      }
      if (a < 0)
        break;
    }
    out.values[j] = s;
  }
  return out;
}

CapacityResult capacity(const Lattice &lat, const Region &a) {
  CapacityResult r;
  if (a.empty())
    return r;
  for (Site s : a.sites)
    if (!lat.is_interior(s))
      throw std::invalid_argument("capacity set must lie in the interior");
  std::vector<double> u(lat.site_count(), 1.0);
  for (Site s : lat.interior())
    u[s] = 0.0;
  const Region rest = region_difference(full_interior(lat), a);
  if (!rest.empty()) {
    DirichletSystem sys(lat, rest);
    u = sys.extend(u, &r.residual);
  }
  const double w = 1.0 / static_cast<double>(lat.degree());
  for (Site s : a.sites) {
    double e = 0;
    for (auto t : lat.neighbors(s))
      e += w * u[t];
    r.escape.push_back(e);
    r.value += e;
  }
  return r;
}

MesoEnergy meso_energy(const Lattice &lat, const Region &b_region, double a, double b,
                       double xi, double beta) {
  if (lat.kind() != LatticeKind::cylinder)
    throw std::invalid_argument("meso_energy needs a cylinder lattice");
  const double N = lat.side();
  const int d = lat.dim();
  MesoEnergy e;
  std::vector<double> bc = boundary_values(lat, a * N, b * N);
  if (b_region.empty()) {
    e.field.phi = bc;
  } else {
    e.field = solve_dirichlet(lat, b_region, bc);
  }
  e.field.region = b_region;
  e.e_n0 = hamiltonian(lat, e.field.phi);
  const double pinned = static_cast<double>(lat.interior_count() - b_region.size());
  e.e_n = e.e_n0 - xi * pinned;
  e.reference = std::pow(N, d) * sigma_min({a, b, xi});
  e.e_star = e.e_n - e.reference;
  e.gap_bound = xi * d * std::pow(N, d - beta);
  return e;
}

} // namespace pgff
