#include "pgff/harmonic.hh"
#include "pgff/analytic.hh"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace pgff;

namespace {

// dense (I - P)^{-1} over the whole interior, built straight from the neighbour table
Eigen::MatrixXd dense_green(const Lattice &lat) {
  const auto in = lat.interior();
  std::vector<int> pos(lat.site_count(), -1);
  for (std::size_t k = 0; k < in.size(); ++k)
    pos[in[k]] = static_cast<int>(k);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(in.size(), in.size());
  for (std::size_t k = 0; k < in.size(); ++k)
    for (auto t : lat.neighbors(in[k]))
      if (t != no_site && pos[t] >= 0)
        m(k, pos[t]) -= 1.0 / lat.degree();
  return m.inverse();
}

} // namespace

TEST_CASE("harmonic extension of constant boundary slopes is linear") {
  const Lattice lat = Lattice::cylinder(3, 8);
  const HarmonicField h = solve_dirichlet(lat, full_interior(lat), boundary_values(lat, 8, 4));
  CHECK(h.residual < 1e-12);
  for (Site s : lat.interior())
    CHECK(h.phi[s] == doctest::Approx(8 - 0.5 * lat.coord(s, 0)).epsilon(1e-12));
  // N^d (a - b)^2 / 2 with a = 1, b = 1/2
  CHECK(h.energy == doctest::Approx(512 * 0.125).epsilon(1e-12));
}

TEST_CASE("harmonic energy equals the boundary term") {
  const Lattice lat = Lattice::cylinder(3, 6);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 3);
  std::vector<double> bc(lat.site_count());
  for (auto &v : bc)
    v = u(rng);
  const Region a = layer_band(lat, 2, 4);
  const HarmonicField h = solve_dirichlet(lat, a, bc);
  CHECK(h.energy == doctest::Approx(boundary_term(lat, a, h.phi)).epsilon(1e-10));
}

TEST_CASE("Green's function against a dense inverse") {
  const Lattice lat = Lattice::cylinder(3, 4);
  const Eigen::MatrixXd g = dense_green(lat);
  const auto in = lat.interior();
  for (std::size_t k : {0ul, 7ul, 20ul, 47ul}) {
    const GreensTable col = greens(lat, in[k]);
    for (std::size_t j = 0; j < in.size(); ++j)
      CHECK(col[in[j]] == doctest::Approx(g(j, k)).epsilon(1e-12));
  }
}

TEST_CASE("Green's function is symmetric and iterative solves agree") {
  const Lattice lat = Lattice::cylinder(3, 6);
  const Region all = full_interior(lat);
  const DirichletSystem direct(lat, all), cg(lat, all, true);
  CHECK(direct.direct());
  CHECK_FALSE(cg.direct());
  const Site x = lat.interior()[10], y = lat.interior()[100];
  const GreensTable gx = greens(direct, x), gy = greens(direct, y), hx = greens(cg, x);
  CHECK(gx[y] == doctest::Approx(gy[x]).epsilon(1e-12));
  for (Site s : lat.interior())
    CHECK(hx[s] == doctest::Approx(gx[s]).epsilon(1e-9));
  CHECK_THROWS(cg.logdet());
}

TEST_CASE("image sum rebuilds the cylinder column") {
  const Lattice cyl = Lattice::cylinder(3, 4);
  const Site src = cyl.interior()[21];
  const GreensTable g = greens(cyl, src);
  const ImageSum im = greens_image_sum(cyl, src, 8);
  for (Site s : cyl.interior())
    CHECK(im.values[s] == doctest::Approx(g[s]).epsilon(1e-8));
}

TEST_CASE("singleton capacity is 1/G(i,i)") {
  const Lattice lat = Lattice::cylinder(3, 6);
  const auto diag = greens_diagonal_by_layer(lat);
  for (int l = 1; l < 6; ++l) {
    const Site s = static_cast<Site>(l * lat.layer_size());
    CHECK(capacity(lat, Region({s})).value == doctest::Approx(1.0 / diag[l - 1]).epsilon(1e-12));
  }
}

TEST_CASE("capacity is monotone and escape probabilities lie in [0, 1]") {
  const Lattice lat = Lattice::cylinder(3, 8);
  const Region small = layer_band(lat, 3, 3);
  const Region big = layer_band(lat, 2, 5);
  const CapacityResult cs = capacity(lat, small), cb = capacity(lat, big);
  CHECK(cs.value <= cb.value);
  for (double e : cb.escape) {
    CHECK(e >= -1e-14);
    CHECK(e <= 1 + 1e-14);
  }
  // the whole interior: every site next to the boundary escapes with probability 1/2d
  const CapacityResult all = capacity(lat, full_interior(lat));
  CHECK(all.value == doctest::Approx(2.0 * 64 / 6));
}

TEST_CASE("mesoscopic energy of the unpinned field") {
  const Lattice lat = Lattice::cylinder(3, 8);
  const MesoEnergy e = meso_energy(lat, full_interior(lat), 1, 0.5, 2);
  CHECK(e.e_n0 == doctest::Approx(512 * 0.125));
  CHECK(e.e_n == e.e_n0);
  CHECK(e.reference == doctest::Approx(512 * sigma_min({1, 0.5, 2})));
  CHECK(e.gap_bound == doctest::Approx(2 * 3 * std::pow(8, 2.5)));
}

TEST_CASE("invalid inputs") {
  const Lattice lat = Lattice::cylinder(3, 4);
  CHECK_THROWS(greens(lat, 0));
  CHECK_THROWS(solve_dirichlet(lat, Region(), boundary_values(lat, 0, 0)));
  CHECK_THROWS(DirichletSystem(lat, Region({0})));
}
