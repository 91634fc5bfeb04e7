#include "pgff/sampler.hh"
#include "pgff/partition.hh"

#include <doctest.h>

#include <cmath>

using namespace pgff;

TEST_CASE("site conditional against direct quadrature") {
  // atom eps against int exp(-(d x^2 - S x)) dx
  const int d = 3;
  for (double eps : {0.1, 1.0, 50.0})
    for (double s : {-4.0, 0.0, 1.5, 6.0}) {
      double mass = 0;
      const double m = s / (2 * d), h = 1e-4;
      for (double x = m - 12; x < m + 12; x += h)
        mass += std::exp(-(d * x * x - s * x)) * h;
      const SiteConditional c = site_conditional(s, d, eps);
      CHECK(c.p_pin == doctest::Approx(eps / (eps + mass)).epsilon(1e-9));
      CHECK(c.mean == doctest::Approx(m));
      CHECK(c.variance == doctest::Approx(1.0 / (2 * d)));
    }
  CHECK(site_conditional(0, 3, 0).p_pin == 0);
  CHECK_THROWS(site_conditional(0, 3, -1));
}

TEST_CASE("checkerboard sweeps do not depend on the thread count") {
  const Lattice lat = Lattice::cylinder(3, 24);
  FieldState a = make_state(lat, 1, 1, 42), b = a;
  for (int s = 0; s < 3; ++s) {
    sweep(lat, a, 20.0, Schedule::checkerboard, 1);
    sweep(lat, b, 20.0, Schedule::checkerboard, 4);
  }
  CHECK(a.phi == b.phi);
  CHECK(a.pinned == b.pinned);
}

TEST_CASE("no pinning at eps = 0") {
  const Lattice lat = Lattice::cylinder(3, 4);
  ChainConfig c;
  c.sweeps = 200;
  c.burn_in = 10;
  c.thinning = 5;
  const ChainResult r = run_chain(lat, 0.5, 0.5, 0.0, c);
  CHECK(r.rows.size() == 40);
  for (const auto &row : r.rows)
    CHECK(row.pinned_fraction == 0);
}

TEST_CASE("chains are reproducible and validate their budget") {
  const Lattice lat = Lattice::cylinder(3, 4);
  ChainConfig c;
  c.sweeps = 100;
  c.burn_in = 10;
  c.thinning = 1;
  c.schedule = Schedule::sequential;
  const ChainResult x = run_chain(lat, 1, 1, 5.0, c), y = run_chain(lat, 1, 1, 5.0, c);
  CHECK(x.final.phi == y.final.phi);
  c.burn_in = 100;
  CHECK_THROWS(run_chain(lat, 1, 1, 5.0, c));
  CHECK_THROWS(parse_schedule("random"));
}

TEST_CASE("exact enumeration limits") {
  const Lattice lat = Lattice::cylinder(3, 2);
  const TinyExact e0 = exact_tiny_sampler(lat, 0, 0, 0);
  CHECK(e0.subset_prob.back() == doctest::Approx(1));
  for (double p : e0.pin_prob)
    CHECK(p == 0);
  const TinyExact big = exact_tiny_sampler(lat, 0, 0, 1e12);
  CHECK(big.subset_prob.front() == doctest::Approx(1).epsilon(1e-9));
  CHECK_THROWS(exact_tiny_sampler(Lattice::cylinder(3, 4), 0, 0, 1));
}

TEST_CASE("exact enumeration agrees with the pinning expansion") {
  const Lattice box = Lattice::free_box(2, 2);
  const std::vector<double> bc(box.site_count(), 0.0);
  const Region all = full_interior(box);
  const TinyExact e = exact_tiny(box, all, bc, 3.0);
  const PinExpansion p = pin_expansion(box, all, bc, 3.0);
  for (std::size_t m = 0; m < e.subset_prob.size(); ++m)
    CHECK(e.subset_prob[m] == doctest::Approx(std::exp(p.log_weight[m] - p.log_z)).epsilon(1e-12));
}

TEST_CASE("exact draws reproduce the exact marginals") {
  const Lattice lat = Lattice::cylinder(3, 2);
  const TinyExact e = exact_tiny_sampler(lat, 0.5, 0.25, 1.0);
  const int n = 200000;
  std::vector<double> pin(e.sites.size(), 0), mean(e.sites.size(), 0);
  for (int i = 0; i < n; ++i) {
    KeyedRng rng(9, 0, i);
    const auto x = e.draw(rng);
    for (std::size_t k = 0; k < x.size(); ++k) {
      pin[k] += x[k] == 0;
      mean[k] += x[k];
    }
  }
  for (std::size_t k = 0; k < e.sites.size(); ++k) {
    const double p = e.pin_prob[k];
    CHECK(std::abs(pin[k] / n - p) <= 4 * std::sqrt(p * (1 - p) / n));
    CHECK(mean[k] / n == doctest::Approx(e.mean[k]).epsilon(0.02));
  }
}

TEST_CASE("stochastic domination") {
  CHECK(domination_singleton_margin(3, 1.0) >= 0);
  CHECK(domination_singleton_margin(3, 0.0) >= 0);
  const Lattice box = Lattice::free_box(1, 2);
  const Region a(std::vector<Site>(box.interior().begin(), box.interior().end()));
  std::vector<double> psi(box.site_count(), 1.0);
  const DominationReport r = domination_check(box, a, psi, 5.0, 20000, 3);
  CHECK(r.pass);
  CHECK(r.acceptance > 0.5);
  std::vector<double> neg(box.site_count(), -1.0);
  CHECK_THROWS(domination_check(box, a, neg, 5.0, 100, 3));
}
