#include "pgff/analytic.hh"
#include "pgff/observables.hh"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pgff;

namespace {

// midpoint rule on a fine grid, independent of the exact segment integration
double midpoint_lp(const Profile1D &f, const Profile1D &g, double p, int n = 200000) {
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    s += std::pow(std::abs(f(t) - g(t)), p);
  }
  return s / n;
}

Profile1D random_profile(std::mt19937_64 &rng, double a, double b) {
  std::uniform_real_distribution<double> u(-1, 2);
  std::vector<Knot> k{{0, a}};
  for (int i = 1; i < 6; ++i)
    k.push_back({i / 6.0 + 0.01 * u(rng), u(rng)});
  k.push_back({1, b});
  return Profile1D(k);
}

} // namespace

TEST_CASE("symmetric critical case") {
  const VariationalParams p{1, 1, 8};
  CHECK(critical_xi(1, 1) == doctest::Approx(8).epsilon(1e-15));
  const auto [sl, sr] = contact_points(p);
  CHECK(sl == doctest::Approx(0.25));
  CHECK(sr == doctest::Approx(0.75));
  CHECK(sigma_flat(p) == 0);
  CHECK(sigma_pinned(p) == doctest::Approx(0).scale(1));
  const Minimizers m = build_minimizers(p);
  REQUIRE(m.pinned);
  CHECK(lp_distance_1d(m.flat, *m.pinned, 1) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("closed forms match the exact functional") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1);
  for (int i = 0; i < 50; ++i) {
    const double a = u(rng), b = u(rng);
    const double root = a + b + u(rng);
    const VariationalParams p{a, b, root * root / 2};
    const Minimizers m = build_minimizers(p);
    REQUIRE(m.pinned);
    CHECK(sigma_1d(m.flat, p).sigma == doctest::Approx(0.5 * (a - b) * (a - b)).epsilon(1e-12));
    CHECK(sigma_1d(*m.pinned, p).sigma == doctest::Approx(root * (a + b) - p.xi).epsilon(1e-12));
    CHECK(sigma_min(p) <= sigma_flat(p));
    const VariationalParams c{a, b, critical_xi(a, b)};
    CHECK(std::abs(sigma_flat(c) - sigma_pinned(c)) <= 1e-12);
    // sqrt a + sqrt b = (2 xi)^{1/4} at criticality
    CHECK(std::sqrt(a) + std::sqrt(b) == doctest::Approx(std::pow(2 * c.xi, 0.25)));
  }
}

TEST_CASE("no pinned profile when the slopes do not fit") {
  const VariationalParams p{1, 1, 1};
  CHECK_FALSE(has_pinned_minimizer(p));
  CHECK_FALSE(build_minimizers(p).pinned);
  CHECK(sigma_min(p) == sigma_flat(p));
}

TEST_CASE("boundary values are enforced") {
  const VariationalParams p{1, 0.5, 2};
  CHECK_THROWS(sigma_1d(Profile1D::line(1, 0.4), p));
  CHECK_NOTHROW(sigma_1d(Profile1D::line(1, 0.5), p));
}

TEST_CASE("exact Lp distances agree with a fine midpoint rule") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const Profile1D f = random_profile(rng, 0.3, 0.7);
    const Profile1D g = random_profile(rng, -0.2, 1.1);
    for (double p : {1.0, 1.5, 2.0})
      CHECK(lp_distance_1d(f, g, p) == doctest::Approx(midpoint_lp(f, g, p)).epsilon(1e-6));
  }
}

TEST_CASE("sup distance is attained at a knot") {
  const Profile1D f({{0, 0}, {0.3, 1}, {1, 0}});
  const Profile1D g = Profile1D::line(0, 0);
  CHECK(linf_distance(f, g) == doctest::Approx(1));
}

TEST_CASE("csv round trip") {
  const Profile1D f({{0, 1}, {0.25, 0}, {0.75, 0}, {1, 1}});
  const Profile1D g = Profile1D::from_csv(f.to_csv());
  CHECK(linf_distance(f, g) == 0);
}

TEST_CASE("gridded energy of a lifted profile") {
  const VariationalParams p{1, 1, 8};
  const Minimizers m = build_minimizers(p);
  for (int d : {1, 2}) {
    const EnergyValue e = sigma_full(MacroProfile::lift(*m.pinned, d, 1000, 4), p);
    CHECK(std::abs(e.sigma - sigma_pinned(p)) <= 2 * p.xi / 1000);
  }
}

TEST_CASE("stability certificate") {
  const VariationalParams p{1, 1, 8};
  const Profile1D far = Profile1D::line(1, 1);
  CHECK(stability_certificate(far, p, 0.5).pass);
  CHECK_THROWS(stability_certificate(far, p, 100));
  // a bump far from both minimizers must cost energy
  const Profile1D bump({{0, 1}, {0.5, 3}, {1, 1}});
  const Certificate c = stability_certificate(bump, p, 1.0);
  CHECK(c.pass);
  CHECK(c.sigma_star >= c.required);
}
