#include "pgff/partition.hh"
#include "pgff/util.hh"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pgff;

namespace {

// C(2n, n) / 4^n
std::vector<double> binomial_returns(int n_max) {
  std::vector<double> p{1.0};
  for (int n = 1; n <= n_max; ++n)
    p.push_back(p.back() * (2.0 * n - 1) / (2.0 * n));
  return p;
}

// direct walk on a 3D box (never reaches the edge within the horizon)
std::vector<double> walk_returns_3d(int n_max) {
  const int r = n_max + 1, w = 2 * r + 1;
  auto at = [&](int x, int y, int z) { return (static_cast<std::size_t>(x) * w + y) * w + z; };
  std::vector<double> p(static_cast<std::size_t>(w) * w * w, 0.0), q(p.size());
  p[at(r, r, r)] = 1;
  std::vector<double> out{1.0};
  for (int step = 1; step <= 2 * n_max; ++step) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int x = 1; x < w - 1; ++x)
      for (int y = 1; y < w - 1; ++y)
        for (int z = 1; z < w - 1; ++z) {
          const double v = p[at(x, y, z)] / 6;
          if (v == 0)
            continue;
          q[at(x + 1, y, z)] += v;
          q[at(x - 1, y, z)] += v;
          q[at(x, y + 1, z)] += v;
          q[at(x, y - 1, z)] += v;
          q[at(x, y, z + 1)] += v;
          q[at(x, y, z - 1)] += v;
        }
    std::swap(p, q);
    if (step % 2 == 0)
      out.push_back(p[at(r, r, r)]);
  }
  return out;
}

} // namespace

TEST_CASE("free chain partition function in closed form") {
  // d = 1 box of length l: det(I - P) = (l + 1) / 2^l
  for (int l : {1, 2, 5, 12}) {
    const Lattice box = Lattice::free_box(1, l);
    const double expect = 0.5 * l * std::log(pi) - 0.5 * std::log((l + 1) / std::pow(2.0, l));
    CHECK(log_partition_free(box, full_interior(box)).value == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("loop sum matches the determinant within its budget") {
  const Lattice lat = Lattice::cylinder(3, 6);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    std::vector<Site> s(lat.interior().begin(), lat.interior().end());
    std::shuffle(s.begin(), s.end(), rng);
    s.resize(20 + 30 * i);
    const Region a(s);
    const LogPartition exact = log_partition_free(lat, a);
    const LogPartition loop = log_partition_loop_sum(lat, a);
    CHECK(loop.error_budget <= 1e-7);
    CHECK(std::abs(loop.value - exact.value) <= loop.error_budget);
  }
}

TEST_CASE("shifted boundary costs the slab energy") {
  const Lattice lat = Lattice::cylinder(3, 4);
  const LogPartition lp = log_partition_boundary(lat, full_interior(lat), 4, 0);
  CHECK(lp.shift == doctest::Approx(-0.5 * 64).epsilon(1e-12));
}

TEST_CASE("decoupling of separated sets is exact") {
  const Lattice lat = Lattice::cylinder(3, 6);
  const Region a = layer_band(lat, 1, 1), c = layer_band(lat, 3, 4);
  const double s = log_partition_free(lat, region_union(a, c)).value -
                   log_partition_free(lat, a).value - log_partition_free(lat, c).value;
  CHECK(std::abs(s) <= 1e-12);
  const Region touching = layer_band(lat, 2, 2);
  CHECK(log_partition_free(lat, region_union(a, touching)).value -
            log_partition_free(lat, a).value - log_partition_free(lat, touching).value >
        0);
}

TEST_CASE("singleton pinned partition function") {
  // Z = eps + sqrt(pi / d) for one site with zero neighbours
  for (double eps : {0.0, 1.0, 10.0}) {
    const FreeEnergyEstimate f = xi_bruteforce(3, 1, eps);
    CHECK(f.xi_hat == doctest::Approx(std::log1p(eps * std::sqrt(3 / pi))).epsilon(1e-13));
  }
}

TEST_CASE("brute-force free energy is monotone in eps and zero at eps = 0") {
  CHECK(xi_bruteforce(3, 2, 0).xi_hat == 0);
  double prev = 0;
  for (double eps : {0.1, 1.0, 10.0, 100.0}) {
    const FreeEnergyEstimate f = xi_bruteforce(3, 2, eps);
    CHECK(f.xi_hat > prev);
    prev = f.xi_hat;
  }
}

TEST_CASE("pinning expansion limits") {
  const Lattice box = Lattice::free_box(2, 2);
  const std::vector<double> zero(box.site_count(), 0.0);
  const PinExpansion p0 = pin_expansion(box, full_interior(box), zero, 0);
  CHECK(std::exp(p0.log_weight.back() - p0.log_z) == doctest::Approx(1));
  const PinExpansion big = pin_expansion(box, full_interior(box), zero, 1e12);
  CHECK(std::exp(big.log_weight.front() - big.log_z) == doctest::Approx(1).epsilon(1e-9));
  CHECK_THROWS(log_partition_pinned_bruteforce(Lattice::free_box(3, 3), full_interior(Lattice::free_box(3, 3)), 1));
}

TEST_CASE("one-dimensional return probabilities") {
  const auto ref = binomial_returns(50);
  const auto p = return_probabilities(1, 0, 50);
  for (int n = 0; n <= 50; ++n)
    CHECK(p[n] == doctest::Approx(ref[n]).epsilon(1e-13));
}

TEST_CASE("three-dimensional return probabilities against a direct walk") {
  const auto ref = walk_returns_3d(30);
  const auto p = return_probabilities(3, 0, 30);
  for (int n = 0; n <= 30; ++n)
    CHECK(p[n] == doctest::Approx(ref[n]).epsilon(1e-12));
}

TEST_CASE("loop constants") {
  CHECK(loop_constant_q(1).value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // partial sum of the direct walk plus the leading n^{-3/2} tail
  const int n_max = 60;
  const auto ref = walk_returns_3d(n_max);
  double partial = 0;
  for (int n = 1; n <= n_max; ++n)
    partial += ref[n] / (2.0 * n);
  const double c = 2 * std::pow(3 / (4 * pi), 1.5);
  const double tail = c / 3 * std::pow(n_max + 0.5, -1.5);
  CHECK(loop_constant_q(3).value == doctest::Approx(partial + tail).epsilon(2e-5));
  // Watson's integral
  CHECK(green_origin(3).value == doctest::Approx(1.516386059151978).epsilon(1e-10));
}

TEST_CASE("torus loop constant exceeds the full-space one") {
  const double q = loop_constant_q(3).value;
  double prev = 1e9;
  for (int N : {4, 8, 16}) {
    const double qn = loop_constant_qN(3, N).value;
    CHECK(qn >= q);
    CHECK(qn < prev);
    prev = qn;
  }
  CHECK(loop_constant_qN(3, 4).value == doctest::Approx(0.142353557).epsilon(1e-8));
}

TEST_CASE("walk constants") {
  const WalkConstants w = walk_constants(3, 4, 100, 20000, 1);
  CHECK(w.qhat0 == doctest::Approx(0.5 * (std::log(pi / 3) + w.q)));
  CHECK(w.r_upper < w.g00);
  CHECK(w.margin > 3 * w.margin_se);
  CHECK(w.cN > 1);
}

TEST_CASE("free-energy window") {
  const auto [lo, hi] = xi_window(3, 10, 0.5);
  const double qhat0 = 0.5 * (std::log(pi / 3) + loop_constant_q(3).value);
  CHECK(lo == doctest::Approx(std::log(10.0) - qhat0 - 0.5));
  CHECK(hi == doctest::Approx(std::log(20.0) + 0.5));
}

TEST_CASE("thermodynamic integration against enumeration") {
  ThermoOptions opt;
  opt.sweeps = 5000;
  opt.burn_in = 500;
  const FreeEnergyEstimate th = xi_thermo_integration(3, 2, 5.0, opt);
  const FreeEnergyEstimate bf = xi_bruteforce(3, 2, 5.0);
  CHECK(std::abs(th.xi_hat - bf.xi_hat) <= 0.02);
  CHECK(th.log_eps.size() % 2 == 1);
}
