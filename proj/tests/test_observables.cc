#include "pgff/observables.hh"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace pgff;

namespace {

FieldState random_state(const Lattice &lat, std::uint64_t seed, double scale = 5) {
  FieldState st = make_state(lat, 0.5, 0.25, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, scale);
  for (Site s : lat.interior())
    st.phi[s] = g(rng);
  return st;
}

} // namespace

TEST_CASE("zero field gives the zero profile") {
  const Lattice lat = Lattice::cylinder(3, 4);
  const FieldState st = make_state(lat, 0, 0, 1);
  const MacroProfile h = macro_step(lat, st);
  for (double v : h.values())
    CHECK(v == 0);
}

TEST_CASE("constant field") {
  const Lattice lat = Lattice::cylinder(3, 4);
  FieldState st = make_state(lat, 3, 3, 1);
  std::fill(st.phi.begin(), st.phi.end(), 12.0);
  const MacroProfile step = macro_step(lat, st);
  const MacroProfile poli = macro_polilinear(lat, st);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> t{u(rng), u(rng), u(rng)};
    CHECK(poli.eval(t) == doctest::Approx(3));
    CHECK(step.eval(t) == doctest::Approx(3));
  }
  CHECK(lp_distance(coarse_grain(lat, st, 0.5), step, 1) == doctest::Approx(0).scale(1));
}

TEST_CASE("step and polilinear agree at lattice points") {
  const Lattice lat = Lattice::cylinder(3, 4);
  const FieldState st = random_state(lat, 5);
  const MacroProfile step = macro_step(lat, st);
  const MacroProfile poli = macro_polilinear(lat, st);
  for (Site s : lat.interior()) {
    const auto c = lat.decode(s);
    const std::vector<double> t{c[0] / 4.0, c[1] / 4.0, c[2] / 4.0};
    CHECK(step.eval(t) == doctest::Approx(st.phi[s] / 4));
    CHECK(poli.eval(t) == doctest::Approx(st.phi[s] / 4));
  }
}

TEST_CASE("step/polilinear distance stays under the bond bound") {
  const Lattice lat = Lattice::cylinder(3, 6);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FieldState st = random_state(lat, seed);
    const double dist = lp_distance(macro_step(lat, st), macro_polilinear(lat, st), 1);
    CHECK(dist <= step_polilinear_bound(lat, st));
  }
}

TEST_CASE("Lp distance is a norm") {
  const Lattice lat = Lattice::cylinder(2, 6);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const MacroProfile f = macro_step(lat, random_state(lat, seed));
    const MacroProfile g = macro_step(lat, random_state(lat, seed + 100));
    const MacroProfile h = macro_step(lat, random_state(lat, seed + 200));
    CHECK(lp_distance(f, f, 1) == 0);
    for (double p : {1.0, 2.0})
      CHECK(lp_distance(f, h, p) <= lp_distance(f, g, p) + lp_distance(g, h, p) + 1e-12);
    MacroProfile f2 = f;
    for (auto &v : f2.values())
      v *= 2;
    const MacroProfile zero = macro_step(lat, make_state(lat, 0, 0, 1));
    CHECK(lp_distance(f2, zero, 1) == doctest::Approx(2 * lp_distance(f, zero, 1)));
  }
}

TEST_CASE("lifted minimizers are 3/4 apart") {
  const Minimizers m = build_minimizers({1, 1, 8});
  const MacroProfile flat = MacroProfile::lift(m.flat, 3, 16, 16, ProfileKind::polilinear);
  CHECK(lp_distance(flat, *m.pinned, 1) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("linear field is close to the line") {
  const Lattice lat = Lattice::cylinder(3, 16);
  const FieldState st = make_state(lat, 1, 0.5, 1, InitKind::flat);
  CHECK(lp_distance(macro_step(lat, st), Profile1D::line(1, 0.5), 1) <= 1.0 / 16);
}

TEST_CASE("coarse graining contracts L1 distances") {
  const Lattice lat = Lattice::cylinder(3, 16);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const FieldState x = random_state(lat, seed), y = random_state(lat, seed + 7);
    CHECK(lp_distance(coarse_grain(lat, x, 0.5), coarse_grain(lat, y, 0.5), 1) <=
          lp_distance(macro_step(lat, x), macro_step(lat, y), 1) + 1e-12);
  }
}

TEST_CASE("a single spike is diluted by the box volume") {
  const Lattice lat = Lattice::cylinder(3, 16);
  FieldState st = make_state(lat, 0, 0, 1);
  const Site s = static_cast<Site>(lat.encode(std::vector<int>{5, 5, 5}));
  st.phi[s] = 256;
  const MacroProfile cg = coarse_grain(lat, st, 0.5);
  CHECK(cg.values()[s] == doctest::Approx(256.0 / 64 / 16));
}

TEST_CASE("wetted region") {
  const Lattice lat = Lattice::cylinder(3, 16);
  FieldState st = make_state(lat, 0, 0, 1);
  CHECK(wetted_region(lat, st, 0.5, 0.8).boxes.empty());
  std::fill(st.phi.begin(), st.phi.end(), 2 * std::pow(16, 0.8));
  CHECK(wetted_region(lat, st, 0.5, 0.8).boxes.size() == 64);
}

TEST_CASE("omega plus and pinned fraction") {
  const Lattice lat = Lattice::cylinder(3, 4);
  FieldState st = make_state(lat, 0, 0, 1, InitKind::pinned);
  CHECK(pinned_fraction(lat, st) == 1);
  CHECK(omega_plus(lat, st));
  st.phi[lat.interior()[0]] = -2;
  CHECK_FALSE(omega_plus(lat, st));
}

TEST_CASE("snapshot round trip") {
  const Lattice lat = Lattice::cylinder(3, 4);
  const FieldState st = random_state(lat, 9);
  const auto path = std::filesystem::temp_directory_path() / "pgff_snapshot_test.pgff";
  write_snapshot(path.string(), lat, st.phi);
  const Snapshot s = read_snapshot(path.string());
  CHECK(s.d == 3);
  CHECK(s.N == 4);
  CHECK(s.phi == st.phi);
  CHECK(std::filesystem::file_size(path) == 8 + 8 + 8 * lat.site_count());
  std::filesystem::remove(path);
}
