#include "pgff/lattice.hh"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

using namespace pgff;

TEST_CASE("cylinder sizes and neighbours") {
  for (int d : {1, 2, 3, 4})
    for (int N : {2, 4, 6}) {
      const Lattice lat = Lattice::cylinder(d, N);
      const auto layer = static_cast<std::size_t>(std::pow(N, d - 1));
      CHECK(lat.site_count() == (N + 1) * layer);
      CHECK(lat.interior_count() == (N - 1) * layer);
      for (Site s : lat.interior())
        for (auto t : lat.neighbors(s))
          CHECK(t != no_site);
    }
}

TEST_CASE("canonical index") {
  const Lattice lat = Lattice::cylinder(3, 4);
  for (int i1 = 0; i1 <= 4; ++i1)
    for (int i2 = 0; i2 < 4; ++i2)
      for (int i3 = 0; i3 < 4; ++i3) {
        const std::vector<int> c{i1, i2, i3};
        const std::size_t idx = i1 * 16 + i2 * 4 + i3;
        CHECK(lat.encode(c) == idx);
        CHECK(lat.decode(idx) == c);
      }
}

TEST_CASE("transverse coordinates wrap, the first does not") {
  const Lattice lat = Lattice::cylinder(3, 4);
  const Site s = static_cast<Site>(lat.encode(std::vector<int>{2, 3, 0}));
  CHECK(lat.decode(lat.neighbor(s, 2)) == std::vector<int>{2, 0, 0});
  CHECK(lat.decode(lat.neighbor(s, 5)) == std::vector<int>{2, 3, 3});
  CHECK(lat.side_of(0) == BoundarySide::left);
  CHECK(lat.side_of(lat.site_count() - 1) == BoundarySide::right);
}

TEST_CASE("N = 2 keeps a doubled transverse bond") {
  const Lattice lat = Lattice::cylinder(3, 2);
  const Site s = lat.interior()[0];
  CHECK(lat.neighbor(s, 2) == lat.neighbor(s, 3));
}

TEST_CASE("colour classes split the interior into a proper two-colouring") {
  const Lattice lat = Lattice::cylinder(3, 6);
  REQUIRE(lat.bipartite());
  CHECK(lat.color_class(0).size() + lat.color_class(1).size() == lat.interior_count());
  for (int c = 0; c < 2; ++c)
    for (Site s : lat.color_class(c))
      for (auto t : lat.neighbors(s))
        CHECK(lat.parity(t) != c);
}

TEST_CASE("free box has a zero halo") {
  const Lattice box = Lattice::free_box(2, 3);
  CHECK(box.interior_count() == 9);
  CHECK(box.site_count() == 25);
}

TEST_CASE("build_lattice rejects bad input") {
  CHECK_THROWS_AS(build_lattice(3, 5, LatticeKind::cylinder), std::invalid_argument);
  CHECK_THROWS_AS(build_lattice(0, 4, LatticeKind::cylinder), std::invalid_argument);
}

TEST_CASE("region set operations") {
  const Region a({5, 1, 3, 3});
  CHECK(a.sites == std::vector<Site>{1, 3, 5});
  const Region b({3, 4});
  CHECK(region_union(a, b).sites == std::vector<Site>{1, 3, 4, 5});
  CHECK(region_difference(a, b).sites == std::vector<Site>{1, 5});
  CHECK_FALSE(disjoint(a, b));
  CHECK(disjoint(a, Region({2})));
}

TEST_CASE("slab regions and components") {
  const Lattice lat = Lattice::cylinder(3, 6);
  CHECK(slab_region(lat, 2).size() == 2 * 36);
  CHECK_THROWS(slab_region(lat, 6));
  const Region two = region_union(layer_band(lat, 1, 1), layer_band(lat, 3, 3));
  CHECK(components(lat, two).size() == 2);
  CHECK(components(lat, layer_band(lat, 1, 3)).size() == 1);
  // a single layer touches two layers on each side
  CHECK(boundary_contact(lat, layer_band(lat, 2, 2), layer_band(lat, 3, 4)) == 36);
}

TEST_CASE("five regions partition the interior") {
  const Lattice lat = Lattice::cylinder(3, 16);
  const FiveRegions f = five_region_partition(lat, 0.25, 0.75, 2);
  CHECK(f.contact_left == 4);
  CHECK(f.contact_right == 12);
  const std::vector<const Region *> parts{&f.a_left, &f.gamma_left, &f.band, &f.gamma_right,
                                          &f.a_right};
  std::size_t total = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    total += parts[i]->size();
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      CHECK(disjoint(*parts[i], *parts[j]));
  }
  CHECK(total == lat.interior_count());
  CHECK_THROWS(five_region_partition(lat, 0.05, 0.75, 2));
}

TEST_CASE("subboxes tile layers 0..N-1") {
  const Lattice lat = Lattice::cylinder(3, 16);
  const SubboxGrid g = subbox_partition(lat, 0.5);
  CHECK(g.side == 4);
  CHECK(g.count() == 64);
  std::set<Site> seen;
  for (const auto &box : g.boxes) {
    CHECK(box.size() == 64);
    seen.insert(box.begin(), box.end());
  }
  CHECK(seen.size() == 16 * 256);
  CHECK(g.box_of[lat.site_count() - 1] == -1);
  CHECK_THROWS(subbox_partition(lat, 0.3));
}
