#include "pgff/lattice.hh"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pgff {

Lattice::Lattice(LatticeKind kind, int d, int side, std::vector<int> extent,
                 std::vector<bool> periodic)
    : kind_(kind), d_(d), side_(side), extent_(std::move(extent)),
      periodic_(std::move(periodic)) {
  stride_.assign(d_, 1);
  for (int a = d_ - 2; a >= 0; --a)
    stride_[a] = stride_[a + 1] * static_cast<std::size_t>(extent_[a + 1]);
  site_count_ = stride_[0] * static_cast<std::size_t>(extent_[0]);
  layer_size_ = stride_[0];

  const std::size_t deg = degree();
  nbr_.assign(site_count_ * deg, no_site);
  where_.assign(site_count_, BoundarySide::interior);
  parity_.assign(site_count_, 0);

  std::vector<int> c(d_, 0);
  for (std::size_t s = 0; s < site_count_; ++s) {
    std::size_t rem = s;
    for (int a = 0; a < d_; ++a) {
      c[a] = static_cast<int>(rem / stride_[a]);
      rem %= stride_[a];
    }
    BoundarySide bs = BoundarySide::interior;
    for (int a = d_ - 1; a >= 0; --a) {
      if (periodic_[a])
        continue;
      if (c[a] == 0 || c[a] == extent_[a] - 1)
        bs = a == 0 ? (c[a] == 0 ? BoundarySide::left : BoundarySide::right)
                    : BoundarySide::halo;
    }
    // the first axis wins so that slab/box corners count as left/right
    if (!periodic_[0] && (c[0] == 0 || c[0] == extent_[0] - 1))
      bs = c[0] == 0 ? BoundarySide::left : BoundarySide::right;
    where_[s] = bs;
    int par = 0;
    for (int a = 0; a < d_; ++a)
      par += c[a];
    parity_[s] = static_cast<std::uint8_t>(par & 1);

    for (int a = 0; a < d_; ++a) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        int v = c[a] + (sgn == 0 ? 1 : -1);
        if (periodic_[a]) {
          v = (v + extent_[a]) % extent_[a];
        } else if (v < 0 || v >= extent_[a]) {
          continue;
        }
        const std::size_t t =
            s + (static_cast<std::size_t>(v) - static_cast<std::size_t>(c[a])) *
                    stride_[a];
        nbr_[s * deg + 2 * a + sgn] = static_cast<std::int32_t>(t);
      }
    }
    if (bs == BoundarySide::interior) {
      interior_.push_back(static_cast<Site>(s));
      colors_[par & 1].push_back(static_cast<Site>(s));
    }
  }
}

Lattice Lattice::cylinder(int d, int N) {
  std::vector<int> ext(d, N);
  ext[0] = N + 1;
  std::vector<bool> per(d, true);
  per[0] = false;
  return Lattice(LatticeKind::cylinder, d, N, ext, per);
}

Lattice Lattice::free_box(int d, int ell) {
  return Lattice(LatticeKind::free_box, d, ell, std::vector<int>(d, ell + 2),
                 std::vector<bool>(d, false));
}

Lattice Lattice::slab(int d, int N, int width) {
  std::vector<int> ext(d, width + 2);
  ext[0] = N + 1;
  return Lattice(LatticeKind::slab, d, N, ext, std::vector<bool>(d, false));
}

Lattice build_lattice(int d, int N, LatticeKind kind) {
  if (d < 1)
    throw std::invalid_argument("lattice dimension must be >= 1, got " +
                                std::to_string(d));
  switch (kind) {
  case LatticeKind::cylinder:
    if (N < 2)
      throw std::invalid_argument("cylinder side N must be >= 2, got " +
                                  std::to_string(N));
    if (N % 2 != 0)
      throw std::invalid_argument("cylinder side N must be even, got " +
                                  std::to_string(N));
    return Lattice::cylinder(d, N);
  case LatticeKind::free_box:
    if (N < 1)
      throw std::invalid_argument("box side must be >= 1");
    return Lattice::free_box(d, N);
  case LatticeKind::slab:
    break;
  }
  throw std::invalid_argument("slab lattices are built with Lattice::slab");
}

std::size_t Lattice::encode(std::span<const int> coords) const {
  if (coords.size() != static_cast<std::size_t>(d_))
    throw std::invalid_argument("coordinate arity mismatch");
  std::size_t idx = 0;
  for (int a = 0; a < d_; ++a) {
    int v = coords[a];
    if (periodic_[a])
      v = ((v % extent_[a]) + extent_[a]) % extent_[a];
    else if (v < 0 || v >= extent_[a])
      throw std::out_of_range("coordinate outside lattice");
    idx += static_cast<std::size_t>(v) * stride_[a];
  }
  return idx;
}

std::vector<int> Lattice::decode(std::size_t site) const {
  std::vector<int> c(d_);
  for (int a = 0; a < d_; ++a) {
    c[a] = static_cast<int>(site / stride_[a]);
    site %= stride_[a];
  }
  return c;
}

int Lattice::coord(std::size_t site, int axis) const {
  return static_cast<int>((site / stride_[axis]) % extent_[axis]);
}


bool Lattice::bipartite() const {
  for (int a = 0; a < d_; ++a)
    if (periodic_[a] && extent_[a] % 2 != 0)
      return false;
  return true;
}

std::string Lattice::describe() const {
  std::ostringstream os;
  switch (kind_) {
  case LatticeKind::cylinder: os << "cylinder"; break;
  case LatticeKind::free_box: os << "free_box"; break;
  case LatticeKind::slab: os << "slab"; break;
  }
  os << "(d=" << d_ << ", side=" << side_ << ", sites=" << site_count_
     << ", interior=" << interior_.size() << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

Region::Region(std::vector<Site> s, RegionKind k) : sites(std::move(s)), kind(k) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
}

bool Region::contains(Site s) const {
  return std::binary_search(sites.begin(), sites.end(), s);
}

std::vector<std::uint8_t> Region::mask(std::size_t site_count) const {
  std::vector<std::uint8_t> m(site_count, 0);
  for (Site s : sites)
    m[s] = 1;
  return m;
}

Region region_union(const Region &a, const Region &b) {
  std::vector<Site> out;
  std::set_union(a.sites.begin(), a.sites.end(), b.sites.begin(), b.sites.end(),
                 std::back_inserter(out));
  return Region(std::move(out));
}

Region region_difference(const Region &a, const Region &b) {
  std::vector<Site> out;
  std::set_difference(a.sites.begin(), a.sites.end(), b.sites.begin(),
                      b.sites.end(), std::back_inserter(out));
  return Region(std::move(out));
}

bool disjoint(const Region &a, const Region &b) {
  auto i = a.sites.begin();
  auto j = b.sites.begin();
  while (i != a.sites.end() && j != b.sites.end()) {
    if (*i == *j)
      return false;
    if (*i < *j)
      ++i;
    else
      ++j;
  }
  return true;
}

Region full_interior(const Lattice &lat) {
  auto in = lat.interior();
  return Region(std::vector<Site>(in.begin(), in.end()));
}

Region layer_band(const Lattice &lat, int lo, int hi) {
  std::vector<Site> out;
  for (Site s : lat.interior()) {
    const int i1 = lat.coord(s, 0);
    if (i1 >= lo && i1 <= hi)
      out.push_back(s);
  }
  return Region(std::move(out));
}

Region slab_region(const Lattice &lat, int n) {
  if (n < 1 || n > lat.side() - 1)
    throw std::invalid_argument("slab E_n needs 1 <= n <= N-1");
  Region r = layer_band(lat, 1, n);
  r.kind = RegionKind::slab;
  return r;
}

std::vector<Site> outer_boundary(const Lattice &lat, const Region &a) {
  const auto in = a.mask(lat.site_count());
  std::vector<Site> out;
  for (Site s : a.sites)
    for (auto t : lat.neighbors(s))
      if (t != no_site && !in[t])
        out.push_back(static_cast<Site>(t));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t boundary_contact(const Lattice &lat, const Region &a, const Region &c) {
  const auto in_a = a.mask(lat.site_count());
  std::size_t count = 0;
  for (Site s : c.sites) {
    for (auto t : lat.neighbors(s)) {
      if (t != no_site && in_a[t]) {
        ++count;
        break;
      }
    }
  }
  return count;
}

std::vector<Region> components(const Lattice &lat, const Region &a) {
  std::vector<std::uint8_t> state = a.mask(lat.site_count()); // 1 = unvisited
  std::vector<Region> out;
  std::deque<Site> queue;
  for (Site seed : a.sites) {
    if (state[seed] != 1)
      continue;
    std::vector<Site> comp;
    state[seed] = 2;
    queue.push_back(seed);
    while (!queue.empty()) {
      Site s = queue.front();
      queue.pop_front();
      comp.push_back(s);
      for (auto t : lat.neighbors(s)) {
        if (t != no_site && state[t] == 1) {
          state[t] = 2;
          queue.push_back(static_cast<Site>(t));
        }
      }
    }
    out.emplace_back(std::move(comp));
  }
  return out;
}

FiveRegions five_region_partition(const Lattice &lat, double s_left,
                                  double s_right, int collar) {
  if (lat.kind() != LatticeKind::cylinder)
    throw std::invalid_argument("five_region_partition needs a cylinder lattice");
  if (!(0.0 < s_left && s_left < s_right && s_right < 1.0))
    throw std::invalid_argument("contact points must satisfy 0 < sL < sR < 1");
  if (collar < 0)
    throw std::invalid_argument("collar width must be >= 0");
  const int N = lat.side();
  const int nl = static_cast<int>(std::lround(N * s_left));
  const int nr = static_cast<int>(std::lround(N * s_right));
  if (nl - collar - 1 < 1 || nr + collar + 1 > N - 1 || nl >= nr)
    throw std::invalid_argument(
        "collar K=" + std::to_string(collar) + " too large for N=" +
        std::to_string(N) + " with rounded contacts " + std::to_string(nl) +
        ", " + std::to_string(nr));
  FiveRegions f;
  f.contact_left = nl;
  f.contact_right = nr;
  f.collar = collar;
  f.a_left = layer_band(lat, 1, nl - collar - 1);
  f.gamma_left = layer_band(lat, nl - collar, nl);
  f.band = layer_band(lat, nl + 1, nr);
  f.gamma_right = layer_band(lat, nr + 1, nr + collar);
  f.a_right = layer_band(lat, nr + collar + 1, N - 1);
  f.a_left.kind = RegionKind::a_left;
  f.gamma_left.kind = RegionKind::gamma_left;
  f.band.kind = RegionKind::band;
  f.gamma_right.kind = RegionKind::gamma_right;
  f.a_right.kind = RegionKind::a_right;
  return f;
}

SubboxGrid subbox_partition(const Lattice &lat, double beta) {
  if (lat.kind() != LatticeKind::cylinder)
    throw std::invalid_argument("subbox_partition needs a cylinder lattice");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("beta must lie in (0, 1]");
  const int N = lat.side();
  const double raw = std::pow(static_cast<double>(N), beta);
  const int s = static_cast<int>(std::lround(raw));
  if (s < 1 || std::abs(raw - s) > 1e-9 * raw || N % s != 0)
    throw std::invalid_argument("no integer side N^beta dividing N (N=" +
                                std::to_string(N) + ", N^beta=" +
                                std::to_string(raw) + ")");
  const int d = lat.dim();
  SubboxGrid g;
  g.beta = beta;
  g.side = s;
  g.per_axis = N / s;
  std::size_t nboxes = 1;
  for (int a = 0; a < d; ++a)
    nboxes *= static_cast<std::size_t>(g.per_axis);
  g.boxes.assign(nboxes, {});
  g.box_of.assign(lat.site_count(), -1);
  for (std::size_t site = 0; site < lat.site_count(); ++site) {
    const auto c = lat.decode(site);
    if (c[0] >= N)
      continue;
    std::size_t id = 0;
    for (int a = 0; a < d; ++a)
      id = id * g.per_axis + static_cast<std::size_t>(c[a] / s);
    g.boxes[id].push_back(static_cast<Site>(site));
    g.box_of[site] = static_cast<std::int32_t>(id);
  }
  return g;
}

Region SubboxGrid::union_of(const Lattice &lat, std::span<const std::size_t> ids) const {
  std::vector<Site> out;
  for (std::size_t id : ids)
    for (Site s : boxes.at(id))
      if (lat.is_interior(s))
        out.push_back(s);
  return Region(std::move(out), RegionKind::mesoscopic);
}

} // namespace pgff
