#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pgff {

using Site = std::uint32_t;
inline constexpr std::int32_t no_site = -1;

enum class LatticeKind {
  cylinder, ///< {0..N} x T_N^{d-1}, Dirichlet at i1 = 0 and i1 = N
  free_box, ///< Lambda_l = {1..l}^d in Z^d with a one-site zero halo
  slab,     ///< {0..N} x {1..W}^{d-1} with a zero halo in every transverse axis
};

enum class BoundarySide : std::uint8_t { interior, left, right, halo };

/// Geometry of the lattices used throughout the library.
///
/// All lattices store their fixed (boundary) sites alongside the interior, so
/// a field is a plain vector over `site_count()` entries and a site's 2d
/// neighbour slots always point into that vector. Canonical index is mixed
/// radix with the first coordinate most significant; for the cylinder this is
/// idx = i1 N^{d-1} + sum_{a>=2} i_a N^{d-a}.
class Lattice {
public:
  static Lattice cylinder(int d, int N);
  static Lattice free_box(int d, int ell);
  /// Truncated infinite slab {0..N} x Z^{d-1}; transverse extent `width`
  /// interior columns per axis, zero beyond.
  static Lattice slab(int d, int N, int width);

  LatticeKind kind() const { return kind_; }
  int dim() const { return d_; }
  /// N for cylinder/slab, l for free boxes.
  int side() const { return side_; }
  std::size_t site_count() const { return site_count_; }
  std::size_t interior_count() const { return interior_.size(); }
  std::size_t degree() const { return 2 * static_cast<std::size_t>(d_); }

  /// Extent of axis `a` in stored coordinates (including halo layers).
  int extent(int a) const { return extent_[a]; }
  bool periodic(int a) const { return periodic_[a]; }

  std::size_t encode(std::span<const int> coords) const;
  std::vector<int> decode(std::size_t site) const;
  int coord(std::size_t site, int axis) const;

  BoundarySide side_of(std::size_t site) const { return where_[site]; }
  bool is_interior(std::size_t site) const {
    return where_[site] == BoundarySide::interior;
  }

  /// Neighbour in direction `dir` in [0, 2d): dir = 2a is +e_a, 2a+1 is -e_a.
  /// Returns no_site when the step leaves the stored lattice (halo corners).
  std::int32_t neighbor(std::size_t site, std::size_t dir) const {
    return nbr_[site * degree() + dir];
  }
  std::span<const std::int32_t> neighbors(std::size_t site) const {
    return {nbr_.data() + site * degree(), degree()};
  }

  /// Interior sites in canonical order.
  std::span<const Site> interior() const { return interior_; }
  /// 0 or 1; a proper two-colouring whenever every periodic extent is even.
  int parity(std::size_t site) const { return parity_[site]; }
  bool bipartite() const;
  /// Interior sites of one parity class, canonical order.
  std::span<const Site> color_class(int c) const { return colors_[c & 1]; }

  /// Number of sites in one i1-layer (N^{d-1} on the cylinder).
  std::size_t layer_size() const { return layer_size_; }

  std::string describe() const;

private:
  Lattice(LatticeKind kind, int d, int side, std::vector<int> extent,
          std::vector<bool> periodic);

  LatticeKind kind_;
  int d_;
  int side_;
  std::vector<int> extent_;
  std::vector<bool> periodic_;
  std::vector<std::size_t> stride_;
  std::size_t site_count_ = 0;
  std::size_t layer_size_ = 0;
  std::vector<std::int32_t> nbr_;
  std::vector<BoundarySide> where_;
  std::vector<std::uint8_t> parity_;
  std::vector<Site> colors_[2];
  std::vector<Site> interior_;
};

/// Validated constructor used by the CLI and experiments.
Lattice build_lattice(int d, int N, LatticeKind kind);

enum class RegionKind { generic, slab, a_left, gamma_left, band, gamma_right, a_right, mesoscopic };

/// A set of interior sites, kept sorted and unique.
struct Region {
  std::vector<Site> sites;
  RegionKind kind = RegionKind::generic;

  Region() = default;
  Region(std::vector<Site> s, RegionKind k = RegionKind::generic);

  std::size_t size() const { return sites.size(); }
  bool empty() const { return sites.empty(); }
  bool contains(Site s) const;
  std::vector<std::uint8_t> mask(std::size_t site_count) const;
};

Region region_union(const Region &a, const Region &b);
Region region_difference(const Region &a, const Region &b);
bool disjoint(const Region &a, const Region &b);

/// All interior sites.
Region full_interior(const Lattice &lat);
/// E_n = {1..n} x T_N^{d-1}.
Region slab_region(const Lattice &lat, int n);
/// Interior sites with first coordinate in [lo, hi].
Region layer_band(const Lattice &lat, int lo, int hi);

/// Outer vertex boundary: sites outside `a` adjacent to it (includes fixed sites).
std::vector<Site> outer_boundary(const Lattice &lat, const Region &a);
/// |d_A C| = #{j in C : j adjacent to A}.
std::size_t boundary_contact(const Lattice &lat, const Region &a, const Region &c);
/// Connected components of `a` under lattice adjacency.
std::vector<Region> components(const Lattice &lat, const Region &a);

struct FiveRegions {
  Region a_left, gamma_left, band, gamma_right, a_right;
  int contact_left = 0;  ///< rounded N s_L
  int contact_right = 0; ///< rounded N s_R
  int collar = 0;
};

/// A_L, gamma_L, B, gamma_R, A_R with N s_L and N s_R rounded to nearest.
FiveRegions five_region_partition(const Lattice &lat, double s_left,
                                  double s_right, int collar);

/// Tiling of {0..N-1} x T_N^{d-1} by cubes of side N^beta.
struct SubboxGrid {
  double beta = 0;
  int side = 0;     ///< box side s
  int per_axis = 0; ///< N / s
  /// boxes[k] lists member sites in canonical order; box k has block
  /// coordinates decoded mixed-radix in per_axis.
  std::vector<std::vector<Site>> boxes;
  std::vector<std::int32_t> box_of; ///< site -> box id, -1 for layer i1 = N

  std::size_t count() const { return boxes.size(); }
  /// Union of the listed boxes, restricted to interior sites.
  Region union_of(const Lattice &lat, std::span<const std::size_t> ids) const;
};

SubboxGrid subbox_partition(const Lattice &lat, double beta);

} // namespace pgff
