#pragma once

#include "pgff/analytic.hh"
#include "pgff/field.hh"
#include "pgff/lattice.hh"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pgff {

enum class ProfileKind { step, polilinear, coarse };

/// Gridded profile on [0,1] x T^{d-1}. Node (i1, i2, ..., id) sits at
/// (i1 / n1, i2 / m, ..., id / m) and is stored in the same mixed-radix order
/// as lattice sites. How values between nodes are read depends on `kind`:
/// step takes the nearest node, coarse the node at the floor, polilinear
/// blends the 2^d corners.
class MacroProfile {
public:
  MacroProfile(int d, int n1, int m, ProfileKind kind, std::vector<double> values);

  /// Samples a t1-only profile at the nodes.
  static MacroProfile lift(const Profile1D &g, int d, int n1, int m,
                           ProfileKind kind = ProfileKind::polilinear);

  int dim() const { return d_; }
  int n1() const { return n1_; }
  int m() const { return m_; }
  ProfileKind kind() const { return kind_; }
  std::size_t layer_size() const { return layer_; }
  const std::vector<double> &values() const { return values_; }
  std::vector<double> &values() { return values_; }

  double eval(std::span<const double> t) const;
  /// The column over transverse node c as a function of t1 (exact for
  /// polilinear profiles).
  Profile1D column(std::size_t c) const;

private:
  int d_, n1_, m_;
  ProfileKind kind_;
  std::size_t layer_;
  std::vector<double> values_;
};

MacroProfile macro_step(const Lattice &lat, const FieldState &st);
MacroProfile macro_polilinear(const Lattice &lat, const FieldState &st);
/// Blockwise means over the subboxes of side N^beta, divided by N.
MacroProfile coarse_grain(const Lattice &lat, const FieldState &st, double beta);

/// L^p distance between two profiles of the same shape. Exact when both are
/// piecewise constant; midpoint rule on a refined grid otherwise.
double lp_distance(const MacroProfile &f, const MacroProfile &g, double p = 1);
/// L^p distance to a t1-only profile; exact in t1.
double lp_distance(const MacroProfile &f, const Profile1D &g, double p = 1);

/// Upper bound on the L1 distance between the step and polilinear profiles:
/// 2^{d-1} N^{-d-1} sum over bonds |phi_i - phi_j|.
double step_polilinear_bound(const Lattice &lat, const FieldState &st);

struct WettedRegion {
  double beta = 0;
  double gamma = 0;
  std::vector<std::size_t> boxes; ///< ids in the subbox grid
  std::size_t pinned_inside = 0;  ///< pinned sites inside the region
  double volume_ratio = 0;        ///< pinned_inside / N^{d+1-gamma-eta}
};

WettedRegion wetted_region(const Lattice &lat, const FieldState &st, double beta,
                           double gamma, double eta = 0.2);

double pinned_fraction(const Lattice &lat, const FieldState &st);
/// phi_i >= -log N on every interior site.
bool omega_plus(const Lattice &lat, const FieldState &st);

/// Binary snapshot: "PGFF0001", u32 d, u32 N, (N+1) N^{d-1} little-endian f64.
void write_snapshot(const std::string &path, const Lattice &lat,
                    const std::vector<double> &phi);
struct Snapshot {
  int d = 0;
  int N = 0;
  std::vector<double> phi;
};
Snapshot read_snapshot(const std::string &path);
void write_snapshot_csv(const std::string &path, const Lattice &lat,
                        const std::vector<double> &phi);

} // namespace pgff
