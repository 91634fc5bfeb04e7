#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pgff {

class MacroProfile;

struct Knot {
  double t;
  double value;
};

/// Piecewise-linear function on [0, 1].
class Profile1D {
public:
  Profile1D() = default;
  explicit Profile1D(std::vector<Knot> knots);

  static Profile1D line(double a, double b);

  const std::vector<Knot> &knots() const { return knots_; }
  double operator()(double t) const;
  double left() const { return knots_.front().value; }
  double right() const { return knots_.back().value; }

  std::string to_csv() const;
  static Profile1D from_csv(const std::string &text);

private:
  std::vector<Knot> knots_;
};

struct VariationalParams {
  double a = 1;
  double b = 1;
  double xi = 0;
};

struct EnergyValue {
  double sigma = 0;
  double sigma_star = 0;
};

class NoPinnedMinimizer : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Young's relation: s_L = a / sqrt(2 xi), s_R = 1 - b / sqrt(2 xi).
std::pair<double, double> contact_points(const VariationalParams &p);

/// xi at which the flat and pinned energies coincide: (sqrt a + sqrt b)^4 / 2.
double critical_xi(double a, double b);

bool has_pinned_minimizer(const VariationalParams &p);
double sigma_flat(const VariationalParams &p);
/// sqrt(2 xi)(a + b) - xi; only meaningful when the pinned profile exists.
double sigma_pinned(const VariationalParams &p);
/// Minimum over the admissible candidates.
double sigma_min(const VariationalParams &p);

struct Minimizers {
  Profile1D flat;
  std::optional<Profile1D> pinned;
};

Minimizers build_minimizers(const VariationalParams &p);

/// Exact energy of a piecewise-linear profile. Throws if g(0) != a or g(1) != b.
EnergyValue sigma_1d(const Profile1D &g, const VariationalParams &p,
                     double boundary_tol = 1e-9);

/// Same functional without the boundary check (used for columns of gridded
/// profiles).
double sigma_1d_raw(const Profile1D &g, double xi);

/// Energy of a gridded profile read as its polilinear interpolant: exact
/// column energies in t1, central differences in the periodic directions.
EnergyValue sigma_full(const MacroProfile &h, const VariationalParams &p);

/// sup |f - g| over [0, 1] (attained at a knot of one of them).
double linf_distance(const Profile1D &f, const Profile1D &g);
/// int_0^1 |f - g|^p dt, exact for piecewise-linear inputs.
double lp_distance_1d(const Profile1D &f, const Profile1D &g, double p = 1);
/// Same integral restricted to [lo, hi].
double lp_distance_1d(const Profile1D &f, const Profile1D &g, double p, double lo,
                      double hi);

struct Certificate {
  bool pass = true;
  double distance = 0;   ///< d_inf(g, {flat, pinned})
  double sigma_star = 0; ///< Sigma*(g)
  double required = 0;   ///< delta^2
};

/// Checks d_inf(g, minimizers) >= delta => Sigma*(g) >= delta^2.
Certificate stability_certificate(const Profile1D &g, const VariationalParams &p,
                                  double delta, double tol = 1e-12);

} // namespace pgff
