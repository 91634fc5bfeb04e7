#include "pgff/field.hh"

#include <cmath>
#include <stdexcept>

namespace pgff {

std::vector<double> boundary_values(const Lattice &lat, double left, double right) {
  std::vector<double> v(lat.site_count(), 0.0);
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (lat.side_of(s) == BoundarySide::left)
      v[s] = left;
    else if (lat.side_of(s) == BoundarySide::right)
      v[s] = right;
  }
  return v;
}

FieldState make_state(const Lattice &lat, double a, double b, std::uint64_t seed,
                      InitKind init) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("boundary slopes must be finite");
  FieldState st;
  st.a = a;
  st.b = b;
  st.seed = seed;
  const double N = lat.side();
  st.phi = boundary_values(lat, a * N, b * N);
  st.pinned.assign(lat.site_count(), 0);
  const int last = lat.extent(0) - 1;
  for (Site s : lat.interior()) {
    switch (init) {
    case InitKind::zero:
      break;
    case InitKind::flat: {
      const double t = static_cast<double>(lat.coord(s, 0)) / last;
      st.phi[s] = (1 - t) * a * N + t * b * N;
      break;
    }
    case InitKind::pinned:
      st.pinned[s] = 1;
      break;
    }
  }
  return st;
}

double hamiltonian(const Lattice &lat, const std::vector<double> &phi) {
  double h = 0;
  for (Site s : lat.interior()) {
    for (auto t : lat.neighbors(s)) {
      const double diff = phi[s] - phi[t];
      h += (lat.is_interior(t) ? 0.25 : 0.5) * diff * diff;
    }
  }
  return h;
}

double region_energy(const Lattice &lat, const Region &region,
                     const std::vector<double> &phi) {
  const auto in = region.mask(lat.site_count());
  double h = 0;
  for (Site s : region.sites) {
    for (auto t : lat.neighbors(s)) {
      const double diff = phi[s] - phi[t];
      h += (in[t] ? 0.25 : 0.5) * diff * diff;
    }
  }
  return h;
}

} // namespace pgff
