#pragma once

#include "pgff/lattice.hh"

#include <cstdint>
#include <vector>

namespace pgff {

/// One configuration over all stored sites. Fixed sites carry the boundary
/// data; `pinned` is only meaningful on interior sites.
struct FieldState {
  std::vector<double> phi;
  std::vector<std::uint8_t> pinned;
  double a = 0; ///< left slope: phi = a N on the left boundary
  double b = 0; ///< right slope: phi = b N on the right boundary
  std::uint64_t seed = 0;
  std::uint64_t sweep = 0;
};

enum class InitKind {
  zero,   ///< interior at 0, nothing pinned
  flat,   ///< interior on the straight line between the boundary values
  pinned, ///< interior at 0 and every site pinned
};

/// Field that is `left` on the left boundary, `right` on the right boundary
/// and 0 everywhere else (interior and transverse halos).
std::vector<double> boundary_values(const Lattice &lat, double left, double right);

FieldState make_state(const Lattice &lat, double a, double b, std::uint64_t seed,
                      InitKind init = InitKind::zero);

/// Bond energy of the whole configuration; bonds between two fixed sites are
/// left out. Each interior-interior slot carries 1/4, each slot to a fixed
/// site 1/2, so a genuine bond counts 1/2 (phi_i - phi_j)^2.
double hamiltonian(const Lattice &lat, const std::vector<double> &phi);

/// Bonds with at least one end in `region`.
double region_energy(const Lattice &lat, const Region &region,
                     const std::vector<double> &phi);

} // namespace pgff
