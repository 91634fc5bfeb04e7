#include "pgff/observables.hh"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace pgff {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

MacroProfile::MacroProfile(int d, int n1, int m, ProfileKind kind, std::vector<double> values)
    : d_(d), n1_(n1), m_(m), kind_(kind), values_(std::move(values)) {
  if (d < 1 || n1 < 1 || m < 1)
    throw std::invalid_argument("profile grid needs d, n1, m >= 1");
  layer_ = 1;
  for (int a = 1; a < d; ++a)
    layer_ *= static_cast<std::size_t>(m);
  if (values_.size() != static_cast<std::size_t>(n1 + 1) * layer_)
    throw std::invalid_argument("profile values do not match grid shape");
}

MacroProfile MacroProfile::lift(const Profile1D &g, int d, int n1, int m, ProfileKind kind) {
  std::size_t layer = 1;
  for (int a = 1; a < d; ++a)
    layer *= static_cast<std::size_t>(m);
  std::vector<double> v((n1 + 1) * layer);
  for (int i = 0; i <= n1; ++i) {
    const double val = g(static_cast<double>(i) / n1);
    std::fill(v.begin() + i * layer, v.begin() + (i + 1) * layer, val);
  }
  return MacroProfile(d, n1, m, kind, std::move(v));
}

double MacroProfile::eval(std::span<const double> t) const {
  if (t.size() != static_cast<std::size_t>(d_))
    throw std::invalid_argument("evaluation point has wrong dimension");
  auto wrap = [this](long k) { return static_cast<std::size_t>(((k % m_) + m_) % m_); };
  if (kind_ != ProfileKind::polilinear) {
    const bool nearest = kind_ == ProfileKind::step;
    auto pick = [nearest](double x) {
      return nearest ? static_cast<long>(std::floor(x + 0.5)) : static_cast<long>(std::floor(x));
    };
    std::size_t idx = static_cast<std::size_t>(std::clamp<long>(pick(t[0] * n1_), 0, n1_));
    for (int a = 1; a < d_; ++a)
      idx = idx * m_ + wrap(pick(t[a] * m_));
    return values_[idx];
  }
  const double x1 = std::clamp(t[0], 0.0, 1.0) * n1_;
  const long i1 = std::min<long>(static_cast<long>(std::floor(x1)), n1_ - 1);
  std::vector<long> base(d_);
  std::vector<double> frac(d_);
  base[0] = i1;
  frac[0] = x1 - i1;
  for (int a = 1; a < d_; ++a) {
    const double x = t[a] * m_;
    base[a] = static_cast<long>(std::floor(x));
    frac[a] = x - base[a];
  }
  double s = 0;
  for (unsigned corner = 0; corner < (1u << d_); ++corner) {
    double w = 1;
    std::size_t idx = 0;
    for (int a = 0; a < d_; ++a) {
      const bool up = (corner >> a) & 1u;
      w *= up ? frac[a] : 1 - frac[a];
      const long k = base[a] + (up ? 1 : 0);
      idx = a == 0 ? static_cast<std::size_t>(k) : idx * m_ + wrap(k);
    }
    if (w != 0)
      s += w * values_[idx];
  }
  return s;
}

Profile1D MacroProfile::column(std::size_t c) const {
  std::vector<Knot> ks(n1_ + 1);
  for (int i = 0; i <= n1_; ++i)
    ks[i] = {static_cast<double>(i) / n1_, values_[i * layer_ + c]};
  ks[n1_].t = 1.0;
  return Profile1D(std::move(ks));
}

namespace {

void require_cylinder(const Lattice &lat) {
  if (lat.kind() != LatticeKind::cylinder)
    throw std::invalid_argument("macroscopic profiles are defined on the cylinder");
}

MacroProfile scaled(const Lattice &lat, const FieldState &st, ProfileKind kind) {
  require_cylinder(lat);
  const double N = lat.side();
  std::vector<double> v(st.phi.size());
  for (std::size_t s = 0; s < v.size(); ++s)
    v[s] = st.phi[s] / N;
  return MacroProfile(lat.dim(), lat.side(), lat.side(), kind, std::move(v));
}

// Visits midpoints of a grid refined r times per cell; calls fn(point, weight).
template <class F>
void midpoint_grid(int d, int n1, int m, int r, F &&fn) {
  const long k1 = static_cast<long>(n1) * r;
  const long km = static_cast<long>(m) * r;
  std::vector<long> idx(d, 0);
  std::vector<double> t(d);
  double w = 1.0 / k1;
  for (int a = 1; a < d; ++a)
    w /= km;
  while (true) {
    t[0] = (idx[0] + 0.5) / k1;
    for (int a = 1; a < d; ++a)
      t[a] = (idx[a] + 0.5) / km;
    fn(std::span<const double>(t), w);
    int a = d - 1;
    for (; a >= 0; --a) {
      if (++idx[a] < (a == 0 ? k1 : km))
        break;
      idx[a] = 0;
    }
    if (a < 0)
      break;
  }
}

} // namespace

MacroProfile macro_step(const Lattice &lat, const FieldState &st) {
  return scaled(lat, st, ProfileKind::step);
}

MacroProfile macro_polilinear(const Lattice &lat, const FieldState &st) {
  return scaled(lat, st, ProfileKind::polilinear);
}

MacroProfile coarse_grain(const Lattice &lat, const FieldState &st, double beta) {
  require_cylinder(lat);
  const SubboxGrid grid = subbox_partition(lat, beta);
  const double N = lat.side();
  std::vector<double> v(st.phi.size());
  for (std::size_t s = 0; s < v.size(); ++s)
    v[s] = st.phi[s] / N;
  for (const auto &box : grid.boxes) {
    double mean = 0;
    for (Site s : box)
      mean += st.phi[s];
    mean /= static_cast<double>(box.size());
    for (Site s : box)
      v[s] = mean / N;
  }
  return MacroProfile(lat.dim(), lat.side(), lat.side(), ProfileKind::coarse, std::move(v));
}

double lp_distance(const MacroProfile &f, const MacroProfile &g, double p) {
  if (f.dim() != g.dim() || f.n1() != g.n1() || f.m() != g.m())
    throw std::invalid_argument("lp_distance: profile shapes differ");
  if (p < 1)
    throw std::invalid_argument("lp_distance needs p >= 1");
  const bool exact = f.kind() != ProfileKind::polilinear && g.kind() != ProfileKind::polilinear;
  double s = 0;
  midpoint_grid(f.dim(), f.n1(), f.m(), exact ? 2 : 4,
                [&](std::span<const double> t, double w) {
                  s += w * std::pow(std::abs(f.eval(t) - g.eval(t)), p);
                });
  return std::pow(s, 1.0 / p);
}

double lp_distance(const MacroProfile &f, const Profile1D &g, double p) {
  if (p < 1)
    throw std::invalid_argument("lp_distance needs p >= 1");
  const int n1 = f.n1();
  const std::size_t layer = f.layer_size();
  const auto &v = f.values();
  double s = 0;
  switch (f.kind()) {
  case ProfileKind::step:
  case ProfileKind::coarse: {
    const bool step = f.kind() == ProfileKind::step;
    for (std::size_t c = 0; c < layer; ++c) {
      const int last = step ? n1 : n1 - 1;
      for (int i = 0; i <= last; ++i) {
        const double lo = step ? std::max(0.0, (i - 0.5) / n1) : static_cast<double>(i) / n1;
        const double hi = step ? std::min(1.0, (i + 0.5) / n1) : static_cast<double>(i + 1) / n1;
        const double val = v[i * layer + c];
        s += lp_distance_1d(Profile1D::line(val, val), g, p, lo, hi);
      }
    }
    s /= static_cast<double>(layer);
    break;
  }
  case ProfileKind::polilinear: {
    if (f.dim() == 1) {
      s = lp_distance_1d(f.column(0), g, p);
      break;
    }
    // t1 exact per column, transverse midpoint rule
    const int d = f.dim();
    const int m = f.m();
    const int r = 4;
    std::vector<double> t(d);
    std::vector<Knot> ks(n1 + 1);
    std::size_t count = 0;
    const long km = static_cast<long>(m) * r;
    std::vector<long> idx(d, 0);
    while (true) {
      t[0] = 0;
      for (int a = 1; a < d; ++a)
        t[a] = (idx[a] + 0.5) / km;
      for (int i = 0; i <= n1; ++i) {
        t[0] = static_cast<double>(i) / n1;
        ks[i] = {t[0], f.eval(t)};
      }
      ks[n1].t = 1.0;
      s += lp_distance_1d(Profile1D(ks), g, p);
      ++count;
      int a = d - 1;
      for (; a >= 1; --a) {
        if (++idx[a] < km)
          break;
        idx[a] = 0;
      }
      if (a < 1)
        break;
    }
    s /= static_cast<double>(count);
    break;
  }
  }
  return std::pow(s, 1.0 / p);
}

double step_polilinear_bound(const Lattice &lat, const FieldState &st) {
  require_cylinder(lat);
  const int d = lat.dim();
  double sum = 0;
  for (std::size_t s = 0; s < lat.site_count(); ++s) {
    for (int a = 0; a < d; ++a) {
      const auto t = lat.neighbor(s, 2 * a);
      if (t != no_site)
        sum += std::abs(st.phi[s] - st.phi[t]);
    }
  }
  return std::ldexp(1.0, d - 1) * sum / std::pow(lat.side(), d + 1);
}

WettedRegion wetted_region(const Lattice &lat, const FieldState &st, double beta,
                           double gamma, double eta) {
  require_cylinder(lat);
  if (!(gamma > 0 && gamma < 1))
    throw std::invalid_argument("gamma must lie in (0, 1)");
  const SubboxGrid grid = subbox_partition(lat, beta);
  const double N = lat.side();
  const double level = std::pow(N, gamma);
  WettedRegion w;
  w.beta = beta;
  w.gamma = gamma;
  for (std::size_t k = 0; k < grid.count(); ++k) {
    double mean = 0;
    for (Site s : grid.boxes[k])
      mean += st.phi[s];
    mean /= static_cast<double>(grid.boxes[k].size());
    if (mean >= level) {
      w.boxes.push_back(k);
      for (Site s : grid.boxes[k])
        if (lat.is_interior(s) && st.pinned[s])
          ++w.pinned_inside;
    }
  }
  w.volume_ratio = w.pinned_inside / std::pow(N, lat.dim() + 1 - gamma - eta);
  return w;
}

double pinned_fraction(const Lattice &lat, const FieldState &st) {
  std::size_t n = 0;
  for (Site s : lat.interior())
    n += st.pinned[s] ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(lat.interior_count());
}

bool omega_plus(const Lattice &lat, const FieldState &st) {
  const double floor = -std::log(static_cast<double>(lat.side()));
  for (Site s : lat.interior())
    if (st.phi[s] < floor)
      return false;
  return true;
}

void write_snapshot(const std::string &path, const Lattice &lat,
                    const std::vector<double> &phi) {
  require_cylinder(lat);
  if (phi.size() != lat.site_count())
    throw std::invalid_argument("snapshot field has wrong size");
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot open " + path + " for writing");
  const std::uint32_t d = lat.dim(), N = lat.side();
  os.write("PGFF0001", 8);
  os.write(reinterpret_cast<const char *>(&d), 4);
  os.write(reinterpret_cast<const char *>(&N), 4);
  os.write(reinterpret_cast<const char *>(phi.data()), phi.size() * sizeof(double));
  if (!os)
    throw std::runtime_error("write failed for " + path);
}

Snapshot read_snapshot(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw std::runtime_error("cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "PGFF0001", 8) != 0)
    throw std::runtime_error(path + ": not a PGFF0001 snapshot");
  std::uint32_t d = 0, N = 0;
  is.read(reinterpret_cast<char *>(&d), 4);
  is.read(reinterpret_cast<char *>(&N), 4);
  if (!is || d < 1 || N < 2)
    throw std::runtime_error(path + ": bad snapshot header");
  std::size_t count = N + 1;
  for (std::uint32_t a = 1; a < d; ++a)
    count *= N;
  Snapshot snap{static_cast<int>(d), static_cast<int>(N), std::vector<double>(count)};
  is.read(reinterpret_cast<char *>(snap.phi.data()), count * sizeof(double));
  if (!is)
    throw std::runtime_error(path + ": truncated snapshot");
  return snap;
}

void write_snapshot_csv(const std::string &path, const Lattice &lat,
                        const std::vector<double> &phi) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot open " + path + " for writing");
  for (int a = 0; a < lat.dim(); ++a)
    os << 'i' << a + 1 << ',';
  os << "phi\n" << std::setprecision(17);
  for (std::size_t s = 0; s < lat.site_count(); ++s) {
    for (int c : lat.decode(s))
      os << c << ',';
    os << phi[s] << '\n';
  }
}

} // namespace pgff
