#include "pgff/analytic.hh"
#include "pgff/observables.hh"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace pgff {

Profile1D::Profile1D(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2)
    throw std::invalid_argument("profile needs at least two knots");
  if (knots_.front().t != 0.0 || knots_.back().t != 1.0)
    throw std::invalid_argument("profile knots must start at t=0 and end at t=1");
  for (std::size_t k = 1; k < knots_.size(); ++k)
    if (!(knots_[k].t > knots_[k - 1].t))
      throw std::invalid_argument("profile knots must be strictly increasing in t");
  for (const auto &k : knots_)
    if (!std::isfinite(k.value))
      throw std::invalid_argument("profile value is not finite");
}

Profile1D Profile1D::line(double a, double b) { return Profile1D({{0.0, a}, {1.0, b}}); }

double Profile1D::operator()(double t) const {
  if (t <= 0.0)
    return knots_.front().value;
  if (t >= 1.0)
    return knots_.back().value;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double x, const Knot &k) { return x < k.t; });
  const Knot &hi = *it;
  const Knot &lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return (1 - w) * lo.value + w * hi.value;
}

std::string Profile1D::to_csv() const {
  std::ostringstream os;
  os << "t,value\n" << std::setprecision(17);
  for (const auto &k : knots_)
    os << k.t << ',' << k.value << '\n';
  return os.str();
}

Profile1D Profile1D::from_csv(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  std::vector<Knot> ks;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 't' || line[0] == '#')
      continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("malformed profile row: " + line);
    ks.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return Profile1D(std::move(ks));
}

bool has_pinned_minimizer(const VariationalParams &p) {
  return p.xi > 0 && p.a + p.b < std::sqrt(2 * p.xi);
}

std::pair<double, double> contact_points(const VariationalParams &p) {
  if (!(p.a > 0 && p.b > 0))
    throw std::invalid_argument("slopes a, b must be positive");
  if (!has_pinned_minimizer(p))
    throw NoPinnedMinimizer("no pinned minimizer: a + b >= sqrt(2 xi)");
  const double s = std::sqrt(2 * p.xi);
  return {p.a / s, 1 - p.b / s};
}

double critical_xi(double a, double b) {
  if (!(a > 0 && b >= 0))
    throw std::invalid_argument("critical_xi needs a > 0, b >= 0");
  const double r = std::sqrt(a) + std::sqrt(b);
  return 0.5 * r * r * r * r;
}

double sigma_flat(const VariationalParams &p) { return 0.5 * (p.a - p.b) * (p.a - p.b); }

double sigma_pinned(const VariationalParams &p) {
  return std::sqrt(2 * p.xi) * (p.a + p.b) - p.xi;
}

double sigma_min(const VariationalParams &p) {
  const double flat = sigma_flat(p);
  return has_pinned_minimizer(p) ? std::min(flat, sigma_pinned(p)) : flat;
}

Minimizers build_minimizers(const VariationalParams &p) {
  if (!(p.a > 0 && p.b > 0))
    throw std::invalid_argument("slopes a, b must be positive");
  Minimizers m{Profile1D::line(p.a, p.b), std::nullopt};
  if (has_pinned_minimizer(p)) {
    const auto [sl, sr] = contact_points(p);
    m.pinned = Profile1D({{0.0, p.a}, {sl, 0.0}, {sr, 0.0}, {1.0, p.b}});
  }
  return m;
}

double sigma_1d_raw(const Profile1D &g, double xi) {
  const auto &k = g.knots();
  double grad = 0, zero = 0;
  for (std::size_t i = 1; i < k.size(); ++i) {
    const double dt = k[i].t - k[i - 1].t;
    const double dv = k[i].value - k[i - 1].value;
    grad += 0.5 * dv * dv / dt;
    if (k[i].value == 0.0 && k[i - 1].value == 0.0)
      zero += dt;
  }
  return grad - xi * zero;
}

EnergyValue sigma_1d(const Profile1D &g, const VariationalParams &p, double boundary_tol) {
  if (std::abs(g.left() - p.a) > boundary_tol * (1 + std::abs(p.a)) ||
      std::abs(g.right() - p.b) > boundary_tol * (1 + std::abs(p.b)))
    throw std::invalid_argument("profile violates boundary values g(0)=a, g(1)=b");
  EnergyValue e;
  e.sigma = sigma_1d_raw(g, p.xi);
  e.sigma_star = e.sigma - sigma_min(p);
  return e;
}

EnergyValue sigma_full(const MacroProfile &h, const VariationalParams &p) {
  const int d = h.dim();
  const int n1 = h.n1();
  const int m = h.m();
  const std::size_t layer = h.layer_size();
  if (h.values().size() != static_cast<std::size_t>(n1 + 1) * layer)
    throw std::invalid_argument("profile grid shape does not match its values");

  double columns = 0;
  std::vector<Knot> ks(n1 + 1);
  for (std::size_t c = 0; c < layer; ++c) {
    for (int i = 0; i <= n1; ++i)
      ks[i] = {static_cast<double>(i) / n1, h.values()[i * layer + c]};
    ks[n1].t = 1.0;
    columns += sigma_1d_raw(Profile1D(ks), p.xi);
  }
  columns /= static_cast<double>(layer);

  double transverse = 0;
  if (d > 1) {
    std::vector<std::size_t> stride(d, 1);
    for (int a = d - 2; a >= 1; --a)
      stride[a] = stride[a + 1] * m;
    const double inv_h = m / 2.0;
    for (int i = 0; i <= n1; ++i) {
      const double w1 = (i == 0 || i == n1) ? 0.5 : 1.0;
      double acc = 0;
      for (std::size_t c = 0; c < layer; ++c) {
        double g2 = 0;
        for (int a = 1; a < d; ++a) {
          const int ca = static_cast<int>((c / stride[a]) % m);
          const std::size_t up = c + (((ca + 1) % m) - ca) * static_cast<std::ptrdiff_t>(stride[a]);
          const std::size_t dn = c + (((ca - 1 + m) % m) - ca) * static_cast<std::ptrdiff_t>(stride[a]);
          const double dv = (h.values()[i * layer + up] - h.values()[i * layer + dn]) * inv_h;
          g2 += dv * dv;
        }
        acc += 0.5 * g2;
      }
      transverse += w1 * acc;
    }
    transverse /= static_cast<double>(n1) * static_cast<double>(layer);
  }
  EnergyValue e;
  e.sigma = columns + transverse;
  e.sigma_star = e.sigma - sigma_min(p);
  return e;
}

namespace {

std::vector<double> merged_breaks(const Profile1D &f, const Profile1D &g) {
  std::vector<double> ts;
  for (const auto &k : f.knots())
    ts.push_back(k.t);
  for (const auto &k : g.knots())
    ts.push_back(k.t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

// int_0^L |u + (v - u) s / L|^p ds
double abs_pow_linear(double u, double v, double len, double p) {
  if (len <= 0)
    return 0;
  auto prim = [p](double x) { return std::pow(std::abs(x), p + 1) / (p + 1); };
  if (u == v)
    return std::pow(std::abs(u), p) * len;
  if ((u >= 0 && v >= 0) || (u <= 0 && v <= 0))
    return len * std::abs(prim(v) - prim(u)) / std::abs(v - u);
  // sign change: split at the root
  const double root = len * u / (u - v);
  return root * prim(u) / std::abs(u) + (len - root) * prim(v) / std::abs(v);
}

} // namespace

double lp_distance_1d(const Profile1D &f, const Profile1D &g, double p, double lo,
                      double hi) {
  if (!(lo < hi))
    return 0;
  std::vector<double> ts{lo, hi};
  for (double t : merged_breaks(f, g))
    if (t > lo && t < hi)
      ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  double s = 0;
  for (std::size_t i = 1; i < ts.size(); ++i)
    s += abs_pow_linear(f(ts[i - 1]) - g(ts[i - 1]), f(ts[i]) - g(ts[i]), ts[i] - ts[i - 1], p);
  return s;
}

double lp_distance_1d(const Profile1D &f, const Profile1D &g, double p) {
  return lp_distance_1d(f, g, p, 0.0, 1.0);
}

double linf_distance(const Profile1D &f, const Profile1D &g) {
  double m = 0;
  for (double t : merged_breaks(f, g))
    m = std::max(m, std::abs(f(t) - g(t)));
  return m;
}

Certificate stability_certificate(const Profile1D &g, const VariationalParams &p,
                                  double delta, double tol) {
  if (delta > 2 * std::sqrt(2 * p.xi))
    throw std::invalid_argument("certificate needs delta <= 2 sqrt(2 xi)");
  const auto mins = build_minimizers(p);
  Certificate c;
  c.distance = linf_distance(g, mins.flat);
  if (mins.pinned)
    c.distance = std::min(c.distance, linf_distance(g, *mins.pinned));
  c.sigma_star = sigma_1d(g, p).sigma_star;
  c.required = delta * delta;
  c.pass = c.distance < delta || c.sigma_star >= c.required - tol;
  return c;
}

} // namespace pgff
