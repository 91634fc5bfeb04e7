#include "pgff/util.hh"

#include <algorithm>
#include <limits>
#include <numeric>
#include <thread>

namespace pgff {

int resolve_threads(int requested) {
  if (requested > 0)
    return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)> &fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 2) {
    fn(0, n);
    return;
  }
  const std::size_t k = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(k - 1);
  const std::size_t chunk = (n + k - 1) / k;
  for (std::size_t t = 1; t < k; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo < hi)
      pool.emplace_back(fn, lo, hi);
  }
  fn(0, std::min(n, chunk));
  for (auto &th : pool)
    th.join();
}

MeanSE iid_mean(std::span<const double> xs) {
  MeanSE r;
  const double n = static_cast<double>(xs.size());
  if (xs.empty())
    return r;
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2)
    return r;
  double ss = 0;
  for (double x : xs)
    ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / (n - 1) / n);
  return r;
}

MeanSE batch_means(std::span<const double> xs, int batches) {
  if (xs.size() < static_cast<std::size_t>(2 * batches))
    return iid_mean(xs);
  const std::size_t len = xs.size() / batches;
  std::vector<double> means(batches);
  for (int k = 0; k < batches; ++k) {
    double s = 0;
    for (std::size_t i = 0; i < len; ++i)
      s += xs[k * len + i];
    means[k] = s / static_cast<double>(len);
  }
  MeanSE r = iid_mean(means);
  // the tail that did not fill a batch still enters the point estimate
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  return r;
}

double split_rhat(std::span<const double> xs) {
  const std::size_t h = xs.size() / 2;
  if (h < 2)
    return std::numeric_limits<double>::quiet_NaN();
  auto stats = [](std::span<const double> v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0;
    for (double x : v)
      s += (x - m) * (x - m);
    return std::pair{m, s / (v.size() - 1)};
  };
  const auto [m1, v1] = stats(xs.subspan(0, h));
  const auto [m2, v2] = stats(xs.subspan(h, h));
  const double w = 0.5 * (v1 + v2);
  const double mm = 0.5 * (m1 + m2);
  const double b = static_cast<double>(h) * ((m1 - mm) * (m1 - mm) + (m2 - mm) * (m2 - mm));
  if (w <= 0)
    return b <= 0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double var = (static_cast<double>(h) - 1) / h * w + b / h;
  return std::sqrt(var / w);
}

double log_sum_exp(std::span<const double> xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs)
    mx = std::max(mx, x);
  if (!std::isfinite(mx))
    return mx;
  double s = 0;
  for (double x : xs)
    s += std::exp(x - mx);
  return mx + std::log(s);
}

} // namespace pgff
