#include "qgp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qgp/error.hpp"

namespace qgp::numerics {

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order) {
  // B. Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const std::size_t n = nodes.size();
  const auto m = static_cast<std::size_t>(order);
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

std::pair<std::size_t, std::size_t> stencil(std::size_t k, std::size_t size, std::size_t count) {
  count = std::min(count, size);
  const std::size_t half = count / 2;
  std::size_t first = k >= half ? k - half : 0;
  if (first + count > size) first = size - count;
  return {first, count};
}

double derivative_at(std::span<const double> x, std::span<const double> y, std::size_t k) {
  const auto [first, count] = stencil(k, x.size());
  const auto w = fd_weights(x[k], x.subspan(first, count), 1);
  double d = 0.0;
  for (std::size_t i = 0; i < count; ++i) d += w[i] * y[first + i];
  return d;
}

std::vector<double> derivative(std::span<const double> x, std::span<const double> y) {
  std::vector<double> d(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) d[k] = derivative_at(x, y, k);
  return d;
}

std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> y) {
  std::vector<double> out(x.size(), 0.0);
  if (x.size() < 2) return out;
  const std::vector<double> dy = x.size() >= 5 ? derivative(x, y) : std::vector<double>(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    out[i + 1] = out[i] + 0.5 * h * (y[i] + y[i + 1]) - h * h / 12.0 * (dy[i + 1] - dy[i]);
  }
  return out;
}

double wrap_to_pi(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(x, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

std::vector<double> unwrap(std::span<const double> phases, double* max_step) {
  std::vector<double> out(phases.size());
  double biggest = 0.0;
  if (!phases.empty()) out[0] = phases[0];
  for (std::size_t i = 1; i < phases.size(); ++i) {
    const double step = wrap_to_pi(phases[i] - phases[i - 1]);
    biggest = std::max(biggest, std::abs(step));
    out[i] = out[i - 1] + step;
  }
  if (max_step != nullptr) *max_step = biggest;
  return out;
}

std::pair<std::size_t, double> locate(std::span<const double> grid, double x) {
  if (grid.size() < 2) return {0, 0.0};
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  i = std::min(i, grid.size() - 2);
  const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
  return {i, t};
}

double lerp_at(std::span<const double> grid, std::span<const double> values, double x) {
  if (grid.size() == 1) return values[0];
  const auto [i, t] = locate(grid, x);
  return (1.0 - t) * values[i] + t * values[i + 1];
}

}  // namespace qgp::numerics
