#pragma once

// Grid utilities shared by the frame, geometry and propagator layers.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qgp::numerics {

/// Finite-difference weights (Fornberg) for derivative `order` at x0 over
/// arbitrary distinct nodes.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order);

/// Index range [first, first + count) of the `count`-point stencil nearest
/// sample k, shifted inward at the boundaries.
std::pair<std::size_t, std::size_t> stencil(std::size_t k, std::size_t size, std::size_t count = 5);

/// First derivative of sampled data at sample k (five-point stencil).
double derivative_at(std::span<const double> x, std::span<const double> y, std::size_t k);

/// Derivative of every sample.
std::vector<double> derivative(std::span<const double> x, std::span<const double> y);

/// Cumulative integral from x[0], trapezoid with the Euler-Maclaurin end
/// correction per interval, which makes it fourth order for smooth data.
std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> y);

/// Unwraps a phase sequence: each increment is mapped into (-pi, pi].
/// The largest absolute increment is written to `max_step` when given.
std::vector<double> unwrap(std::span<const double> phases, double* max_step = nullptr);

/// Maps x into (-pi, pi].
double wrap_to_pi(double x);

/// Interval index i and fraction t with x in [grid[i], grid[i+1]].
/// Requires grid[0] <= x <= grid.back().
std::pair<std::size_t, double> locate(std::span<const double> grid, double x);

double lerp_at(std::span<const double> grid, std::span<const double> values, double x);

}  // namespace qgp::numerics
