#pragma once

#include <functional>
#include <span>
#include <vector>

namespace manifold_langevin {

using ScalarField = std::function<double(double)>;

/// Stationary residual of the Fokker-Planck equation on a one-dimensional
/// Riemannian manifold,
///
///   r = 1/(2 sqrt g) d/dx(sqrt g D dp/dx)
///       - 1/sqrt g d/dx(p sqrt g [a + D gamma / 2]),
///
/// where a is the drift, D the squared diffusion coefficient, g the metric
/// and gamma = g^{-1} dg/dx its connection coefficient (same normalisation as
/// christoffel()). All derivatives are second-order central differences with
/// the grid spacing as step. The grid must be uniform; the returned residuals
/// belong to grid[1] .. grid[n-2].
///
/// Throws InputError for fewer than 5 points or a non-uniform grid, and
/// NumericError if any field is non-finite on the grid.
std::vector<double> fpe_residual_1d(const ScalarField& drift,
                                    const ScalarField& diffusion_sq,
                                    const ScalarField& density,
                                    const ScalarField& metric,
                                    std::span<const double> grid);

/// Euclidean counterpart: r = -d/dx(a p) + 1/2 d^2/dx^2(D p). Same grid
/// contract as fpe_residual_1d.
std::vector<double> euclidean_fpe_residual_1d(const ScalarField& drift,
                                              const ScalarField& diffusion_sq,
                                              const ScalarField& density,
                                              std::span<const double> grid);

/// n equally spaced points from lo to hi inclusive.
std::vector<double> uniform_grid(double lo, double hi, double step);

}  // namespace manifold_langevin
