#include "manifold_langevin/fokker_planck.hpp"

#include <cmath>
#include <string>

#include "manifold_langevin/errors.hpp"

namespace manifold_langevin {

namespace {

double checked_spacing(std::span<const double> grid) {
  if (grid.size() < 5) {
    throw InputError("Fokker-Planck residual needs at least 5 grid points, got " +
                     std::to_string(grid.size()));
  }
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(h > 0.0)) {
    throw InputError("Fokker-Planck grid must be strictly increasing");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double step = grid[i] - grid[i - 1];
    if (!(step > 0.0) || std::abs(step - h) > 1e-6 * h) {
      throw InputError("Fokker-Planck grid must be uniform and strictly increasing");
    }
  }
  return h;
}

double finite(double v, const char* what, double x) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string("Fokker-Planck residual: ") + what +
                       " is not finite at x = " + std::to_string(x));
  }
  return v;
}

}  // namespace

std::vector<double> fpe_residual_1d(const ScalarField& drift,
                                    const ScalarField& diffusion_sq,
                                    const ScalarField& density,
                                    const ScalarField& metric,
                                    std::span<const double> grid) {
  const double h = checked_spacing(grid);

  auto sqrt_g = [&](double x) { return std::sqrt(finite(metric(x), "metric", x)); };
  auto gamma = [&](double x) {
    const double dg = (metric(x + h) - metric(x - h)) / (2.0 * h);
    return finite(dg / metric(x), "connection", x);
  };
  // Advective flux p sqrt(g) [a + D gamma / 2] at a point.
  auto advective = [&](double x) {
    const double a = finite(drift(x), "drift", x);
    const double d = finite(diffusion_sq(x), "diffusion", x);
    const double p = finite(density(x), "density", x);
    return p * sqrt_g(x) * (a + 0.5 * d * gamma(x));
  };
  // Diffusive flux sqrt(g) D dp/dx at the midpoint between x and x + h.
  auto diffusive = [&](double x) {
    const double mid = x + 0.5 * h;
    const double dp = (density(x + h) - density(x)) / h;
    return sqrt_g(mid) * finite(diffusion_sq(mid), "diffusion", mid) * dp;
  };

  std::vector<double> out;
  out.reserve(grid.size() - 2);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double x = grid[i];
    const double s = sqrt_g(x);
    const double diffusion_term = (diffusive(x) - diffusive(x - h)) / h / (2.0 * s);
    const double advection_term = (advective(x + h) - advective(x - h)) / (2.0 * h) / s;
    out.push_back(diffusion_term - advection_term);
  }
  return out;
}

std::vector<double> euclidean_fpe_residual_1d(const ScalarField& drift,
                                              const ScalarField& diffusion_sq,
                                              const ScalarField& density,
                                              std::span<const double> grid) {
  const double h = checked_spacing(grid);
  auto flux = [&](double x) {
    return finite(drift(x), "drift", x) * finite(density(x), "density", x);
  };
  auto spread = [&](double x) {
    return finite(diffusion_sq(x), "diffusion", x) * finite(density(x), "density", x);
  };

  std::vector<double> out;
  out.reserve(grid.size() - 2);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double x = grid[i];
    const double advection = (flux(x + h) - flux(x - h)) / (2.0 * h);
    const double diffusion = (spread(x + h) - 2.0 * spread(x) + spread(x - h)) / (h * h);
    out.push_back(-advection + 0.5 * diffusion);
  }
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) {
    throw InputError("uniform_grid: need lo < hi and step > 0");
  }
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = lo + step * static_cast<double>(i);
  }
  return grid;
}

}  // namespace manifold_langevin
