#include "onoff/dual/grid.hpp"

#include <algorithm>
#include <cmath>

#include "onoff/error.hpp"

namespace onoff::dual {

Grid Grid::centered(double center, double half_width, double dx) {
  if (!(dx > 0.0)) throw InvalidArgument("dx must be > 0");
  if (!(half_width > 0.0)) throw InvalidArgument("half_width must be > 0");
  const auto half_cells = static_cast<std::size_t>(std::ceil(half_width / dx - 1e-9));
  return {center - static_cast<double>(half_cells) * dx, dx, 2 * half_cells};
}

Grid auto_grid(const TestFunction& phi, double T, double dx, double margin_factor) {
  const double center = phi.center().empty() ? 0.0 : phi.center().front();
  if (phi.is_spatially_constant()) return Grid::centered(center, 1.0, dx);
  const double radius = phi.effective_radius(kEffectiveRadiusTol);
  return Grid::centered(center, radius + margin_factor * std::sqrt(std::max(T, 0.0)), dx);
}

DualField::DualField(const Grid& g, double t)
    : grid(g), active(g.size(), 0.0), dormant(g.size(), 0.0), time(t) {}

double DualField::sup_norm() const {
  double m = 0.0;
  for (double v : active) m = std::max(m, std::abs(v));
  for (double v : dormant) m = std::max(m, std::abs(v));
  return m;
}

double DualField::min_value() const {
  double m = active.empty() ? 0.0 : active.front();
  for (double v : active) m = std::min(m, v);
  for (double v : dormant) m = std::min(m, v);
  return m;
}

bool DualField::finite() const {
  auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(active.begin(), active.end(), ok) &&
         std::all_of(dormant.begin(), dormant.end(), ok);
}

double DualField::interpolate(double x, State s) const {
  const auto& v = component(s);
  const double u = (x - grid.x_min) / grid.dx;
  if (u <= 0.0) return v.front();
  if (u >= static_cast<double>(grid.n_cells)) return v.back();
  const auto j = static_cast<std::size_t>(u);
  const double w = u - static_cast<double>(j);
  return (1.0 - w) * v[j] + w * v[j + 1];
}

DualField sample(const TestFunction& phi, const Grid& grid) {
  DualField f(grid, 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x[1] = {grid.x(j)};
    f.active[j] = phi(x, State::active);
    f.dormant[j] = phi(x, State::dormant);
  }
  return f;
}

double sup_difference(const DualField& a, const DualField& b) {
  double m = 0.0;
  if (a.grid == b.grid) {
    for (std::size_t j = 0; j < a.grid.size(); ++j) {
      m = std::max({m, std::abs(a.active[j] - b.active[j]), std::abs(a.dormant[j] - b.dormant[j])});
    }
    return m;
  }
  for (std::size_t j = 0; j < a.grid.size(); ++j) {
    const double x = a.grid.x(j);
    m = std::max({m, std::abs(a.active[j] - b.interpolate(x, State::active)),
                  std::abs(a.dormant[j] - b.interpolate(x, State::dormant))});
  }
  return m;
}

}  // namespace onoff::dual
