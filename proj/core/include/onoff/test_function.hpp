#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onoff/params.hpp"

namespace onoff {

/// Bounded nonnegative function on R^d x {0,1} from a small closed family with
/// analytically known sup bounds. Each member has one height per state and a
/// shared spatial profile:
///
///   constant  h_i
///   gaussian  h_i * exp(-|x - center|^2 / (2 width^2))
///   tent      h_i * max(0, 1 - |x - center| / width)
///   ball      h_i * 1{|x - center| <= width}
class TestFunction {
 public:
  enum class Kind { constant, gaussian, tent, ball };

  static TestFunction constant(double active, double dormant);
  static TestFunction gaussian(double active, double dormant, std::vector<double> center,
                               double width);
  static TestFunction tent(double active, double dormant, std::vector<double> center,
                           double half_width);
  static TestFunction ball(double active, double dormant, std::vector<double> center,
                           double radius);

  double operator()(std::span<const double> x, State s) const;

  /// Declared bound B with phi <= B everywhere.
  double sup_bound() const;
  /// Radius outside which phi vanishes exactly, if any.
  std::optional<double> support_radius() const;
  /// Radius outside which phi <= rel_tol * sup_bound. Infinite for constants.
  double effective_radius(double rel_tol) const;

  bool has_laplacian() const { return kind_ == Kind::constant || kind_ == Kind::gaussian; }
  /// Spatial Laplacian of phi(., s). Throws MissingDerivative for tent and ball.
  double laplacian(std::span<const double> x, State s) const;

  bool is_continuous() const { return kind_ != Kind::ball; }
  bool is_spatially_constant() const { return kind_ == Kind::constant; }
  bool is_zero() const { return active_ == 0.0 && dormant_ == 0.0; }

  TestFunction scaled(double factor) const;

  Kind kind() const { return kind_; }
  double height(State s) const { return s == State::active ? active_ : dormant_; }
  const std::vector<double>& center() const { return center_; }
  double width() const { return width_; }
  std::string describe() const;

 private:
  TestFunction(Kind kind, double active, double dormant, std::vector<double> center,
               double width);
  double distance(std::span<const double> x) const;

  Kind kind_;
  double active_;
  double dormant_;
  std::vector<double> center_;
  double width_;
};

const char* to_string(TestFunction::Kind kind);

}  // namespace onoff
