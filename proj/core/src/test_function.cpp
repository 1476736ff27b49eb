#include "onoff/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "onoff/error.hpp"

namespace onoff {

TestFunction::TestFunction(Kind kind, double active, double dormant, std::vector<double> center,
                           double width)
    : kind_(kind), active_(active), dormant_(dormant), center_(std::move(center)), width_(width) {
  if (!(active >= 0.0) || !(dormant >= 0.0) || !std::isfinite(active) ||
      !std::isfinite(dormant)) {
    throw InvalidArgument("test function heights must be finite and nonnegative");
  }
  if (kind != Kind::constant && (!(width > 0.0) || !std::isfinite(width))) {
    throw InvalidArgument("test function width must be finite and > 0");
  }
}

TestFunction TestFunction::constant(double active, double dormant) {
  return TestFunction(Kind::constant, active, dormant, {}, 0.0);
}

TestFunction TestFunction::gaussian(double active, double dormant, std::vector<double> center,
                                    double width) {
  return TestFunction(Kind::gaussian, active, dormant, std::move(center), width);
}

TestFunction TestFunction::tent(double active, double dormant, std::vector<double> center,
                                double half_width) {
  return TestFunction(Kind::tent, active, dormant, std::move(center), half_width);
}

TestFunction TestFunction::ball(double active, double dormant, std::vector<double> center,
                                double radius) {
  return TestFunction(Kind::ball, active, dormant, std::move(center), radius);
}

double TestFunction::distance(std::span<const double> x) const {
  double r2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double c = k < center_.size() ? center_[k] : 0.0;
    r2 += (x[k] - c) * (x[k] - c);
  }
  return std::sqrt(r2);
}

double TestFunction::operator()(std::span<const double> x, State s) const {
  const double h = height(s);
  if (h == 0.0) return 0.0;
  switch (kind_) {
    case Kind::constant:
      return h;
    case Kind::gaussian: {
      const double r = distance(x);
      return h * std::exp(-r * r / (2.0 * width_ * width_));
    }
    case Kind::tent:
      return h * std::max(0.0, 1.0 - distance(x) / width_);
    case Kind::ball:
      return distance(x) <= width_ ? h : 0.0;
  }
  return 0.0;
}

double TestFunction::sup_bound() const { return std::max(active_, dormant_); }

std::optional<double> TestFunction::support_radius() const {
  if (kind_ == Kind::tent || kind_ == Kind::ball) return width_;
  if (is_zero()) return 0.0;
  return std::nullopt;
}

double TestFunction::effective_radius(double rel_tol) const {
  if (is_zero()) return 0.0;
  switch (kind_) {
    case Kind::constant:
      return std::numeric_limits<double>::infinity();
    case Kind::gaussian:
      return width_ * std::sqrt(2.0 * std::log(1.0 / rel_tol));
    case Kind::tent:
    case Kind::ball:
      return width_;
  }
  return 0.0;
}

double TestFunction::laplacian(std::span<const double> x, State s) const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::gaussian: {
      const double r = distance(x);
      const double w2 = width_ * width_;
      const double d = static_cast<double>(x.size());
      return (*this)(x, s) * (r * r / (w2 * w2) - d / w2);
    }
    case Kind::tent:
    case Kind::ball:
      break;
  }
  throw MissingDerivative(std::string(to_string(kind_)) + " test function has no Laplacian");
}

TestFunction TestFunction::scaled(double factor) const {
  return TestFunction(kind_, active_ * factor, dormant_ * factor, center_, width_);
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(active=" << active_ << ", dormant=" << dormant_;
  if (kind_ != Kind::constant) {
    os << ", center=[";
    for (std::size_t k = 0; k < center_.size(); ++k) os << (k ? "," : "") << center_[k];
    os << "], width=" << width_;
  }
  os << ")";
  return os.str();
}

const char* to_string(TestFunction::Kind kind) {
  switch (kind) {
    case TestFunction::Kind::constant: return "constant";
    case TestFunction::Kind::gaussian: return "gaussian";
    case TestFunction::Kind::tent: return "tent";
    case TestFunction::Kind::ball: return "ball";
  }
  return "?";
}

}  // namespace onoff
