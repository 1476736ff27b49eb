#pragma once

#include <cstdint>

namespace onoff {

/// Individual state of a particle or of a point of the state space.
enum class State : std::uint8_t { dormant = 0, active = 1 };

inline constexpr const char* to_string(State s) {
  return s == State::active ? "active" : "dormant";
}

/// Rates of the on/off model.
///
/// `gamma` is the critical binary branching rate of active individuals, `c`
/// the rate at which active individuals fall dormant and `c_tilde` the
/// resuscitation rate. Simulators and solvers accept `gamma == 0` so tests
/// can switch branching off; `validate_params` is the strict gate used for
/// user input.
struct ModelParams {
  double gamma = 1.0;
  double c = 1.0;
  double c_tilde = 1.0;
  int dim = 1;

  /// Common bound on |a|, |b| and the switching-kernel mass of the dual's
  /// branching mechanism.
  double q_bound() const { return c + c_tilde + gamma; }

  bool operator==(const ModelParams&) const = default;
};

/// Returns `params` unchanged if every rate is positive and `dim >= 1`.
/// Throws NonPositiveRate or BadDimension otherwise.
ModelParams validate_params(const ModelParams& params);

}  // namespace onoff
