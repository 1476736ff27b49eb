#include "onoff/params.hpp"

#include <cmath>
#include <string>

#include "onoff/error.hpp"

namespace onoff {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw NonPositiveRate(std::string(name) + " must be a finite positive rate, got " +
                          std::to_string(value));
  }
}

}  // namespace

ModelParams validate_params(const ModelParams& params) {
  require_positive(params.gamma, "gamma");
  require_positive(params.c, "c");
  require_positive(params.c_tilde, "c_tilde");
  if (params.dim < 1) {
    throw BadDimension("dim must be >= 1, got " + std::to_string(params.dim));
  }
  return params;
}

}  // namespace onoff
