#pragma once

#include <stdexcept>
#include <string>

namespace nakao {

/// Dimension, exponents, data support radius and data size of one problem instance.
struct ProblemParams {
  int n = 1;
  double p = 2.0;
  double q = 2.0;
  double R = 1.0;
  double epsilon = 1.0;
};

/// Throws std::invalid_argument unless n >= 1, p, q > 1 and R, epsilon > 0.
inline void validate(const ProblemParams& params) {
  if (params.n < 1) throw std::invalid_argument("dimension n must be >= 1");
  if (!(params.p > 1.0)) throw std::invalid_argument("exponent p must be > 1");
  if (!(params.q > 1.0)) throw std::invalid_argument("exponent q must be > 1");
  if (!(params.R > 0.0)) throw std::invalid_argument("support radius R must be > 0");
  if (!(params.epsilon > 0.0)) throw std::invalid_argument("data size epsilon must be > 0");
}

}  // namespace nakao
