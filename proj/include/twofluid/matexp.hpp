// Matrix exponential for small dense matrices by scaling and squaring with a
// truncated Taylor series. The scaled norm is kept below 1/2 so the series
// converges to machine precision in a handful of terms.
#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace twofluid {

inline Eigen::Matrix4d expm(const Eigen::Matrix4d& A) {
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    squarings = std::min(squarings, 1060);
  }
  const Eigen::Matrix4d B = A / std::ldexp(1.0, squarings);

  Eigen::Matrix4d result = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = (term * B) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <=
        1e-16 * result.cwiseAbs().maxCoeff())
      break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace twofluid
