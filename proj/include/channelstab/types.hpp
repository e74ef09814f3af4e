#pragma once

#include <complex>
#include <Eigen/Dense>

namespace cstab {

using cd = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr cd I_{0.0, 1.0};

struct ModeIndex {
  int k = 0;
  int l = 0;
  double radius() const;
  bool operator==(const ModeIndex&) const = default;
};

}  // namespace cstab
