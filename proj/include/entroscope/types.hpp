#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace entroscope {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Single source of truth for rank/support decisions: eigenvalues with
// |lambda| <= kEigEps are treated as zero everywhere in the library.
inline constexpr double kEigEps = 1e-10;

// Everything is measured in nats; ln 2 converts to/from bits where needed.
inline constexpr double kLn2 = 0.6931471805599453;

// Resource caps for brute-force enumeration and dense eigensolves.
inline constexpr long kSequenceCap = 1L << 20;
inline constexpr int kDenseDimCap = 4096;

// Thrown when an operation would exceed one of the documented size caps.
struct cap_exceeded : std::runtime_error {
  explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

// Complex Hermitian PSD unit-trace matrix together with the subsystem
// dimension list. Ordering is big-endian: the first subsystem varies slowest,
// matching the Kronecker-product convention of tensor().
struct DensityMatrix {
  Mat mat;
  std::vector<int> dims;

  DensityMatrix() = default;
  DensityMatrix(Mat m, std::vector<int> d);

  int dim() const { return static_cast<int>(mat.rows()); }
  // Checks hermiticity (1e-10), spectrum >= -1e-10 and unit trace (1e-10).
  void validate() const;
};

// Finite measurement: PSD effects summing to the identity.
struct Povm {
  std::vector<Mat> effects;
  void validate() const;
};

}  // namespace entroscope
