#pragma once

#include <cmath>
#include <complex>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ccz {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Mat8 = Eigen::Matrix<cplx, 8, 8>;
using Vec8 = Eigen::Matrix<cplx, 8, 1>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class ResonanceError : public Error { using Error::Error; };
class AssignmentAmbiguity : public Error { using Error::Error; };
class InvalidArgument : public Error { using Error::Error; };
class SignalLoss : public Error { using Error::Error; };
class NoOperatingPoint : public Error { using Error::Error; };
class UnreachableTarget : public Error { using Error::Error; };
class RankError : public Error { using Error::Error; };
class DominanceError : public Error { using Error::Error; };
class FitDegenerate : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class UncalibratedGate : public Error { using Error::Error; };

/// Reduce an angle to (-pi, pi].
inline double wrap_phase(double phi) {
  double r = std::remainder(phi, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// GHz (linear) -> angular MHz, the internal frequency unit.
inline double ghz_to_angular(double ghz) { return kTwoPi * ghz * 1e3; }
inline double mhz_to_angular(double mhz) { return kTwoPi * mhz; }
inline double angular_to_mhz(double w) { return w / kTwoPi; }
inline double angular_to_ghz(double w) { return w / kTwoPi * 1e-3; }

/// Real number with 15 significant digits, the precision of every text output.
inline std::string format_real(double x) {
  std::ostringstream os;
  os << std::setprecision(15) << x;
  return os.str();
}

}  // namespace ccz
