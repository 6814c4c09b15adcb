#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace udcap {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using MatrixXcd = Matrix<std::complex<double>>;
using VectorXd = Vector<double>;
using VectorXcd = Vector<std::complex<double>>;

using Point2 = Eigen::Vector2d;
// Planar point sets are stored column-wise: column i is point i.
using Points2 = Eigen::Matrix<double, 2, Eigen::Dynamic>;

enum class LogBase { bits, nats };

inline double log_in(LogBase base, double x) {
  return base == LogBase::bits ? std::log2(x) : std::log(x);
}

// Conversion factor from natural log to the requested base.
inline double nats_to(LogBase base) {
  return base == LogBase::bits ? 1.0 / std::log(2.0) : 1.0;
}

/// Domain error raised by the library. `kind` is a short machine-readable
/// category ("config", "domain", "numeric", "io") and `field` names the
/// offending input when there is one.
class Error : public std::runtime_error {
public:
  Error(std::string kind, std::string field, const std::string &message)
      : std::runtime_error(message), kind_(std::move(kind)),
        field_(std::move(field)) {}

  const std::string &kind() const noexcept { return kind_; }
  const std::string &field() const noexcept { return field_; }

private:
  std::string kind_;
  std::string field_;
};

} // namespace udcap
