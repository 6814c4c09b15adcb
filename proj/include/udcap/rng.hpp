#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "udcap/types.hpp"

namespace udcap {

/// Reproducible random stream keyed by (seed, stream_id).
///
/// The engine is a 64-bit Mersenne Twister initialised through
/// std::seed_seq, both of which are fully specified by the standard, and
/// every distribution below is implemented here rather than taken from
/// <random>, so a given key produces the same sequence on every platform.
/// Streams are values: copy one to hand it to a worker, never share one
/// mutably across threads.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent child stream; the same tag always yields the same child.
  RngStream substream(std::uint64_t tag) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double standard_normal();

private:
  RngStream(std::uint64_t seed, std::uint64_t stream_id,
            std::vector<std::uint64_t> path);

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// n draws of CN(0,1): independent N(0, 1/2) real and imaginary parts.
VectorXcd sample_complex_gaussian(RngStream &stream, Index n);

/// Fills `out` with CN(0,1) draws in column-major order.
void fill_complex_gaussian(RngStream &stream, MatrixXcd &out);

std::uint64_t sample_poisson(RngStream &stream, double lambda);

/// n i.i.d. draws from N(mu, sigma^2) truncated to [lo, hi] by inversion of
/// the CDF restricted to the interval.
VectorXd sample_truncated_normal(RngStream &stream, double mu, double sigma,
                                 double lo, double hi, Index n);

/// Standard normal CDF and its inverse, exposed for tests and oracles.
double normal_cdf(double z);
double normal_quantile(double p);

} // namespace udcap
