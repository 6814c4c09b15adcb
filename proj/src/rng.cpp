#include "udcap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace udcap {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id,
                            const std::vector<std::uint64_t> &path) {
  std::vector<std::uint32_t> words;
  words.reserve(4 + 2 * path.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  push(stream_id);
  for (auto tag : path)
    push(tag);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

// Small-mean Poisson by sequential inversion of the CDF.
std::uint64_t poisson_inversion(RngStream &stream, double lambda) {
  double u = stream.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
    if (p < std::numeric_limits<double>::min() && cdf >= 1.0 - 1e-15)
      break;
  }
  return k;
}

// Hoermann's transformed rejection with squeeze (PTRS), valid for lambda >= 10.
std::uint64_t poisson_ptrs(RngStream &stream, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  while (true) {
    const double u = stream.uniform() - 0.5;
    const double v = stream.uniform_open();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr)
      return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us))
      continue;
    const double lhs = std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b);
    const double rhs = -lambda + k * loglam - std::lgamma(k + 1.0);
    if (lhs <= rhs)
      return static_cast<std::uint64_t>(k);
  }
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : RngStream(seed, stream_id, {}) {}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id,
                     std::vector<std::uint64_t> path)
    : seed_(seed), stream_id_(stream_id), path_(std::move(path)),
      engine_(make_engine(seed_, stream_id_, path_)) {}

RngStream RngStream::substream(std::uint64_t tag) const {
  auto path = path_;
  path.push_back(tag);
  return RngStream(seed_, stream_id_, std::move(path));
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double x, y, s;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    s = x * x + y * y;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = y * scale;
  has_spare_ = true;
  return x * scale;
}

VectorXcd sample_complex_gaussian(RngStream &stream, Index n) {
  if (n < 0)
    throw Error("domain", "n", "sample count must be nonnegative");
  VectorXcd out(n);
  const double s = std::sqrt(0.5);
  for (Index i = 0; i < n; ++i) {
    const double re = stream.standard_normal();
    const double im = stream.standard_normal();
    out(i) = {s * re, s * im};
  }
  return out;
}

void fill_complex_gaussian(RngStream &stream, MatrixXcd &out) {
  const double s = std::sqrt(0.5);
  auto *data = out.data();
  for (Index i = 0; i < out.size(); ++i) {
    const double re = stream.standard_normal();
    const double im = stream.standard_normal();
    data[i] = {s * re, s * im};
  }
}

std::uint64_t sample_poisson(RngStream &stream, double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw Error("domain", "lambda",
                "Poisson mean must be finite and nonnegative");
  if (lambda == 0.0)
    return 0;
  if (lambda < 10.0)
    return poisson_inversion(stream, lambda);
  return poisson_ptrs(stream, lambda);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (p <= 0.0)
    return -std::numeric_limits<double>::infinity();
  if (p >= 1.0)
    return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

VectorXd sample_truncated_normal(RngStream &stream, double mu, double sigma,
                                 double lo, double hi, Index n) {
  if (!(sigma > 0.0))
    throw Error("domain", "sigma", "sigma must be positive");
  if (!(lo < hi))
    throw Error("domain", "lo", "truncation interval requires lo < hi");
  if (n < 0)
    throw Error("domain", "n", "sample count must be nonnegative");

  // Work in the lower half so the CDF values keep full relative precision;
  // an interval in the upper tail is reflected about mu.
  double zlo = (lo - mu) / sigma;
  double zhi = (hi - mu) / sigma;
  const bool reflect = zlo > 0.0;
  if (reflect) {
    const double t = zlo;
    zlo = -zhi;
    zhi = -t;
  }
  const double plo = normal_cdf(zlo);
  const double phi = normal_cdf(zhi);

  VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    const double p = plo + stream.uniform() * (phi - plo);
    double z = normal_quantile(p);
    z = std::clamp(z, zlo, zhi);
    if (reflect)
      z = -z;
    out(i) = std::clamp(mu + sigma * z, lo, hi);
  }
  return out;
}

} // namespace udcap
