#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "udcap/capacity.hpp"
#include "udcap/channel.hpp"
#include "udcap/quadrature.hpp"

namespace udcap {

/// Parameters of the Fisher-matrix limiting spectral density.
///   mu       = sqrt((1 + beta_m y_m - y_m) / beta_m)
///   a_m, b_m = (1 -/+ mu)^2 / (1 - y_m)^2
struct SpectralParams {
  double beta_m = 0.0; // K_m / J_m
  double y_m = 0.0;    // J_m / (K - K_m)
  double mu = 0.0;
  double a_m = 0.0;
  double b_m = 0.0;
};

/// Strict constructor from cluster counts. Throws when beta_m > 1 (the
/// closed-form estimator covers that range) or y_m is outside (0, 1).
SpectralParams spectral_params(Index J_m, Index K_m, Index K);

/// Same formulas from the ratios directly, requiring beta_m in (0, 1] and
/// y_m in [0, 1).
SpectralParams spectral_params_from_ratios(double beta_m, double y_m);

/// Continuous part of the LSD; zero outside [a_m, b_m]. It carries mass
/// beta_m, the remaining 1 - beta_m sits at the origin.
double lsd_density(double x, const SpectralParams &sp);

struct LsdIntegral {
  double value = 0.0;
  Index nodes = 0;       // nodes used by the accepted rule
  Index evaluations = 0; // integrand evaluations including refinement
  bool converged = false;
};

inline constexpr double kLsdQuadratureTolerance = 1e-11;

/// int_{max(lower, a_m)}^{b_m} g(x) p(x) dx.
///
/// The substitution x = b_m - (b_m - lo) s^2 removes the square-root zero
/// at b_m. When lo = a_m the remaining sqrt(1 - s^2) is absorbed by a
/// Gauss-Chebyshev rule of the second kind; otherwise the integrand is
/// smooth and Gauss-Legendre is used. Either rule is doubled until two
/// successive values agree to kLsdQuadratureTolerance.
template <typename Fn>
LsdIntegral lsd_integral(const SpectralParams &sp, double lower, Fn &&g);

double lsd_mass(const SpectralParams &sp);

/// int_{max(1, a_m)}^{b_m} log(x) p(x) dx in the requested log unit.
double cm2_integral(const SpectralParams &sp, LogBase base = LogBase::nats);

struct SpikeEstimates {
  std::vector<double> rho; // descending
  double delta_rho = 0.0;
  bool separated = true;   // false when delta_rho <= 0 and clamping applied
};

/// Evenly spaced spikes above b_m whose sum is R + trace:
///   delta_rho = 2 (trace + R - R b_m) / (R (R + 1)),
///   rho_j     = b_m + (R + 1 - j) delta_rho.
/// A nonpositive step is flagged and spikes below 1 are raised to 1.
SpikeEstimates spike_estimates(double trace, Index R, double b_m);

/// Operation counts for one FISE evaluation.
struct FiseWork {
  std::size_t log_evals = 0;
  std::size_t density_evals = 0;
};

/// FISE from a precomputed trace(P_m). K is the total user count of the
/// network. A cluster with K_m > J_m is evaluated at beta_m = 1 and the
/// clamp is recorded in the diagnostics.
CapacityEstimate fise_from_trace(double trace, Index J_m, Index K_m, Index K,
                                 LogBase base, FiseWork *work = nullptr);

/// Full FISE: trace via sinr_trace, then fise_from_trace.
CapacityEstimate fise_capacity(const ChannelInstance &ch, Index K,
                               const FadingParams &params,
                               FiseWork *work = nullptr);

// ---------------------------------------------------------------------------

namespace detail {
const QuadratureRule<double> &cached_legendre(int level);
const QuadratureRule<double> &cached_chebyshev_u(int level);
inline constexpr int kMaxLegendreLevel = 7;   // 64 * 2^7 = 8192 nodes
inline constexpr int kMaxChebyshevLevel = 10; // 256 * 2^10 - 1 nodes
} // namespace detail

template <typename Fn>
LsdIntegral lsd_integral(const SpectralParams &sp, double lower, Fn &&g) {
  LsdIntegral out;
  const double a = sp.a_m;
  const double b = sp.b_m;
  const double lo = std::max(lower, a);
  if (!(b > lo)) {
    out.converged = true;
    return out;
  }
  const double scale = sp.beta_m * (1.0 - sp.y_m) / (2.0 * std::numbers::pi);
  auto weight = [&](double x) { return scale / (x * (1.0 + sp.beta_m * sp.y_m * x)); };

  const bool chebyshev = !(lo > a);
  const double width = b - lo;
  double previous = 0.0;
  const int max_level = chebyshev ? detail::kMaxChebyshevLevel : detail::kMaxLegendreLevel;
  for (int level = 0; level <= max_level; ++level) {
    const auto &rule =
        chebyshev ? detail::cached_chebyshev_u(level) : detail::cached_legendre(level);
    double acc = 0.0;
    for (Index i = 0; i < rule.nodes.size(); ++i) {
      const double s = rule.nodes(i);
      const double s2 = s * s;
      const double x = b - width * s2;
      double f;
      if (chebyshev) {
        f = width * width * s2;
      } else {
        f = width * std::sqrt(width) * s2 * std::sqrt(std::max(0.0, (b - a) - width * s2));
      }
      acc += rule.weights(i) * f * weight(x) * g(x);
    }
    out.evaluations += rule.nodes.size();
    out.nodes = rule.nodes.size();
    out.value = acc;
    if (level > 0 && std::abs(acc - previous) <= kLsdQuadratureTolerance * std::max(1.0, std::abs(acc))) {
      out.converged = true;
      break;
    }
    previous = acc;
  }
  return out;
}

} // namespace udcap
