#include "udcap/fise.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <optional>

namespace udcap {

namespace detail {

const QuadratureRule<double> &cached_legendre(int level) {
  static std::array<std::optional<QuadratureRule<double>>, kMaxLegendreLevel + 1> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto &slot = cache.at(static_cast<std::size_t>(level));
  if (!slot)
    slot = gauss_legendre<double>(Index{64} << level);
  return *slot;
}

const QuadratureRule<double> &cached_chebyshev_u(int level) {
  static std::array<std::optional<QuadratureRule<double>>, kMaxChebyshevLevel + 1> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto &slot = cache.at(static_cast<std::size_t>(level));
  if (!slot)
    slot = gauss_chebyshev_u<double>((Index{256} << level) - 1);
  return *slot;
}

} // namespace detail

SpectralParams spectral_params_from_ratios(double beta_m, double y_m) {
  if (!(beta_m > 0.0))
    throw Error("domain", "beta_m", "beta_m must be positive");
  if (beta_m > 1.0)
    throw Error("domain", "beta_m", "beta_m > 1: use closed-form path");
  if (!(y_m >= 0.0) || !(y_m < 1.0))
    throw Error("domain", "y_m", "network too small for FISE regime (y_m must lie in (0,1))");
  SpectralParams sp;
  sp.beta_m = beta_m;
  sp.y_m = y_m;
  sp.mu = std::sqrt((1.0 + beta_m * y_m - y_m) / beta_m);
  const double denom = (1.0 - y_m) * (1.0 - y_m);
  sp.a_m = (1.0 - sp.mu) * (1.0 - sp.mu) / denom;
  sp.b_m = (1.0 + sp.mu) * (1.0 + sp.mu) / denom;
  return sp;
}

SpectralParams spectral_params(Index J_m, Index K_m, Index K) {
  if (J_m < 1 || K_m < 1)
    throw Error("domain", "J_m", "cluster needs at least one BS and one user");
  if (K_m > J_m)
    throw Error("domain", "beta_m", "beta_m > 1: use closed-form path");
  if (K - K_m <= J_m)
    throw Error("domain", "y_m", "network too small for FISE regime (y_m must lie in (0,1))");
  return spectral_params_from_ratios(static_cast<double>(K_m) / static_cast<double>(J_m),
                                     static_cast<double>(J_m) / static_cast<double>(K - K_m));
}

double lsd_density(double x, const SpectralParams &sp) {
  if (!(x >= sp.a_m) || !(x <= sp.b_m) || x <= 0.0)
    return 0.0;
  const double root = std::sqrt(std::max(0.0, (sp.b_m - x) * (x - sp.a_m)));
  return sp.beta_m * (1.0 - sp.y_m) * root /
         (2.0 * std::numbers::pi * x * (1.0 + sp.beta_m * sp.y_m * x));
}

double lsd_mass(const SpectralParams &sp) {
  return lsd_integral(sp, sp.a_m, [](double) { return 1.0; }).value;
}

double cm2_integral(const SpectralParams &sp, LogBase base) {
  const auto r = lsd_integral(sp, 1.0, [](double x) { return std::log(x); });
  return std::max(0.0, r.value) * nats_to(base);
}

SpikeEstimates spike_estimates(double trace, Index R, double b_m) {
  if (R < 1)
    throw Error("domain", "R", "spike count must be at least 1");
  const double r = static_cast<double>(R);
  SpikeEstimates out;
  out.delta_rho = 2.0 * (trace + r - r * b_m) / (r * (r + 1.0));
  out.separated = out.delta_rho > 0.0;
  out.rho.resize(static_cast<std::size_t>(R));
  for (Index j = 1; j <= R; ++j) {
    double rho = b_m + static_cast<double>(R + 1 - j) * out.delta_rho;
    if (!out.separated)
      rho = std::max(rho, 1.0);
    out.rho[static_cast<std::size_t>(j - 1)] = rho;
  }
  return out;
}

CapacityEstimate fise_from_trace(double trace, Index J_m, Index K_m, Index K,
                                 LogBase base, FiseWork *work) {
  if (J_m < 1 || K_m < 1)
    throw Error("domain", "J_m", "cluster needs at least one BS and one user");
  if (K - K_m <= J_m)
    throw Error("domain", "y_m", "network too small for FISE regime (y_m must lie in (0,1))");
  const double beta_raw = static_cast<double>(K_m) / static_cast<double>(J_m);
  const double y_m = static_cast<double>(J_m) / static_cast<double>(K - K_m);
  const SpectralParams sp = spectral_params_from_ratios(std::min(beta_raw, 1.0), y_m);

  const Index R = std::min(J_m, K_m);
  const SpikeEstimates spikes = spike_estimates(trace, R, sp.b_m);

  double c1 = 0.0;
  for (double rho : spikes.rho)
    c1 += std::log(rho);
  c1 /= static_cast<double>(J_m);

  const auto bulk = lsd_integral(sp, 1.0, [](double x) { return std::log(x); });
  const double c2 = std::max(0.0, bulk.value);

  if (work) {
    work->log_evals += static_cast<std::size_t>(R) + static_cast<std::size_t>(bulk.evaluations);
    work->density_evals += static_cast<std::size_t>(bulk.evaluations);
  }

  const double k = nats_to(base);
  CapacityEstimate est;
  est.method = Method::fise;
  est.value = (c1 + c2) * k;
  auto &d = est.diagnostics;
  d["trace"] = trace;
  d["R"] = static_cast<double>(R);
  d["delta_rho"] = spikes.delta_rho;
  d["a_m"] = sp.a_m;
  d["b_m"] = sp.b_m;
  d["beta_m"] = sp.beta_m;
  d["y_m"] = sp.y_m;
  d["J_m"] = static_cast<double>(J_m);
  d["K_m"] = static_cast<double>(K_m);
  d["c_m1"] = c1 * k;
  d["c_m2"] = c2 * k;
  d["spikes_separated"] = spikes.separated ? 1.0 : 0.0;
  d["beta_clamped"] = beta_raw > 1.0 ? 1.0 : 0.0;
  d["degenerate"] = trace == 0.0 ? 1.0 : 0.0;
  d["quadrature_nodes"] = static_cast<double>(bulk.nodes);
  d["quadrature_converged"] = bulk.converged ? 1.0 : 0.0;
  return est;
}

CapacityEstimate fise_capacity(const ChannelInstance &ch, Index K,
                               const FadingParams &params, FiseWork *work) {
  const double trace = sinr_trace(ch, params);
  return fise_from_trace(trace, ch.J_m, ch.K_m, K, params.log_base, work);
}

} // namespace udcap
