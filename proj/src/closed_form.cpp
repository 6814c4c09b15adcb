#include "udcap/closed_form.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace udcap {

double ContinuousFadingKernel::gamma(double d) const {
  if (d > d1)
    return 1.0;
  if (d > d0)
    return std::pow(d1, -1.5);
  return std::pow(d1, -1.5) / (d0 * d0);
}

double ContinuousFadingKernel::epsilon(double d) const {
  if (d > d1)
    return 3.5;
  if (d > d0)
    return 2.0;
  return 0.0;
}

double ContinuousFadingKernel::radial_primitive(double r) const {
  const double g1 = std::pow(d1, -1.5);
  const double g0 = g1 / (d0 * d0);
  if (r <= d0)
    return 0.5 * g0 * r * r;
  const double near = 0.5 * g0 * d0 * d0;
  if (r <= d1)
    return near + g1 * std::log(r / d0);
  return near + g1 * std::log(d1 / d0) + (g1 - std::pow(r, -1.5)) / 1.5;
}

DiagonalSums diagonal_sums(const NodeSet &nodes, const Clustering &clustering,
                           Index m, const FadingParams &params) {
  if (m < 0 || m >= clustering.num_clusters())
    throw Error("domain", "m", "cluster index out of range");
  const auto &bs_idx = clustering.bs_of[static_cast<std::size_t>(m)];
  if (bs_idx.empty())
    throw Error("domain", "m", "selected cluster has no BSs");
  const Index J = nodes.num_bs();
  const auto J_m = static_cast<Index>(bs_idx.size());

  DiagonalSums sums{VectorXd::Zero(J_m), VectorXd::Zero(J_m)};
  for (Index k = 0; k < nodes.num_users(); ++k) {
    const bool inside = clustering.assignment[static_cast<std::size_t>(J + k)] == m;
    VectorXd &target = inside ? sums.signal : sums.interference;
    for (Index j = 0; j < J_m; ++j) {
      const double l = large_scale_gain(
          (nodes.bs.col(bs_idx[static_cast<std::size_t>(j)]) - nodes.users.col(k)).norm(),
          params);
      target(j) += l * l;
    }
  }
  return sums;
}

double rjj(const NodeSet &nodes, const Clustering &clustering, Index m, Index j,
           const FadingParams &params) {
  const auto sums = diagonal_sums(nodes, clustering, m, params);
  if (j < 0 || j >= sums.signal.size())
    throw Error("domain", "j", "BS index out of range for cluster");
  return sums.signal(j) / (params.N0 + params.P * sums.interference(j));
}

namespace {

double diagonal_capacity(const DiagonalSums &sums, const FadingParams &params,
                         double scale) {
  double acc = 0.0;
  for (Index j = 0; j < sums.signal.size(); ++j) {
    const double num = params.P * scale * sums.signal(j);
    const double den = params.N0 + params.P * scale * sums.interference(j);
    if (num == 0.0)
      continue;
    if (!(den > 0.0))
      throw Error("numeric", "N0", "zero noise and no interference: r_jj unbounded");
    acc += std::log1p(num / den);
  }
  return acc / static_cast<double>(sums.signal.size()) * nats_to(params.log_base);
}

} // namespace

CapacityEstimate closed_form_capacity(const NodeSet &nodes,
                                      const Clustering &clustering, Index m,
                                      const FadingParams &params) {
  const auto sums = diagonal_sums(nodes, clustering, m, params);
  CapacityEstimate est;
  est.method = Method::closed_form;
  est.value = diagonal_capacity(sums, params, 1.0);
  est.diagnostics["J_m"] = static_cast<double>(sums.signal.size());
  est.diagnostics["K_m"] =
      static_cast<double>(clustering.users_of[static_cast<std::size_t>(m)].size());
  return est;
}

double stability_gap(const NodeSet &nodes, const Clustering &clustering,
                     Index m, const FadingParams &params, double scale) {
  if (!(scale > 0.0))
    throw Error("domain", "scale", "scale must be positive");
  const auto sums = diagonal_sums(nodes, clustering, m, params);
  return std::abs(diagonal_capacity(sums, params, 1.0) -
                  diagonal_capacity(sums, params, scale));
}

// --- regions ---------------------------------------------------------------

Region Region::disk(const Point2 &center, double radius) {
  Region r;
  r.disk_center = center;
  r.disk_radius = radius;
  return r;
}

Region Region::square(const Point2 &center, double half_side) {
  Region r;
  r.square_center = center;
  r.square_half_side = half_side;
  return r;
}

Region Region::network(const ScenarioConfig &cfg) {
  return cfg.kind == ScenarioKind::S1_disk_ppp ? disk(Point2::Zero(), cfg.D)
                                               : square(Point2::Zero(), cfg.D);
}

Region Region::voronoi_cell(const Region &base, const Points2 &centroids, Index m) {
  Region r = base;
  const Point2 cm = centroids.col(m);
  for (Index i = 0; i < centroids.cols(); ++i) {
    if (i == m)
      continue;
    const Point2 ci = centroids.col(i);
    r.half_planes.push_back({ci - cm, 0.5 * (ci.squaredNorm() - cm.squaredNorm())});
  }
  return r;
}

bool Region::contains(const Point2 &p) const {
  constexpr double slack = 1e-9;
  if (disk_center && (p - *disk_center).norm() > disk_radius * (1.0 + slack))
    return false;
  if (square_center &&
      (p - *square_center).cwiseAbs().maxCoeff() > square_half_side * (1.0 + slack))
    return false;
  for (const auto &hp : half_planes)
    if (hp.normal.dot(p) > hp.offset + slack * (1.0 + std::abs(hp.offset)))
      return false;
  return true;
}

double Region::exit_distance(const Point2 &from, const Point2 &dir) const {
  double t = std::numeric_limits<double>::infinity();
  if (disk_center) {
    const Point2 oc = from - *disk_center;
    const double b = dir.dot(oc);
    const double c = oc.squaredNorm() - disk_radius * disk_radius;
    t = std::min(t, -b + std::sqrt(std::max(0.0, b * b - c)));
  }
  if (square_center) {
    for (int i = 0; i < 2; ++i) {
      if (dir(i) > 0.0)
        t = std::min(t, ((*square_center)(i) + square_half_side - from(i)) / dir(i));
      else if (dir(i) < 0.0)
        t = std::min(t, ((*square_center)(i) - square_half_side - from(i)) / dir(i));
    }
  }
  for (const auto &hp : half_planes) {
    const double nd = hp.normal.dot(dir);
    if (nd > 0.0)
      t = std::min(t, (hp.offset - hp.normal.dot(from)) / nd);
  }
  if (!std::isfinite(t))
    throw Error("domain", "region", "region is unbounded in some direction");
  return std::max(t, 0.0);
}

namespace {

// Periodic trapezoid rule in the polar angle with nested doubling.
template <typename Fn>
double angular_integral(Fn &&integrand, const RegionIntegralOptions &opts) {
  const double two_pi = 2.0 * std::numbers::pi;
  Index n = std::max<Index>(opts.min_angles, 4);
  double sum = 0.0;
  for (Index i = 0; i < n; ++i)
    sum += integrand(two_pi * static_cast<double>(i) / static_cast<double>(n));
  double estimate = sum * two_pi / static_cast<double>(n);
  while (2 * n <= opts.max_angles) {
    for (Index i = 0; i < n; ++i)
      sum += integrand(two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
    n *= 2;
    const double refined = sum * two_pi / static_cast<double>(n);
    if (std::abs(refined - estimate) <= opts.rel_tol * std::abs(refined))
      return refined;
    estimate = refined;
  }
  throw Error("numeric", "quadrature",
              "angular quadrature did not converge within the refinement cap");
}

} // namespace

double Region::area(const Point2 &interior) const {
  return angular_integral(
      [&](double theta) {
        const double r = exit_distance(interior, Point2(std::cos(theta), std::sin(theta)));
        return 0.5 * r * r;
      },
      RegionIntegralOptions{});
}

double kernel_integral(const ContinuousFadingKernel &kernel, const Point2 &x,
                       const Region &outer, const Region *inner,
                       const RegionIntegralOptions &opts) {
  if (!outer.contains(x) || (inner && !inner->contains(x)))
    throw Error("domain", "bs_position", "evaluation point must lie inside the regions");
  return angular_integral(
      [&](double theta) {
        const Point2 dir(std::cos(theta), std::sin(theta));
        const double r_out = outer.exit_distance(x, dir);
        const double full = kernel.radial_primitive(r_out);
        if (!inner)
          return full;
        const double r_in = std::min(inner->exit_distance(x, dir), r_out);
        return full - kernel.radial_primitive(r_in);
      },
      opts);
}

CapacityEstimate continuous_uniform_capacity(const Region &network,
                                             const Region &cluster_region,
                                             const Point2 &bs_position,
                                             const FadingParams &params,
                                             const RegionIntegralOptions &opts) {
  const ContinuousFadingKernel kernel(params);
  const double total = kernel_integral(kernel, bs_position, network, nullptr, opts);
  const double outside = kernel_integral(kernel, bs_position, network, &cluster_region, opts);
  if (!(outside > 0.0))
    throw Error("numeric", "cluster_region",
                "cluster region covers the whole network: capacity unbounded");
  CapacityEstimate est;
  est.method = Method::continuous_uniform;
  est.value = std::max(0.0, log_in(params.log_base, total / outside));
  est.diagnostics["integral_total"] = total;
  est.diagnostics["integral_outside"] = outside;
  return est;
}

CapacityEstimate continuous_uniform_cluster(const ScenarioConfig &cfg,
                                            const NodeSet &nodes,
                                            const Clustering &clustering, Index m,
                                            const FadingParams &params) {
  const auto &bs_idx = clustering.bs_of.at(static_cast<std::size_t>(m));
  if (bs_idx.empty())
    throw Error("domain", "m", "selected cluster has no BSs");
  const Region network = Region::network(cfg);
  const Region cell = Region::voronoi_cell(network, clustering.centroids, m);
  RegionIntegralOptions opts;
  opts.rel_tol = 1e-6;

  double acc = 0.0;
  for (Index j : bs_idx)
    acc += continuous_uniform_capacity(network, cell, nodes.bs.col(j), params, opts).value;

  CapacityEstimate est;
  est.method = Method::continuous_uniform;
  est.value = acc / static_cast<double>(bs_idx.size());
  est.diagnostics["J_m"] = static_cast<double>(bs_idx.size());
  return est;
}

} // namespace udcap
