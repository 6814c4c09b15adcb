#include "udcap/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace udcap {

void ScenarioConfig::validate() const {
  if (!(D > 0.0) || !std::isfinite(D))
    throw Error("config", "D", "network scale D must be positive");
  if (M < 1)
    throw Error("config", "M", "cluster count M must be at least 1");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw Error("config", "beta", "beta must be positive");
  if (kind == ScenarioKind::S1_disk_ppp) {
    if (!lambda_b)
      throw Error("config", "lambda_b", "S1 requires lambda_b");
    if (!(*lambda_b > 0.0) || !std::isfinite(*lambda_b))
      throw Error("config", "lambda_b", "lambda_b must be positive");
  } else {
    if (!J_total)
      throw Error("config", "J_total", "S2 requires J_total");
    if (*J_total == 0)
      throw Error("config", "J_total", "J_total must be at least 1");
    if (!mu)
      throw Error("config", "mu", "S2 requires mu");
    if (!sigma || !(*sigma > 0.0))
      throw Error("config", "sigma", "S2 requires a positive sigma");
  }
}

std::string to_string(ScenarioKind kind) {
  return kind == ScenarioKind::S1_disk_ppp ? "S1" : "S2";
}

ScenarioKind scenario_kind_from_string(const std::string &name) {
  if (name == "S1" || name == "s1" || name == "S1_disk_ppp")
    return ScenarioKind::S1_disk_ppp;
  if (name == "S2" || name == "s2" || name == "S2_square_truncnorm")
    return ScenarioKind::S2_square_truncnorm;
  throw Error("config", "scenario", "unknown scenario '" + name + "'");
}

double sample_disk_radius(RngStream &stream, double D) {
  // Inverse CDF of f(t) = 2t/D^2 on [0, D].
  return D * std::sqrt(stream.uniform());
}

namespace {

Points2 uniform_disk_points(RngStream &stream, Index n, double D) {
  Points2 pts(2, n);
  for (Index i = 0; i < n; ++i) {
    const double r = sample_disk_radius(stream, D);
    const double theta = 2.0 * std::numbers::pi * stream.uniform();
    pts(0, i) = r * std::cos(theta);
    pts(1, i) = r * std::sin(theta);
  }
  return pts;
}

Points2 truncnorm_square_points(RngStream &stream, Index n, double mu,
                                double sigma, double D) {
  Points2 pts(2, n);
  if (n == 0)
    return pts;
  const VectorXd xs = sample_truncated_normal(stream, mu, sigma, -D, D, n);
  const VectorXd ys = sample_truncated_normal(stream, mu, sigma, -D, D, n);
  pts.row(0) = xs.transpose();
  pts.row(1) = ys.transpose();
  return pts;
}

} // namespace

NodeSet generate_s1(const ScenarioConfig &cfg, RngStream &stream) {
  if (cfg.kind != ScenarioKind::S1_disk_ppp)
    throw Error("config", "kind", "generate_s1 called with a non-S1 config");
  cfg.validate();
  const double area = std::numbers::pi * cfg.D * cfg.D;
  const double lambda_u = *cfg.lambda_b * cfg.beta;

  RngStream counts = stream.substream(0);
  const auto J = static_cast<Index>(sample_poisson(counts, *cfg.lambda_b * area));
  const auto K = static_cast<Index>(sample_poisson(counts, lambda_u * area));

  RngStream bs_stream = stream.substream(1);
  RngStream user_stream = stream.substream(2);
  return {uniform_disk_points(bs_stream, J, cfg.D),
          uniform_disk_points(user_stream, K, cfg.D)};
}

NodeSet generate_s2(const ScenarioConfig &cfg, RngStream &stream) {
  if (cfg.kind != ScenarioKind::S2_square_truncnorm)
    throw Error("config", "kind", "generate_s2 called with a non-S2 config");
  cfg.validate();
  const auto J = static_cast<Index>(*cfg.J_total);
  const auto K = static_cast<Index>(
      std::llround(static_cast<double>(*cfg.J_total) * cfg.beta));

  RngStream bs_stream = stream.substream(1);
  RngStream user_stream = stream.substream(2);
  return {truncnorm_square_points(bs_stream, J, *cfg.mu, *cfg.sigma, cfg.D),
          truncnorm_square_points(user_stream, K, *cfg.mu, *cfg.sigma, cfg.D)};
}

NodeSet generate_nodes(const ScenarioConfig &cfg, RngStream &stream) {
  return cfg.kind == ScenarioKind::S1_disk_ppp ? generate_s1(cfg, stream)
                                               : generate_s2(cfg, stream);
}

namespace {

Index nearest_centroid(const Points2 &centroids, const Eigen::Ref<const Point2> &p) {
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < centroids.cols(); ++c) {
    const double d = (centroids.col(c) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Points2 farthest_point_seeds(const Points2 &pts, Index M, RngStream &stream) {
  const Index n = pts.cols();
  Points2 seeds(2, M);
  auto first = static_cast<Index>(stream.uniform() * static_cast<double>(n));
  first = std::min(first, n - 1);
  seeds.col(0) = pts.col(first);

  VectorXd dmin = (pts.colwise() - seeds.col(0)).colwise().squaredNorm().transpose();
  for (Index c = 1; c < M; ++c) {
    Index far = 0;
    dmin.maxCoeff(&far);
    seeds.col(c) = pts.col(far);
    const VectorXd d = (pts.colwise() - seeds.col(c)).colwise().squaredNorm().transpose();
    dmin = dmin.cwiseMin(d);
  }
  return seeds;
}

} // namespace

Clustering kmeans_partition(const NodeSet &nodes, Index M, RngStream &stream) {
  const Index J = nodes.num_bs();
  const Index n = J + nodes.num_users();
  if (M < 1)
    throw Error("domain", "M", "cluster count must be at least 1");
  if (n < M)
    throw Error("domain", "M", "fewer nodes than clusters");

  Points2 pts(2, n);
  pts.leftCols(J) = nodes.bs;
  pts.rightCols(n - J) = nodes.users;

  Clustering out;
  out.centroids = farthest_point_seeds(pts, M, stream);
  out.assignment.assign(static_cast<std::size_t>(n), -1);

  std::vector<Index> counts(static_cast<std::size_t>(M));
  for (int iter = 1; iter <= kKmeansMaxIterations; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      const Index c = nearest_centroid(out.centroids, pts.col(i));
      if (c != out.assignment[static_cast<std::size_t>(i)]) {
        out.assignment[static_cast<std::size_t>(i)] = c;
        changed = true;
      }
    }
    out.iterations = iter;

    // Repair empty clusters by splitting off the point of the largest
    // cluster that lies farthest from its centroid.
    while (true) {
      std::fill(counts.begin(), counts.end(), 0);
      for (Index c : out.assignment)
        ++counts[static_cast<std::size_t>(c)];
      auto empty = std::find(counts.begin(), counts.end(), 0);
      if (empty == counts.end())
        break;
      const Index target = std::distance(counts.begin(), empty);
      const Index largest =
          std::distance(counts.begin(), std::max_element(counts.begin(), counts.end()));
      Index far = -1;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        if (out.assignment[static_cast<std::size_t>(i)] != largest)
          continue;
        const double d = (pts.col(i) - out.centroids.col(largest)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      out.assignment[static_cast<std::size_t>(far)] = target;
      out.centroids.col(target) = pts.col(far);
      changed = true;
    }

    out.centroids.setZero();
    for (Index i = 0; i < n; ++i)
      out.centroids.col(out.assignment[static_cast<std::size_t>(i)]) += pts.col(i);
    for (Index c = 0; c < M; ++c)
      out.centroids.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

    if (!changed) {
      out.converged = true;
      break;
    }
  }

  out.bs_of.assign(static_cast<std::size_t>(M), {});
  out.users_of.assign(static_cast<std::size_t>(M), {});
  for (Index i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(out.assignment[static_cast<std::size_t>(i)]);
    if (i < J)
      out.bs_of[c].push_back(i);
    else
      out.users_of[c].push_back(i - J);
  }
  return out;
}

std::string to_string(ClusterSelector which) {
  switch (which) {
  case ClusterSelector::closest:
    return "closest";
  case ClusterSelector::median:
    return "median";
  case ClusterSelector::furthest:
    return "furthest";
  }
  return "closest";
}

ClusterSelector cluster_selector_from_string(const std::string &name) {
  if (name == "closest")
    return ClusterSelector::closest;
  if (name == "median")
    return ClusterSelector::median;
  if (name == "furthest")
    return ClusterSelector::furthest;
  throw Error("config", "cluster", "unknown cluster selector '" + name + "'");
}

Index select_cluster(const Clustering &clustering, ClusterSelector which,
                     const Point2 &center) {
  const Index M = clustering.num_clusters();
  if (M < 1)
    throw Error("domain", "M", "clustering has no clusters");
  const VectorXd dist =
      (clustering.centroids.colwise() - center).colwise().norm().transpose();

  Index idx = 0;
  switch (which) {
  case ClusterSelector::closest:
    dist.minCoeff(&idx);
    return idx;
  case ClusterSelector::furthest:
    dist.maxCoeff(&idx);
    return idx;
  case ClusterSelector::median: {
    std::vector<Index> order(static_cast<std::size_t>(M));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&dist](Index a, Index b) { return dist(a) > dist(b); });
    const auto pos = static_cast<std::size_t>((M + 1) / 2 - 1);
    return order[pos];
  }
  }
  return idx;
}

} // namespace udcap
