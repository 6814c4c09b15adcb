#pragma once

#include <optional>
#include <string>
#include <vector>

#include "udcap/rng.hpp"
#include "udcap/types.hpp"

namespace udcap {

enum class ScenarioKind { S1_disk_ppp, S2_square_truncnorm };

/// Network layout parameters. S1 uses `lambda_b` (BSs per square metre in a
/// disk of radius D, users at intensity lambda_b * beta); S2 uses `J_total`
/// BSs and round(J_total * beta) users in the square [-D, D]^2 with each
/// coordinate drawn from a normal(mu, sigma^2) truncated to [-D, D].
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::S1_disk_ppp;
  double D = 1000.0;
  std::optional<double> lambda_b;
  std::optional<std::uint64_t> J_total;
  double beta = 1.0;
  std::optional<double> mu;
  std::optional<double> sigma;
  Index M = 25;

  /// Throws udcap::Error naming the offending field.
  void validate() const;
};

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string &name);

struct NodeSet {
  Points2 bs;
  Points2 users;

  Index num_bs() const { return bs.cols(); }
  Index num_users() const { return users.cols(); }
};

/// Node-to-cluster assignment. Pooled node index i < num_bs refers to BS i,
/// otherwise to user i - num_bs.
struct Clustering {
  std::vector<Index> assignment;
  Points2 centroids;
  std::vector<std::vector<Index>> bs_of;
  std::vector<std::vector<Index>> users_of;
  int iterations = 0;
  bool converged = false;

  Index num_clusters() const { return centroids.cols(); }
};

NodeSet generate_s1(const ScenarioConfig &cfg, RngStream &stream);
NodeSet generate_s2(const ScenarioConfig &cfg, RngStream &stream);
/// Dispatches on cfg.kind.
NodeSet generate_nodes(const ScenarioConfig &cfg, RngStream &stream);

/// Radius of a point uniform in the disk of radius D (density 2t/D^2).
double sample_disk_radius(RngStream &stream, double D);

inline constexpr int kKmeansMaxIterations = 100;

/// Lloyd's algorithm on the pooled BS and user coordinates, seeded by
/// farthest-point selection from a random first node.
Clustering kmeans_partition(const NodeSet &nodes, Index M, RngStream &stream);

enum class ClusterSelector { closest, median, furthest };

std::string to_string(ClusterSelector which);
ClusterSelector cluster_selector_from_string(const std::string &name);

/// Picks a cluster by centroid distance to `center`. The median is the
/// element at position ceil(M/2) - 1 of the distances sorted descending.
Index select_cluster(const Clustering &clustering, ClusterSelector which,
                     const Point2 &center = Point2::Zero());

} // namespace udcap
