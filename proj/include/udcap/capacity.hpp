#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "udcap/channel.hpp"
#include "udcap/netgen.hpp"
#include "udcap/rng.hpp"

namespace udcap {

enum class Method { exact, fise, closed_form, continuous_uniform };

std::string to_string(Method method);
Method method_from_string(const std::string &name);

/// Capacity per BS in the configured log unit, tagged with the estimator
/// that produced it.
struct CapacityEstimate {
  double value = 0.0;
  Method method = Method::exact;
  std::map<std::string, double> diagnostics;
};

/// (1/J_m) [log det(Xi + P H H^H) - log det(Xi)] with H = L o G.
CapacityEstimate exact_capacity_once(const ChannelInstance &ch,
                                     const FadingParams &params);

/// Everything an estimator may look at for one replication. The channel is
/// assembled on first use so estimators that only need geometry skip it.
class ReplicationContext {
public:
  ReplicationContext(const ScenarioConfig &scenario, const FadingParams &fading,
                     NodeSet nodes, Clustering clustering, Index cluster,
                     RngStream channel_stream, std::size_t replication);

  const ScenarioConfig &scenario() const { return *scenario_; }
  const FadingParams &fading() const { return *fading_; }
  const NodeSet &nodes() const { return nodes_; }
  const Clustering &clustering() const { return clustering_; }
  Index cluster() const { return cluster_; }
  std::size_t replication() const { return replication_; }
  Index total_users() const { return nodes_.num_users(); }

  const ChannelInstance &channel() const;

private:
  const ScenarioConfig *scenario_;
  const FadingParams *fading_;
  NodeSet nodes_;
  Clustering clustering_;
  Index cluster_;
  RngStream channel_stream_;
  std::size_t replication_;
  mutable std::optional<ChannelInstance> channel_;
};

using Estimator = std::function<CapacityEstimate(const ReplicationContext &)>;

struct MonteCarloResult {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t reps = 0;
  std::size_t layout_retries = 0;
  std::vector<double> values; // per replication, in replication order
};

inline constexpr int kMaxLayoutRetries = 10;

/// Draws the layout, clustering and target cluster for replication `rep`.
/// Layouts whose selected cluster lacks BSs or users are redrawn from a
/// fresh substream up to kMaxLayoutRetries times.
ReplicationContext draw_replication(const ScenarioConfig &scenario,
                                    ClusterSelector which,
                                    const FadingParams &fading,
                                    const RngStream &base, std::size_t rep,
                                    std::size_t *retries = nullptr);

/// Number of worker threads: `requested` when positive, else the
/// UDCAP_WORKERS environment variable, else the hardware concurrency.
unsigned resolve_workers(unsigned requested = 0);

/// Runs `estimator` on `reps` replications with stream ids
/// base.stream_id() + rep and returns the mean and sample standard
/// deviation. Results are merged in replication order, so the output does
/// not depend on the worker count.
MonteCarloResult monte_carlo_capacity(const ScenarioConfig &scenario,
                                      ClusterSelector which,
                                      const FadingParams &fading,
                                      std::size_t reps, const RngStream &base,
                                      const Estimator &estimator,
                                      unsigned workers = 0);

} // namespace udcap
