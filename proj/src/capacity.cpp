#include "udcap/capacity.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "udcap/linalg.hpp"

namespace udcap {

std::string to_string(Method method) {
  switch (method) {
  case Method::exact:
    return "exact";
  case Method::fise:
    return "fise";
  case Method::closed_form:
    return "closed_form";
  case Method::continuous_uniform:
    return "continuous_uniform";
  }
  return "exact";
}

Method method_from_string(const std::string &name) {
  if (name == "exact")
    return Method::exact;
  if (name == "fise")
    return Method::fise;
  if (name == "closed_form")
    return Method::closed_form;
  if (name == "continuous" || name == "continuous_uniform")
    return Method::continuous_uniform;
  throw Error("config", "method", "unknown method '" + name + "'");
}

CapacityEstimate exact_capacity_once(const ChannelInstance &ch,
                                     const FadingParams &params) {
  if (ch.J_m < 1)
    throw Error("domain", "J_m", "channel has no BSs");
  MatrixXcd signal = hermitian_outer(ch.H(), params.P);
  signal += ch.Xi;
  const double logdet_total = hermitian_logdet(signal);
  const double logdet_xi = hermitian_logdet(ch.Xi);

  CapacityEstimate est;
  est.method = Method::exact;
  est.value = std::max(0.0, (logdet_total - logdet_xi) /
                                static_cast<double>(ch.J_m) * nats_to(params.log_base));
  est.diagnostics["J_m"] = static_cast<double>(ch.J_m);
  est.diagnostics["K_m"] = static_cast<double>(ch.K_m);
  return est;
}

ReplicationContext::ReplicationContext(const ScenarioConfig &scenario,
                                       const FadingParams &fading, NodeSet nodes,
                                       Clustering clustering, Index cluster,
                                       RngStream channel_stream,
                                       std::size_t replication)
    : scenario_(&scenario), fading_(&fading), nodes_(std::move(nodes)),
      clustering_(std::move(clustering)), cluster_(cluster),
      channel_stream_(std::move(channel_stream)), replication_(replication) {}

const ChannelInstance &ReplicationContext::channel() const {
  if (!channel_) {
    RngStream stream = channel_stream_;
    channel_ = build_channel(nodes_, clustering_, cluster_, *fading_, stream);
  }
  return *channel_;
}

ReplicationContext draw_replication(const ScenarioConfig &scenario,
                                    ClusterSelector which,
                                    const FadingParams &fading,
                                    const RngStream &base, std::size_t rep,
                                    std::size_t *retries) {
  const RngStream rep_stream(base.seed(), base.stream_id() + rep);
  for (int attempt = 0; attempt <= kMaxLayoutRetries; ++attempt) {
    const RngStream s = rep_stream.substream(static_cast<std::uint64_t>(attempt));
    RngStream layout_stream = s.substream(0);
    RngStream cluster_stream = s.substream(1);
    NodeSet nodes = generate_nodes(scenario, layout_stream);
    if (nodes.num_bs() + nodes.num_users() < scenario.M) {
      if (retries)
        ++*retries;
      continue;
    }
    Clustering clustering = kmeans_partition(nodes, scenario.M, cluster_stream);
    const Index m = select_cluster(clustering, which);
    const auto c = static_cast<std::size_t>(m);
    if (clustering.bs_of[c].empty() || clustering.users_of[c].empty()) {
      if (retries)
        ++*retries;
      continue;
    }
    return ReplicationContext(scenario, fading, std::move(nodes), std::move(clustering),
                              m, s.substream(2), rep);
  }
  throw Error("domain", "replication",
              "replication " + std::to_string(rep) +
                  ": selected cluster empty after " +
                  std::to_string(kMaxLayoutRetries) + " retries");
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0)
    return requested;
  if (const char *env = std::getenv("UDCAP_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0)
      return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

MonteCarloResult monte_carlo_capacity(const ScenarioConfig &scenario,
                                      ClusterSelector which,
                                      const FadingParams &fading,
                                      std::size_t reps, const RngStream &base,
                                      const Estimator &estimator,
                                      unsigned workers) {
  if (reps < 1)
    throw Error("config", "reps", "reps must be at least 1");
  scenario.validate();
  fading.validate();

  std::vector<double> values(reps);
  std::vector<std::size_t> retries(reps, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_rep = reps;
  std::mutex failure_mutex;

  auto work = [&] {
    while (true) {
      const std::size_t r = next.fetch_add(1);
      if (r >= reps)
        return;
      try {
        const ReplicationContext ctx =
            draw_replication(scenario, which, fading, base, r, &retries[r]);
        values[r] = estimator(ctx).value;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        // Keep the lowest failing index so the reported error is stable.
        if (r < failed_rep) {
          failed_rep = r;
          failure = std::current_exception();
        }
      }
    }
  };

  const unsigned n_workers =
      std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(reps));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_workers; ++w)
      pool.emplace_back(work);
  }

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const Error &e) {
      throw Error(e.kind(), e.field(),
                  "replication " + std::to_string(failed_rep) + ": " + e.what());
    } catch (const std::exception &e) {
      throw Error("numeric", "replication",
                  "replication " + std::to_string(failed_rep) + ": " + e.what());
    }
  }

  // Welford accumulation in replication order.
  MonteCarloResult out;
  double m2 = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    ++out.reps;
    const double delta = values[r] - out.mean;
    out.mean += delta / static_cast<double>(out.reps);
    m2 += delta * (values[r] - out.mean);
    out.layout_retries += retries[r];
  }
  out.stddev = reps > 1 ? std::sqrt(m2 / static_cast<double>(reps - 1)) : 0.0;
  out.values = std::move(values);
  return out;
}

} // namespace udcap
