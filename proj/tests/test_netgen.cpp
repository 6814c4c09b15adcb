#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "udcap/netgen.hpp"

using namespace udcap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ScenarioConfig s1(double lambda_b, double beta = 1.0, Index M = 25) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::S1_disk_ppp;
  cfg.D = 1000;
  cfg.lambda_b = lambda_b;
  cfg.beta = beta;
  cfg.M = M;
  return cfg;
}

ScenarioConfig s2(std::uint64_t J, double beta = 1.0) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::S2_square_truncnorm;
  cfg.D = 1000;
  cfg.J_total = J;
  cfg.mu = 0;
  cfg.sigma = 600;
  cfg.beta = beta;
  return cfg;
}

void check_partition(const NodeSet &nodes, const Clustering &c) {
  const Index J = nodes.num_bs();
  std::vector<int> seen(static_cast<std::size_t>(J + nodes.num_users()), 0);
  for (Index m = 0; m < c.num_clusters(); ++m) {
    for (Index j : c.bs_of[m]) {
      ++seen[j];
      CHECK(c.assignment[j] == m);
    }
    for (Index k : c.users_of[m]) {
      ++seen[J + k];
      CHECK(c.assignment[J + k] == m);
    }
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
}

} // namespace

TEST_CASE("config validation names the field", "[netgen]") {
  auto cfg = s1(1e-3);
  cfg.D = -1;
  try {
    cfg.validate();
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.field() == "D");
  }
  cfg = s1(1e-3);
  cfg.lambda_b.reset();
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_THROWS_AS(s2(0).validate(), Error);
  CHECK_NOTHROW(s2(10).validate());
  CHECK_THROWS_AS(scenario_kind_from_string("S9"), Error);
}

TEST_CASE("S1 layout", "[netgen]") {
  RngStream stream(11, 0);
  const auto cfg = s1(1e-3);
  double sumJ = 0, sumK = 0;
  const int draws = 40;
  for (int i = 0; i < draws; ++i) {
    auto sub = stream.substream(i);
    const auto nodes = generate_s1(cfg, sub);
    sumJ += nodes.num_bs();
    sumK += nodes.num_users();
    CHECK(nodes.bs.colwise().norm().maxCoeff() <= 1000.0);
    CHECK(nodes.users.colwise().norm().maxCoeff() <= 1000.0);
  }
  const double expected = 1e-3 * std::numbers::pi * 1000 * 1000;
  // 4 standard errors of a mean of Poisson counts
  const double tol = 4 * std::sqrt(expected / draws);
  CHECK(std::abs(sumJ / draws - expected) < tol);
  CHECK(std::abs(sumK / draws - expected) < tol);
}

TEST_CASE("disk radius law", "[netgen]") {
  RngStream stream(4, 4);
  const int n = 100000;
  double mean = 0;
  for (int i = 0; i < n; ++i)
    mean += sample_disk_radius(stream, 1000);
  CHECK_THAT(mean / n, WithinRel(2000.0 / 3.0, 0.01));
}

TEST_CASE("S2 layout", "[netgen]") {
  RngStream stream(12, 0);
  auto nodes = generate_s2(s2(5000), stream);
  CHECK(nodes.num_bs() == 5000);
  CHECK(nodes.bs.cwiseAbs().maxCoeff() <= 1000.0);
  CHECK(nodes.users.cwiseAbs().maxCoeff() <= 1000.0);

  CHECK(generate_s2(s2(4, 0.5), stream).num_users() == 2);

  // Histogram of |coordinate| must decrease for mu = 0.
  std::vector<int> bins(5, 0);
  for (Index i = 0; i < nodes.num_bs(); ++i)
    for (int d = 0; d < 2; ++d)
      ++bins[std::min(4, static_cast<int>(std::abs(nodes.bs(d, i)) / 200.0))];
  for (int b = 1; b < 5; ++b)
    CHECK(bins[b] < bins[b - 1]);
}

TEST_CASE("k-means basics", "[netgen]") {
  RngStream stream(5, 0);
  SECTION("single cluster") {
    NodeSet nodes{Points2::Random(2, 20) * 100, Points2::Random(2, 10) * 100};
    const auto c = kmeans_partition(nodes, 1, stream);
    Point2 mean = (nodes.bs.rowwise().sum() + nodes.users.rowwise().sum()) / 30.0;
    CHECK((c.centroids.col(0) - mean).norm() < 1e-9);
    check_partition(nodes, c);
  }
  SECTION("four corners, four clusters") {
    NodeSet nodes;
    nodes.bs.resize(2, 2);
    nodes.bs << 0, 10, 0, 0;
    nodes.users.resize(2, 2);
    nodes.users << 0, 10, 10, 10;
    const auto c = kmeans_partition(nodes, 4, stream);
    // The brute-force optimum puts every point in its own cluster (cost 0).
    std::set<Index> labels(c.assignment.begin(), c.assignment.end());
    CHECK(labels.size() == 4);
    for (Index m = 0; m < 4; ++m)
      CHECK(c.bs_of[m].size() + c.users_of[m].size() == 1);
  }
  SECTION("fewer nodes than clusters") {
    NodeSet nodes{Points2::Zero(2, 1), Points2::Zero(2, 1)};
    CHECK_THROWS_AS(kmeans_partition(nodes, 3, stream), Error);
  }
}

TEST_CASE("k-means on a full-scale draw", "[netgen]") {
  RngStream stream(21, 0);
  auto layout = stream.substream(0);
  auto seeds = stream.substream(1);
  const auto nodes = generate_s1(s1(1e-3), layout);
  const auto c = kmeans_partition(nodes, 25, seeds);
  REQUIRE(c.num_clusters() == 25);
  check_partition(nodes, c);
  for (Index m = 0; m < 25; ++m)
    CHECK(c.bs_of[m].size() + c.users_of[m].size() > 0);
  if (c.converged) {
    // Lloyd fixed point: every node sits with its nearest centroid.
    const Index J = nodes.num_bs();
    for (Index i = 0; i < J + nodes.num_users(); ++i) {
      const Point2 p = i < J ? Point2(nodes.bs.col(i)) : Point2(nodes.users.col(i - J));
      Index best;
      (c.centroids.colwise() - p).colwise().squaredNorm().minCoeff(&best);
      CHECK((c.centroids.col(best) - p).squaredNorm() ==
            (c.centroids.col(c.assignment[i]) - p).squaredNorm());
    }
  }
}

TEST_CASE("per-cluster user ratio tracks beta", "[netgen]") {
  for (auto kind : {ScenarioKind::S1_disk_ppp, ScenarioKind::S2_square_truncnorm}) {
    ScenarioConfig cfg = kind == ScenarioKind::S1_disk_ppp ? s1(300 / (std::numbers::pi * 1e6), 2.0, 9)
                                                           : s2(300, 2.0);
    cfg.M = 9;
    double ratio = 0;
    int count = 0;
    for (int r = 0; r < 10; ++r) {
      RngStream stream(77, r);
      auto a = stream.substream(0), b = stream.substream(1);
      const auto nodes = generate_nodes(cfg, a);
      const auto c = kmeans_partition(nodes, cfg.M, b);
      for (Index m = 0; m < cfg.M; ++m)
        if (!c.bs_of[m].empty()) {
          ratio += double(c.users_of[m].size()) / double(c.bs_of[m].size());
          ++count;
        }
    }
    CHECK_THAT(ratio / count, WithinRel(2.0, 0.10));
  }
}

TEST_CASE("cluster selection", "[netgen]") {
  Clustering c;
  c.centroids.resize(2, 5);
  // distances 30, 10, 50, 20, 40 from the origin
  c.centroids << 30, 0, 0, 20, 0, 0, 10, 50, 0, 40;
  c.bs_of.resize(5);
  c.users_of.resize(5);
  CHECK(select_cluster(c, ClusterSelector::closest) == 1);
  CHECK(select_cluster(c, ClusterSelector::furthest) == 2);
  CHECK(select_cluster(c, ClusterSelector::median) == 0);

  Clustering one;
  one.centroids = Points2::Constant(2, 1, 3.0);
  one.bs_of.resize(1);
  one.users_of.resize(1);
  for (auto w : {ClusterSelector::closest, ClusterSelector::median, ClusterSelector::furthest})
    CHECK(select_cluster(one, w) == 0);

  // Even M takes the lower median of the descending order: {40,30,20,10} -> 30.
  Clustering four;
  four.centroids.resize(2, 4);
  four.centroids << 10, 20, 30, 40, 0, 0, 0, 0;
  four.bs_of.resize(4);
  four.users_of.resize(4);
  CHECK(select_cluster(four, ClusterSelector::median) == 2);

  CHECK(cluster_selector_from_string(to_string(ClusterSelector::median)) == ClusterSelector::median);
}
