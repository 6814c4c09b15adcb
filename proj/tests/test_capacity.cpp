#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "oracles.hpp"
#include "udcap/capacity.hpp"
#include "udcap/linalg.hpp"

using namespace udcap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ChannelInstance random_instance(RngStream &s, Index J, Index K, Index K_out,
                                const FadingParams &p) {
  MatrixXcd G(J, K), h(J, K_out);
  fill_complex_gaussian(s, G);
  fill_complex_gaussian(s, h);
  return assemble_channel(oracle::random_gains(s, J, K), G, h * 0.3, p);
}

ScenarioConfig desk_s1(double beta) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::S1_disk_ppp;
  cfg.D = 1000;
  cfg.lambda_b = 300.0 / (std::numbers::pi * 1e6);
  cfg.beta = beta;
  cfg.M = 9;
  return cfg;
}

} // namespace

TEST_CASE("exact capacity, closed cases", "[capacity]") {
  FadingParams p;
  p.N0 = 0.5;
  p.P = 2;
  ChannelInstance ch;
  ch.J_m = 3;
  ch.K_m = 2;
  ch.L = MatrixXd::Zero(3, 2);
  ch.G = MatrixXcd::Ones(3, 2);
  ch.Xi = p.N0 * MatrixXcd::Identity(3, 3);
  ch.Ltilde = VectorXd::Zero(3);
  CHECK(exact_capacity_once(ch, p).value == 0.0);

  // H = I-like 3x3 scaled columns -> H H^H diagonal
  ch.K_m = 3;
  ch.L = Eigen::Vector3d(1.0, 2.0, 0.5).asDiagonal();
  ch.G = MatrixXcd::Identity(3, 3);
  const Eigen::Vector3d lam(1.0, 4.0, 0.25);
  double expect = 0;
  for (int j = 0; j < 3; ++j)
    expect += std::log2(1 + p.P * lam(j) / p.N0);
  CHECK_THAT(exact_capacity_once(ch, p).value, WithinRel(expect / 3, 1e-13));

  p.log_base = LogBase::nats;
  CHECK_THAT(exact_capacity_once(ch, p).value, WithinRel(expect / 3 * std::numbers::ln2, 1e-13));
}

TEST_CASE("exact capacity against the eigen route", "[capacity]") {
  FadingParams p;
  p.N0 = 1e-3;
  p.log_base = LogBase::nats;
  RngStream s(17, 0);
  for (auto [J, K] : {std::pair<Index, Index>{6, 4}, {16, 9}, {64, 64}, {128, 100}, {5, 12}}) {
    const auto ch = random_instance(s, J, K, 2 * J, p);
    const double ref = oracle::eigen_capacity_nats(ch.Xi, ch.H(), p.P);
    CHECK_THAT(exact_capacity_once(ch, p).value, WithinRel(ref, 1e-9));
  }
}

TEST_CASE("exact capacity is monotone in P", "[capacity]") {
  RngStream s(3, 3);
  MatrixXcd G(10, 7), h(10, 30);
  fill_complex_gaussian(s, G);
  fill_complex_gaussian(s, h);
  const MatrixXd L = oracle::random_gains(s, 10, 7);
  double prev = -1;
  for (double P = 1e-3; P < 1e3; P *= 2) {
    FadingParams p;
    p.P = P;
    p.N0 = 1e-2;
    const double c = exact_capacity_once(assemble_channel(L, G, h, p), p).value;
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("exact capacity is invariant under column rotation", "[capacity]") {
  FadingParams p;
  p.N0 = 0.1;
  RngStream s(4, 4);
  for (Index n : {4, 9, 16}) {
    const auto ch = random_instance(s, n, n, n, p);
    const MatrixXcd H = ch.H();
    const MatrixXcd U = oracle::random_unitary(s, n);
    const MatrixXcd HU = H * U;
    const double a = (hermitian_logdet(ch.Xi + hermitian_outer(H, p.P)) - hermitian_logdet(ch.Xi));
    const double b = (hermitian_logdet(ch.Xi + hermitian_outer(HU, p.P)) - hermitian_logdet(ch.Xi));
    CHECK_THAT(b, WithinRel(a, 1e-10));
    CHECK_THAT(exact_capacity_once(ch, p).value,
               WithinRel(a / n / std::numbers::ln2, 1e-12));
  }
}

TEST_CASE("Monte-Carlo driver", "[capacity]") {
  const FadingParams p;
  const auto cfg = desk_s1(0.5);
  const RngStream base(123, 0);
  const Estimator exact = [](const ReplicationContext &ctx) {
    return exact_capacity_once(ctx.channel(), ctx.fading());
  };

  SECTION("single replication") {
    const auto r = monte_carlo_capacity(cfg, ClusterSelector::closest, p, 1, base, exact, 1);
    auto ctx = draw_replication(cfg, ClusterSelector::closest, p, base, 0);
    CHECK(r.mean == exact(ctx).value);
    CHECK(r.stddev == 0.0);
  }
  SECTION("determinism across runs and worker counts") {
    const auto a = monte_carlo_capacity(cfg, ClusterSelector::closest, p, 12, base, exact, 1);
    const auto b = monte_carlo_capacity(cfg, ClusterSelector::closest, p, 12, base, exact, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.stddev == b.stddev);
    CHECK(a.values == b.values);
  }
  SECTION("desk-scale concentration") {
    const auto r = monte_carlo_capacity(cfg, ClusterSelector::closest, p, 50, base, exact);
    // The per-replication spread is about a quarter of the mean here; the
    // concentration gate applies to the standard error of the estimate.
    CHECK(r.stddev / std::sqrt(double(r.reps)) / r.mean < 0.1);
    double m = 0;
    for (double v : r.values)
      m += v;
    m /= r.values.size();
    double var = 0;
    for (double v : r.values)
      var += (v - m) * (v - m);
    CHECK_THAT(r.mean, WithinRel(m, 1e-12));
    CHECK_THAT(r.stddev, WithinRel(std::sqrt(var / (r.values.size() - 1)), 1e-10));
  }
  SECTION("estimator failures carry the replication index") {
    const Estimator boom = [](const ReplicationContext &ctx) -> CapacityEstimate {
      if (ctx.replication() == 3)
        throw Error("numeric", "x", "boom");
      return {};
    };
    try {
      monte_carlo_capacity(cfg, ClusterSelector::closest, p, 6, base, boom, 2);
      FAIL("expected an error");
    } catch (const Error &e) {
      CHECK(std::string(e.what()).find("replication 3") != std::string::npos);
    }
  }
  SECTION("reps must be positive") {
    CHECK_THROWS_AS(monte_carlo_capacity(cfg, ClusterSelector::closest, p, 0, base, exact), Error);
  }
}

TEST_CASE("worker count resolution", "[capacity]") {
  CHECK(resolve_workers(3) == 3);
  setenv("UDCAP_WORKERS", "2", 1);
  CHECK(resolve_workers(0) == 2);
  unsetenv("UDCAP_WORKERS");
  CHECK(resolve_workers(0) >= 1);
}
