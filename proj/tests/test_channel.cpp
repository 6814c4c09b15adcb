#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "udcap/channel.hpp"
#include "udcap/linalg.hpp"

using namespace udcap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("large-scale gain", "[channel]") {
  const FadingParams p;
  CHECK_THAT(large_scale_gain(50, p), WithinRel(std::pow(50.0, -1.75), 1e-14));
  CHECK_THAT(large_scale_gain(50, p), WithinRel(1.064e-3, 1e-3));
  CHECK_THAT(large_scale_gain(5, p), WithinRel(std::pow(50.0, -0.75) / 10.0, 1e-14));
  CHECK_THAT(large_scale_gain(5, p), WithinRel(5.32e-3, 1e-3));
  CHECK_THAT(large_scale_gain(1000, p), WithinRel(5.62e-6, 1e-3));
  CHECK(large_scale_gain(0, p) == large_scale_gain(10, p));

  double prev = large_scale_gain(0, p);
  for (double d = 0.25; d < 2000; d *= 1.01) {
    const double g = large_scale_gain(d, p);
    CHECK(g <= prev);
    prev = g;
  }
  for (double t : {p.d0, p.d1})
    CHECK_THAT(large_scale_gain(t * (1 + 1e-12), p), WithinRel(large_scale_gain(t, p), 1e-10));
}

TEST_CASE("fading params validation", "[channel]") {
  FadingParams p;
  p.d1 = 5;
  CHECK_THROWS_AS(p.validate(), Error);
  p = FadingParams{};
  p.N0 = -1;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("hadamard approximation error", "[channel]") {
  MatrixXd L(2, 2);
  L << 1, 2, 3, 5;
  CHECK_THAT(hadamard_approx_error(L), WithinAbs(2.5, 1e-14));
  MatrixXd flat = MatrixXd::Constant(3, 4, 0.37);
  CHECK(hadamard_approx_error(flat) == 0.0);
  RngStream s(1, 1);
  CHECK(hadamard_approx_error(oracle::random_gains(s, 5, 7)) > 0.0);
}

TEST_CASE("row-mean diagonal minimises the Monte-Carlo error", "[channel]") {
  RngStream s(31, 0);
  const MatrixXd L = oracle::random_gains(s, 4, 3);
  const VectorXd mean = L.rowwise().mean();
  const int draws = 10000;
  std::vector<MatrixXcd> G(draws, MatrixXcd(4, 3));
  for (auto &g : G)
    fill_complex_gaussian(s, g);
  auto mc = [&](const VectorXd &c) {
    double acc = 0;
    for (const auto &g : G)
      acc += (L.cast<std::complex<double>>().cwiseProduct(g) - c.asDiagonal() * g).squaredNorm();
    return acc / draws;
  };
  const double at_mean = mc(mean);
  for (double f : {0.8, 0.9, 1.1, 1.2})
    for (Index j = 0; j < 4; ++j) {
      VectorXd c = mean;
      c(j) *= f;
      CHECK(mc(c) > at_mean);
    }
  CHECK_THAT(at_mean, WithinRel(hadamard_approx_error(L), 0.05));
}

TEST_CASE("interference matrix assembly", "[channel]") {
  FadingParams p;
  p.N0 = 0.25;
  p.P = 2.0;
  RngStream s(8, 8);
  const MatrixXd L = oracle::random_gains(s, 5, 3);
  MatrixXcd G(5, 3);
  fill_complex_gaussian(s, G);

  SECTION("no interferers") {
    const auto ch = assemble_channel(L, G, MatrixXcd(5, 0), p);
    CHECK((ch.Xi - p.N0 * MatrixXcd::Identity(5, 5)).norm() == 0.0);
  }
  SECTION("one interferer") {
    MatrixXcd h(5, 1);
    fill_complex_gaussian(s, h);
    const auto ch = assemble_channel(L, G, h, p);
    const MatrixXcd excess = ch.Xi - p.N0 * MatrixXcd::Identity(5, 5);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(excess);
    const auto ev = es.eigenvalues();
    CHECK(ev.head(4).cwiseAbs().maxCoeff() < 1e-12 * ev(4));
    CHECK_THAT(excess.trace().real(), WithinRel(p.P * h.squaredNorm(), 1e-13));
  }
  SECTION("many interferers") {
    MatrixXcd h(5, 40);
    fill_complex_gaussian(s, h);
    const auto ch = assemble_channel(L, G, h * 1e-3, p);
    CHECK((ch.Xi - ch.Xi.adjoint()).norm() == 0.0);
    const auto ev = Eigen::SelfAdjointEigenSolver<MatrixXcd>(ch.Xi).eigenvalues();
    CHECK(ev.minCoeff() >= p.N0 - 1e-12);
    CHECK((ch.Ltilde - L.rowwise().mean()).norm() < 1e-15);
  }
}

TEST_CASE("build_channel from a layout", "[channel]") {
  NodeSet nodes;
  nodes.bs.resize(2, 3);
  nodes.bs << 0, 30, 500, 0, 0, 0;
  nodes.users.resize(2, 3);
  nodes.users << 10, 40, 520, 0, 0, 0;
  Clustering c;
  c.assignment = {0, 0, 1, 0, 0, 1};
  c.centroids.resize(2, 2);
  c.centroids << 20, 510, 0, 0;
  c.bs_of = {{0, 1}, {2}};
  c.users_of = {{0, 1}, {2}};

  const FadingParams p;
  RngStream s(1, 2);
  const auto ch = build_channel(nodes, c, 0, p, s);
  CHECK(ch.J_m == 2);
  CHECK(ch.K_m == 2);
  CHECK_THAT(ch.L(0, 0), WithinRel(large_scale_gain(10, p), 1e-15));
  CHECK_THAT(ch.L(1, 0), WithinRel(large_scale_gain(20, p), 1e-15));
  CHECK((ch.Xi - ch.Xi.adjoint()).norm() == 0.0);
  const MatrixXcd excess = ch.Xi - p.N0 * MatrixXcd::Identity(2, 2);
  // one interferer: rank one
  CHECK(std::abs(excess.determinant()) < 1e-12 * excess.squaredNorm());

  c.users_of = {{}, {0, 1, 2}};
  c.assignment = {0, 0, 1, 1, 1, 1};
  CHECK_THROWS_AS(build_channel(nodes, c, 0, p, s), Error);
}

TEST_CASE("SINR trace", "[channel]") {
  FadingParams p;
  p.P = 1.7;
  RngStream s(5, 5);

  SECTION("identity whitening") {
    ChannelInstance ch;
    ch.J_m = 4;
    ch.K_m = 3;
    ch.G.resize(4, 3);
    fill_complex_gaussian(s, ch.G);
    ch.Ltilde = VectorXd::Ones(4);
    ch.Xi = MatrixXcd::Identity(4, 4);
    CHECK_THAT(sinr_trace(ch, p), WithinRel(p.P * ch.G.squaredNorm(), 1e-13));
    const double base = sinr_trace(ch, p);
    ch.Xi *= 4.0;
    CHECK_THAT(sinr_trace(ch, p), WithinRel(base / 4.0, 1e-13));
  }
  SECTION("dense oracle") {
    for (auto [J, K] : {std::pair<Index, Index>{8, 5}, {16, 16}, {64, 64}, {40, 12}}) {
      MatrixXcd G(J, K), h(J, 3 * J);
      fill_complex_gaussian(s, G);
      fill_complex_gaussian(s, h);
      const auto ch = assemble_channel(oracle::random_gains(s, J, K), G, h * 0.1, p);
      const MatrixXcd w = oracle::inverse_sqrt(ch.Xi);
      const MatrixXcd lg = ch.Ltilde.cast<std::complex<double>>().asDiagonal() * ch.G;
      const double direct = (p.P * w * lg * lg.adjoint() * w).trace().real();
      CHECK_THAT(sinr_trace(ch, p), WithinRel(direct, 1e-9));
    }
  }
}

TEST_CASE("log-det helpers", "[channel]") {
  RngStream s(2, 9);
  MatrixXcd a(6, 10);
  fill_complex_gaussian(s, a);
  const MatrixXcd x = hermitian_outer(a, 1.0) + MatrixXcd::Identity(6, 6);
  CHECK_THAT(hermitian_logdet(x), WithinRel(std::log(x.determinant().real()), 1e-12));
  CHECK_THROWS_AS(hermitian_logdet(-x), Error);
}
