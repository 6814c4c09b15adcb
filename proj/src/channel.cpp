#include "udcap/channel.hpp"

#include <cmath>

#include "udcap/linalg.hpp"

namespace udcap {

void FadingParams::validate() const {
  if (!(d0 > 0.0))
    throw Error("config", "d0", "d0 must be positive");
  if (!(d1 > d0))
    throw Error("config", "d1", "d1 must exceed d0");
  if (!(P > 0.0) || !std::isfinite(P))
    throw Error("config", "P", "transmit power must be positive");
  if (!(N0 >= 0.0) || !std::isfinite(N0))
    throw Error("config", "N0", "noise power must be nonnegative");
}

double large_scale_gain(double d, const FadingParams &params) {
  if (d > params.d1)
    return std::pow(d, -1.75);
  if (d > params.d0)
    return std::pow(params.d1, -0.75) / d;
  return std::pow(params.d1, -0.75) / params.d0;
}

MatrixXd gain_matrix(const Points2 &bs, const Points2 &users,
                     const FadingParams &params) {
  MatrixXd L(bs.cols(), users.cols());
  for (Index k = 0; k < users.cols(); ++k)
    for (Index j = 0; j < bs.cols(); ++j)
      L(j, k) = large_scale_gain((bs.col(j) - users.col(k)).norm(), params);
  return L;
}

Points2 gather(const Points2 &pts, const std::vector<Index> &idx) {
  Points2 out(2, static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.col(static_cast<Index>(i)) = pts.col(idx[i]);
  return out;
}

Points2 out_of_cluster_users(const NodeSet &nodes, const Clustering &clustering,
                             Index m) {
  const Index J = nodes.num_bs();
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(nodes.num_users()));
  for (Index k = 0; k < nodes.num_users(); ++k)
    if (clustering.assignment[static_cast<std::size_t>(J + k)] != m)
      idx.push_back(k);
  return gather(nodes.users, idx);
}

ChannelInstance assemble_channel(MatrixXd L, MatrixXcd G,
                                 const MatrixXcd &interference,
                                 const FadingParams &params) {
  ChannelInstance ch;
  ch.J_m = L.rows();
  ch.K_m = L.cols();
  ch.Ltilde = L.rowwise().mean();
  ch.L = std::move(L);
  ch.G = std::move(G);
  ch.Xi = hermitian_outer(interference, params.P);
  ch.Xi.diagonal().array() += params.N0;
  return ch;
}

ChannelInstance build_channel(const NodeSet &nodes, const Clustering &clustering,
                              Index m, const FadingParams &params,
                              RngStream &stream) {
  if (m < 0 || m >= clustering.num_clusters())
    throw Error("domain", "m", "cluster index out of range");
  const auto &bs_idx = clustering.bs_of[static_cast<std::size_t>(m)];
  const auto &user_idx = clustering.users_of[static_cast<std::size_t>(m)];
  if (bs_idx.empty() || user_idx.empty())
    throw Error("domain", "m", "selected cluster has no BSs or no users");

  const Points2 bs = gather(nodes.bs, bs_idx);
  MatrixXd L = gain_matrix(bs, gather(nodes.users, user_idx), params);

  MatrixXcd G(L.rows(), L.cols());
  RngStream g_stream = stream.substream(0);
  fill_complex_gaussian(g_stream, G);

  // Fresh small-scale fading for every interferer, independent of G.
  const MatrixXd L_out = gain_matrix(bs, out_of_cluster_users(nodes, clustering, m), params);
  MatrixXcd H_out(L_out.rows(), L_out.cols());
  RngStream i_stream = stream.substream(1);
  fill_complex_gaussian(i_stream, H_out);
  H_out = H_out.cwiseProduct(L_out.cast<std::complex<double>>());

  return assemble_channel(std::move(L), std::move(G), H_out, params);
}

double hadamard_approx_error(const MatrixXd &L) {
  if (L.cols() < 1)
    throw Error("domain", "L", "gain matrix needs at least one column");
  const double K = static_cast<double>(L.cols());
  double total = 0.0;
  for (Index j = 0; j < L.rows(); ++j) {
    // Two-pass form of sum_k l^2 - (sum_k l)^2 / K; exactly zero for a
    // constant row.
    if (L.row(j).maxCoeff() == L.row(j).minCoeff())
      continue;
    const double mean = L.row(j).sum() / K;
    total += (L.row(j).array() - mean).square().sum();
  }
  return total;
}

double sinr_trace(const ChannelInstance &ch, const FadingParams &params) {
  const MatrixXcd B = ch.Ltilde.cast<std::complex<double>>().asDiagonal() * ch.G;
  return params.P * whitened_energy(ch.Xi, B);
}

} // namespace udcap
