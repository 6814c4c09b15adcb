#pragma once

#include "udcap/netgen.hpp"
#include "udcap/rng.hpp"
#include "udcap/types.hpp"

namespace udcap {

/// Path-loss thresholds, powers and the log unit used by every estimator.
struct FadingParams {
  double d0 = 10.0;    // near-field threshold [m]
  double d1 = 50.0;    // far-field threshold [m]
  double P = 1.0;      // transmit power [W]
  double N0 = 1e-12;   // noise power [W]
  LogBase log_base = LogBase::bits;

  void validate() const;
};

/// Three-band large-scale fading: d^-1.75 beyond d1, d1^-0.75 d^-1 between
/// d0 and d1, and the constant d1^-0.75 d0^-1 inside d0.
double large_scale_gain(double d, const FadingParams &params);

/// One realisation of a cluster's uplink channel.
struct ChannelInstance {
  Index J_m = 0;
  Index K_m = 0;
  MatrixXd L;     // J_m x K_m large-scale gains
  MatrixXcd G;    // J_m x K_m small-scale fading
  MatrixXcd Xi;   // J_m x J_m noise-plus-interference
  VectorXd Ltilde; // row means of L

  MatrixXcd H() const { return L.cast<std::complex<double>>().cwiseProduct(G); }
};

/// J x K matrix of gains between the given BS and user columns.
MatrixXd gain_matrix(const Points2 &bs, const Points2 &users,
                     const FadingParams &params);

/// Collects the columns of `pts` listed in `idx`.
Points2 gather(const Points2 &pts, const std::vector<Index> &idx);

/// Users not in cluster m, as columns.
Points2 out_of_cluster_users(const NodeSet &nodes, const Clustering &clustering,
                             Index m);

ChannelInstance build_channel(const NodeSet &nodes, const Clustering &clustering,
                              Index m, const FadingParams &params,
                              RngStream &stream);

/// Assembles an instance from explicit gains and fading; `interference` is
/// the J x K_out matrix of out-of-cluster channel vectors h_k as columns.
ChannelInstance assemble_channel(MatrixXd L, MatrixXcd G,
                                 const MatrixXcd &interference,
                                 const FadingParams &params);

/// Minimum over diagonal matrices D of E||L o G - D G||_F^2 for G with
/// i.i.d. CN(0,1) entries, attained at D = diag(row means of L).
double hadamard_approx_error(const MatrixXd &L);

/// trace(P_m) with P_m = P Xi^{-1/2} Ltilde G G^H Ltilde Xi^{-1/2}.
double sinr_trace(const ChannelInstance &ch, const FadingParams &params);

} // namespace udcap
