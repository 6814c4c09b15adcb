#pragma once

#include <optional>
#include <vector>

#include "udcap/capacity.hpp"
#include "udcap/channel.hpp"
#include "udcap/netgen.hpp"

namespace udcap {

/// Squared large-scale gain written as f(d) = gamma d^-epsilon, with
/// (gamma, epsilon) = (1, 3.5) beyond d1, (d1^-1.5, 2) on (d0, d1] and
/// (d1^-1.5 d0^-2, 0) inside d0.
struct ContinuousFadingKernel {
  double d0 = 10.0;
  double d1 = 50.0;

  explicit ContinuousFadingKernel(const FadingParams &params)
      : d0(params.d0), d1(params.d1) {}

  double gamma(double d) const;
  double epsilon(double d) const;
  double operator()(double d) const { return gamma(d) * std::pow(d, -epsilon(d)); }

  /// int_0^r f(s) s ds, in closed form.
  double radial_primitive(double r) const;
};

/// Per-BS signal-to-interference ratio of the diagonal limit:
///   sum_{k in C_m} l^2 / (N0 + P sum_{k not in C_m} l^2).
/// `j` indexes the BSs of cluster m in clustering order.
double rjj(const NodeSet &nodes, const Clustering &clustering, Index m, Index j,
           const FadingParams &params);

/// Numerator and interference sums of rjj for every BS of cluster m.
struct DiagonalSums {
  VectorXd signal;       // sum over in-cluster users of l^2
  VectorXd interference; // sum over out-of-cluster users of l^2
};
DiagonalSums diagonal_sums(const NodeSet &nodes, const Clustering &clustering,
                           Index m, const FadingParams &params);

/// (1/J_m) sum_j log(1 + P r_jj).
CapacityEstimate closed_form_capacity(const NodeSet &nodes,
                                      const Clustering &clustering, Index m,
                                      const FadingParams &params);

/// |C(rho_u) - C(scale rho_u)|: every user-sum term is multiplied by `scale`,
/// which is what a proportional change of user density does to both sums.
double stability_gap(const NodeSet &nodes, const Clustering &clustering,
                     Index m, const FadingParams &params, double scale);

/// Convex planar region: optional disk, optional axis-aligned square and any
/// number of half-planes n.y <= h, intersected.
struct Region {
  struct HalfPlane {
    Point2 normal;
    double offset;
  };
  std::optional<Point2> disk_center;
  double disk_radius = 0.0;
  std::optional<Point2> square_center;
  double square_half_side = 0.0;
  std::vector<HalfPlane> half_planes;

  static Region disk(const Point2 &center, double radius);
  static Region square(const Point2 &center, double half_side);

  /// Region of the scenario's whole network: disk of radius D for S1,
  /// square [-D, D]^2 for S2.
  static Region network(const ScenarioConfig &cfg);

  /// Voronoi cell of centroid m among `centroids`, intersected with `base`.
  static Region voronoi_cell(const Region &base, const Points2 &centroids, Index m);

  bool contains(const Point2 &p) const;

  /// Distance from an interior point `from` along unit direction `dir` to
  /// the boundary.
  double exit_distance(const Point2 &from, const Point2 &dir) const;

  /// Area by the polar formula around an interior point.
  double area(const Point2 &interior) const;
};

struct RegionIntegralOptions {
  double rel_tol = 1e-8;
  Index min_angles = 256;
  Index max_angles = Index{1} << 20;
};

/// int over `outer` minus `inner` of f(|x - y|) dy, with x inside `inner`
/// (pass no inner region for the full integral). Polar coordinates centred at
/// x: the radial integral is exact, the angular one is refined by doubling
/// until successive values agree to rel_tol.
double kernel_integral(const ContinuousFadingKernel &kernel, const Point2 &x,
                       const Region &outer, const Region *inner = nullptr,
                       const RegionIntegralOptions &opts = {});

/// log[ int_{D0} f dy / int_{D0 \ Dm} f dy ] for a BS at `bs_position`.
/// Independent of P and N0.
CapacityEstimate continuous_uniform_capacity(const Region &network,
                                             const Region &cluster_region,
                                             const Point2 &bs_position,
                                             const FadingParams &params,
                                             const RegionIntegralOptions &opts = {});

/// Average of continuous_uniform_capacity over the BSs of cluster m, with
/// D_m the Voronoi cell of its centroid clipped to the network region.
CapacityEstimate continuous_uniform_cluster(const ScenarioConfig &cfg,
                                            const NodeSet &nodes,
                                            const Clustering &clustering, Index m,
                                            const FadingParams &params);

} // namespace udcap
