#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmean/estimator.hpp"
#include "rmean/graph.hpp"

namespace rmean {

// Eigenvalues of a dense symmetric matrix (row-major, n x n) by cyclic Jacobi
// rotations, iterated until the off-diagonal Frobenius norm falls below
// `tolerance`. Returned in descending order.
std::vector<double> symmetric_eigenvalues_jacobi(std::vector<double> matrix,
                                                 int n,
                                                 double tolerance = 1e-12,
                                                 int max_sweeps = 100);

// Row-stochastic mixing matrix P = (I + D)^-1 (I + A): row i averages
// uniformly over the inclusive neighborhood of vertex i. Its spectrum is
// real (P is similar to a symmetric matrix); the largest eigenvalue is 1 and
// the second largest in absolute value, lambda, drives consensus contraction.
class PerronMatrix {
 public:
  explicit PerronMatrix(const Graph& graph);

  int size() const { return m_; }
  double entry(int i, int j) const;

  // Eigenvalues of P in descending order (computed on the symmetrized form).
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  // Second largest absolute eigenvalue; 0 for a single vertex.
  double lambda() const { return lambda_; }

  // P * values via dense multiplication.
  std::vector<double> apply(std::span<const double> values) const;

  // Sorted neighborhood of vertex i including i itself; row i of P is
  // uniform on exactly these columns.
  const std::vector<int>& inclusive_neighborhood(int i) const;

  // Left Perron vector normalized to sum 1: weights proportional to
  // 1 + degree(i). P preserves the weighted mean sum_i w_i v_i.
  const std::vector<double>& stationary_weights() const { return weights_; }

 private:
  int m_;
  std::vector<double> entries_;               // row-major
  std::vector<std::vector<int>> inclusive_;   // neighborhoods including self
  std::vector<double> eigenvalues_;
  std::vector<double> weights_;
  double lambda_;
};

PerronMatrix perron(const Graph& graph);

// 1 - lambda.
double spectral_gap(const PerronMatrix& matrix);

// One synchronous averaging round: out[i] is the mean of values over the
// inclusive neighborhood of i. Agrees with apply() up to summation order.
std::vector<double> consensus_round(const PerronMatrix& matrix,
                                    std::span<const double> values);

struct ConsensusTarget {
  double value;                 // weighted mean the iteration converges to
  std::vector<double> weights;  // stationary weights used
};

// Fixed point of repeated averaging from `values`.
ConsensusTarget consensus_fixed_point(const PerronMatrix& matrix,
                                      std::span<const double> values);

double uniform_average(std::span<const double> values);

// Empirical per-round contraction constant: run `rounds` averaging rounds
// from `probe` and return max_k dev_k / lambda^k, where dev_k is the
// max-norm distance to the fixed point. Returns 1 when the probe starts at
// the fixed point or the graph has a single vertex.
double measure_contraction_constant(const PerronMatrix& matrix,
                                    std::span<const double> probe, int rounds);

struct GeometricBound {
  double value;      // geometric + tail
  bool contracting;  // c * lambda^K < 1
  double geometric;  // network part: decayed disagreement + threshold drift
  double tail;       // local estimation part
};

// Error bound for the distributed fixed-threshold estimator at time
// t >= 2*t0 on m agents with K averaging rounds per step:
//   (c*lambda^K)^(t-t0) * initial_disagreement
//   + sum_{j=t0+1}^t (c*lambda^K)^(t+1-j) * 2*max(|alpha_o|,|beta_o|)/(j-t0)
//   + 3*E(4*eps_{t0}) + 2*sigma*sqrt(log(4/delta) / (m*(t-t0))).
GeometricBound theorem3_bound(const RobustnessParams& params, double sigma,
                              int m, std::int64_t t0, std::int64_t t, int K,
                              double lambda, double c, double alpha_o,
                              double beta_o, double initial_disagreement);

// Error bound for the distributed adaptive estimator at time t >= t_bar + 1:
//   (c*lambda^K)^(t-t_bar) * disagreement_at_tbar
//   + sum_{j=t_bar+1}^t (c*lambda^K)^(t+1-j) * 2*threshold_magnitudes[j-1]/j
//   + (t_bar/t)*err_at_tbar + (1/t)*sum_{j=t_bar+1}^t U_j,
// where threshold_magnitudes[j-1] = max(|alpha_j|, |beta_j|).
GeometricBound theorem4_bound(const RobustnessParams& params, double sigma,
                              std::int64_t t_bar, std::int64_t t, int K,
                              double lambda, double c,
                              std::span<const double> threshold_magnitudes,
                              double err_at_tbar, double disagreement_at_tbar);

}  // namespace rmean
