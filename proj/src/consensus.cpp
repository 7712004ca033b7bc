#include "rmean/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rmean/bounds.hpp"

namespace rmean {

std::vector<double> symmetric_eigenvalues_jacobi(std::vector<double> matrix,
                                                 int n, double tolerance,
                                                 int max_sweeps) {
  if (n < 1) throw std::invalid_argument("jacobi: n must be >= 1");
  if (matrix.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("jacobi: matrix size mismatch");
  }
  auto at = [&matrix, n](int i, int j) -> double& {
    return matrix[static_cast<std::size_t>(i) * n + j];
  };

  auto off_norm = [&]() {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) sum += at(i, j) * at(i, j);
    }
    return std::sqrt(2.0 * sum);
  };

  for (int sweep = 0; sweep < max_sweeps && off_norm() > tolerance; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        // Smaller root of t^2 + 2*theta*t - 1 = 0, for a stable rotation.
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eigenvalues(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eigenvalues[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
  return eigenvalues;
}

PerronMatrix::PerronMatrix(const Graph& graph) : m_(graph.size()) {
  entries_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  inclusive_.resize(static_cast<std::size_t>(m_));
  weights_.resize(static_cast<std::size_t>(m_));

  double weight_total = 0.0;
  for (int i = 0; i < m_; ++i) {
    auto& nbhd = inclusive_[static_cast<std::size_t>(i)];
    nbhd.push_back(i);
    for (int j : graph.neighbors(i)) nbhd.push_back(j);
    std::sort(nbhd.begin(), nbhd.end());
    const double share = 1.0 / static_cast<double>(nbhd.size());
    for (int j : nbhd) entries_[static_cast<std::size_t>(i) * m_ + j] = share;
    weights_[static_cast<std::size_t>(i)] = static_cast<double>(nbhd.size());
    weight_total += static_cast<double>(nbhd.size());
  }
  for (double& w : weights_) w /= weight_total;

  // Eigenvalues via the similar symmetric matrix
  // S = (I+D)^-1/2 (I+A) (I+D)^-1/2, s_ij = (I+A)_ij / sqrt((1+d_i)(1+d_j)).
  std::vector<double> sym(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const double di = static_cast<double>(inclusive_[static_cast<std::size_t>(i)].size());
    for (int j : inclusive_[static_cast<std::size_t>(i)]) {
      const double dj =
          static_cast<double>(inclusive_[static_cast<std::size_t>(j)].size());
      sym[static_cast<std::size_t>(i) * m_ + j] = 1.0 / std::sqrt(di * dj);
    }
  }
  eigenvalues_ = symmetric_eigenvalues_jacobi(std::move(sym), m_);

  if (m_ == 1) {
    lambda_ = 0.0;
  } else {
    lambda_ = std::max(std::abs(eigenvalues_[1]),
                       std::abs(eigenvalues_.back()));
  }
}

double PerronMatrix::entry(int i, int j) const {
  if (i < 0 || i >= m_ || j < 0 || j >= m_) {
    throw std::out_of_range("PerronMatrix::entry: index out of range");
  }
  return entries_[static_cast<std::size_t>(i) * m_ + j];
}

const std::vector<int>& PerronMatrix::inclusive_neighborhood(int i) const {
  if (i < 0 || i >= m_) {
    throw std::out_of_range("PerronMatrix: vertex out of range");
  }
  return inclusive_[static_cast<std::size_t>(i)];
}

std::vector<double> PerronMatrix::apply(std::span<const double> values) const {
  if (values.size() != static_cast<std::size_t>(m_)) {
    throw std::invalid_argument("PerronMatrix::apply: size mismatch");
  }
  std::vector<double> out(static_cast<std::size_t>(m_), 0.0);
  for (int i = 0; i < m_; ++i) {
    double sum = 0.0;
    for (int j = 0; j < m_; ++j) {
      sum += entries_[static_cast<std::size_t>(i) * m_ + j] * values[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = sum;
  }
  return out;
}

PerronMatrix perron(const Graph& graph) { return PerronMatrix(graph); }

double spectral_gap(const PerronMatrix& matrix) {
  return 1.0 - matrix.lambda();
}

std::vector<double> consensus_round(const PerronMatrix& matrix,
                                    std::span<const double> values) {
  const int m = matrix.size();
  if (values.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("consensus_round: size mismatch");
  }
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const auto& nbhd = matrix.inclusive_neighborhood(i);
    double sum = 0.0;
    for (int j : nbhd) sum += values[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(nbhd.size());
  }
  return out;
}

ConsensusTarget consensus_fixed_point(const PerronMatrix& matrix,
                                      std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(matrix.size())) {
    throw std::invalid_argument("consensus_fixed_point: size mismatch");
  }
  const auto& weights = matrix.stationary_weights();
  double value = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    value += weights[i] * values[i];
  }
  return ConsensusTarget{value, weights};
}

double uniform_average(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("uniform_average: empty input");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double measure_contraction_constant(const PerronMatrix& matrix,
                                    std::span<const double> probe,
                                    int rounds) {
  if (rounds < 1) {
    throw std::invalid_argument("measure_contraction_constant: rounds >= 1");
  }
  if (matrix.size() == 1) return 1.0;
  const double target = consensus_fixed_point(matrix, probe).value;
  auto deviation = [&](std::span<const double> v) {
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x - target));
    return worst;
  };
  const double lambda = matrix.lambda();
  const double dev0 = deviation(probe);
  // A starting deviation at the level of the probe's own rounding noise means
  // there is no disagreement to measure (e.g. a flat probe, where the fixed
  // point itself is only accurate to one ulp).
  double probe_scale = std::abs(target);
  for (double x : probe) probe_scale = std::max(probe_scale, std::abs(x));
  if (dev0 <= probe_scale * 1e-12 || lambda == 0.0) return 1.0;

  std::vector<double> state(probe.begin(), probe.end());
  double ratio_max = 1.0;
  double scale = dev0;  // lambda^k * dev0
  for (int k = 1; k <= rounds; ++k) {
    state = consensus_round(matrix, state);
    scale *= lambda;
    const double dev = deviation(state);
    // Stop once the deviation sinks into rounding noise; ratios below the
    // noise floor are not measurements.
    if (scale <= 1e-300 || dev <= dev0 * 1e-13) break;
    ratio_max = std::max(ratio_max, dev / scale);
  }
  return ratio_max;
}

namespace {

double contraction_rate(double lambda, double c, int K) {
  if (!(lambda >= 0.0)) {
    throw std::domain_error("bound: lambda must be >= 0");
  }
  if (!(c > 0.0)) throw std::domain_error("bound: c must be > 0");
  if (K < 0) throw std::domain_error("bound: K must be >= 0");
  return c * std::pow(lambda, K);
}

}  // namespace

GeometricBound theorem3_bound(const RobustnessParams& params, double sigma,
                              int m, std::int64_t t0, std::int64_t t, int K,
                              double lambda, double c, double alpha_o,
                              double beta_o, double initial_disagreement) {
  if (m < 1) throw std::domain_error("theorem3_bound: m must be >= 1");
  if (t0 < 1) throw std::domain_error("theorem3_bound: t0 must be >= 1");
  if (t < 2 * t0) throw std::domain_error("theorem3_bound: requires t >= 2*t0");
  if (!(sigma >= 0.0)) {
    throw std::domain_error("theorem3_bound: sigma must be >= 0");
  }
  const double rate = contraction_rate(lambda, c, K);
  const double reach = 2.0 * std::max(std::abs(alpha_o), std::abs(beta_o));

  double geometric = std::pow(rate, static_cast<double>(t - t0)) *
                     initial_disagreement;
  for (std::int64_t j = t0 + 1; j <= t; ++j) {
    geometric += std::pow(rate, static_cast<double>(t + 1 - j)) * reach /
                 static_cast<double>(j - t0);
  }

  const double eps_t0 = compute_epsilon(params, t0);
  const double tail =
      3.0 * estimation_error_bound_E(sigma, 4.0 * eps_t0) +
      2.0 * sigma *
          std::sqrt(params.log_term() /
                    (static_cast<double>(m) * static_cast<double>(t - t0)));
  return GeometricBound{geometric + tail, rate < 1.0, geometric, tail};
}

GeometricBound theorem4_bound(const RobustnessParams& params, double sigma,
                              std::int64_t t_bar, std::int64_t t, int K,
                              double lambda, double c,
                              std::span<const double> threshold_magnitudes,
                              double err_at_tbar, double disagreement_at_tbar) {
  if (t_bar < 1) throw std::domain_error("theorem4_bound: t_bar must be >= 1");
  if (t < t_bar + 1) {
    throw std::domain_error("theorem4_bound: requires t >= t_bar + 1");
  }
  if (!(sigma >= 0.0)) {
    throw std::domain_error("theorem4_bound: sigma must be >= 0");
  }
  if (threshold_magnitudes.size() < static_cast<std::size_t>(t)) {
    throw std::domain_error("theorem4_bound: missing threshold history");
  }
  const double rate = contraction_rate(lambda, c, K);

  double geometric = std::pow(rate, static_cast<double>(t - t_bar)) *
                     disagreement_at_tbar;
  double summand_tail = 0.0;
  for (std::int64_t j = t_bar + 1; j <= t; ++j) {
    geometric += std::pow(rate, static_cast<double>(t + 1 - j)) * 2.0 *
                 threshold_magnitudes[static_cast<std::size_t>(j - 1)] /
                 static_cast<double>(j);
    summand_tail += theorem2_summand(params, sigma, j);
  }
  const double local = theorem2_bound_given_tail(t_bar, err_at_tbar, t,
                                                 summand_tail);
  return GeometricBound{geometric + local, rate < 1.0, geometric, local};
}

}  // namespace rmean
