#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "collab/fisher.hpp"
#include "collab/model.hpp"

namespace collab {

/// Observations gathered over a run, grouped by kind.
struct CollectedData {
  std::vector<double> marginal_x;
  std::vector<double> marginal_y;
  std::vector<std::pair<double, double>> joint;

  void add(const Observation& obs);
  void clear();
};

enum class EstimatorKind { Delta1, Delta2, SampleMean };

std::string_view to_string(EstimatorKind kind);

struct Estimate {
  double value = 0.0;
  EstimatorKind estimator = EstimatorKind::SampleMean;
  std::size_t n_marginal_x = 0;
  std::size_t n_marginal_y = 0;
  std::size_t n_joint = 0;
};

/// Combines the marginal-Y mean with the regression-adjusted joint mean using
/// fixed weights (1 - rho^2) and 1:
///   ((1 - rho^2) ybar_1 + ybar - beta (xbar - mu_x)) / (2 - rho^2).
/// xbar is re-centred on the known mu_x so the estimator is unbiased for any mu_x.
/// Throws Error{MissingStratum} if either group is empty.
Estimate delta1(const CollectedData& data, const ObservationModel& model);

/// Per-slot variance K Var(delta1):
///   (1 - rho^2) var_y / (2 - rho^2)^2 * ((1 - rho^2)/p_y + 1/p_xy) * (p_y + p_xy).
/// Throws Error{DegeneratePolicy} when p_y or p_xy is zero.
double var_delta1(const SamplingPolicy& policy, const ObservationModel& model);

/// Regression estimator on joint samples: ybar - beta (xbar - mu_x).
/// Throws Error{MissingStratum} without joint samples.
Estimate delta2(const CollectedData& data, const ObservationModel& model);

/// Mean of every observed value of one coordinate (marginal and joint).
/// Throws Error{MissingStratum} if the coordinate was never observed.
Estimate sample_mean(const CollectedData& data, Axis axis);

/// (estimate of mu_x, estimate of mu_y).
std::pair<Estimate, Estimate> sample_mean_estimates(const CollectedData& data);

/// || Sigma^{-1} sum_i (x_i - mu) ||_2 where mu = model.mean() is the
/// candidate estimate; this is the norm of the log-likelihood gradient.
/// Rows of `samples` are observations. Throws Error{SingularCovariance}.
double mle_gradient_check(const Eigen::MatrixXd& samples, const MultivariateModel& model);

}  // namespace collab
