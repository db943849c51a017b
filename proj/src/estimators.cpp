#include "collab/estimators.hpp"

#include <numeric>

#include "collab/error.hpp"

namespace collab {

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

Estimate tagged(double value, EstimatorKind kind, const CollectedData& d) {
  return {value, kind, d.marginal_x.size(), d.marginal_y.size(), d.joint.size()};
}

}  // namespace

void CollectedData::add(const Observation& obs) {
  switch (obs.kind) {
    case ObservationKind::MarginalX: marginal_x.push_back(*obs.x); break;
    case ObservationKind::MarginalY: marginal_y.push_back(*obs.y); break;
    case ObservationKind::Joint: joint.emplace_back(*obs.x, *obs.y); break;
    case ObservationKind::Idle: break;
  }
}

void CollectedData::clear() {
  marginal_x.clear();
  marginal_y.clear();
  joint.clear();
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Delta1: return "delta1";
    case EstimatorKind::Delta2: return "delta2";
    case EstimatorKind::SampleMean: return "sample-mean";
  }
  return "?";
}

Estimate delta1(const CollectedData& data, const ObservationModel& model) {
  if (data.marginal_y.empty()) throw Error(ErrorCode::MissingStratum, "delta1 needs marginal Y observations");
  if (data.joint.empty()) throw Error(ErrorCode::MissingStratum, "delta1 needs joint observations");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [x, y] : data.joint) {
    sx += x;
    sy += y;
  }
  const double n = double(data.joint.size());
  const double xbar = sx / n;
  const double ybar = sy / n;
  const double ybar1 = mean_of(data.marginal_y);
  const double one_minus_r2 = 1.0 - model.rho() * model.rho();
  const double value = (one_minus_r2 * ybar1 + ybar - model.beta() * (xbar - model.mu_x())) / (1.0 + one_minus_r2);
  return tagged(value, EstimatorKind::Delta1, data);
}

double var_delta1(const SamplingPolicy& policy, const ObservationModel& model) {
  if (!(policy.p_y > 0.0) || !(policy.p_xy > 0.0))
    throw Error(ErrorCode::DegeneratePolicy, "delta1 needs p_y > 0 and p_xy > 0");
  const double one_minus_r2 = 1.0 - model.rho() * model.rho();
  const double two_minus_r2 = 1.0 + one_minus_r2;
  return one_minus_r2 * model.var_y() / (two_minus_r2 * two_minus_r2) *
         (one_minus_r2 / policy.p_y + 1.0 / policy.p_xy) * (policy.p_y + policy.p_xy);
}

Estimate delta2(const CollectedData& data, const ObservationModel& model) {
  if (data.joint.empty()) throw Error(ErrorCode::MissingStratum, "delta2 needs joint observations");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [x, y] : data.joint) {
    sx += x;
    sy += y;
  }
  const double n = double(data.joint.size());
  return tagged(sy / n - model.beta() * (sx / n - model.mu_x()), EstimatorKind::Delta2, data);
}

Estimate sample_mean(const CollectedData& data, Axis axis) {
  const auto& own = axis == Axis::X ? data.marginal_x : data.marginal_y;
  const std::size_t n = own.size() + data.joint.size();
  if (n == 0) throw Error(ErrorCode::MissingStratum, axis == Axis::X ? "no observations of X" : "no observations of Y");
  double sum = std::accumulate(own.begin(), own.end(), 0.0);
  for (const auto& [x, y] : data.joint) sum += axis == Axis::X ? x : y;
  return tagged(sum / double(n), EstimatorKind::SampleMean, data);
}

std::pair<Estimate, Estimate> sample_mean_estimates(const CollectedData& data) {
  return {sample_mean(data, Axis::X), sample_mean(data, Axis::Y)};
}

double mle_gradient_check(const Eigen::MatrixXd& samples, const MultivariateModel& model) {
  if (samples.rows() == 0) throw Error(ErrorCode::InvalidConfig, "mle_gradient_check needs n >= 1");
  if (samples.cols() != model.dim()) throw Error(ErrorCode::InvalidConfig, "sample dimension does not match model");
  if (model.cholesky().info() != Eigen::Success) throw Error(ErrorCode::SingularCovariance, "covariance not PD");
  const Eigen::VectorXd residual_sum =
      (samples.colwise().sum().transpose() - double(samples.rows()) * model.mean()).eval();
  return model.cholesky().solve(residual_sum).norm();
}

}  // namespace collab
