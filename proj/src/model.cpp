#include "collab/model.hpp"

#include <cmath>
#include <string>

#include "collab/error.hpp"
#include "collab/kv.hpp"

namespace collab {

ObservationModel::ObservationModel(const ModelParams& p)
    : p_(p), sd_x_(std::sqrt(p.var_x)), sd_y_(std::sqrt(p.var_y)) {}

ObservationModel validate(const ModelParams& params) {
  if (!(params.var_x > 0.0) || !std::isfinite(params.var_x))
    throw Error(ErrorCode::NonPositiveVariance, "var_x = " + std::to_string(params.var_x));
  if (!(params.var_y > 0.0) || !std::isfinite(params.var_y))
    throw Error(ErrorCode::NonPositiveVariance, "var_y = " + std::to_string(params.var_y));
  if (!(std::abs(params.rho) <= kMaxAbsRho))
    throw Error(ErrorCode::CorrelationOutOfRange, "|rho| must be <= 1 - 1e-9, got " + std::to_string(params.rho));
  if (!std::isfinite(params.mu_x) || !std::isfinite(params.mu_y))
    throw Error(ErrorCode::InvalidConfig, "means must be finite");
  return ObservationModel(params);
}

std::string_view to_string(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::MarginalX: return "x";
    case ObservationKind::MarginalY: return "y";
    case ObservationKind::Joint: return "xy";
    case ObservationKind::Idle: return "idle";
  }
  return "?";
}

bool Observation::consistent() const noexcept {
  switch (kind) {
    case ObservationKind::MarginalX: return x && !y;
    case ObservationKind::MarginalY: return !x && y;
    case ObservationKind::Joint: return x && y;
    case ObservationKind::Idle: return !x && !y;
  }
  return false;
}

std::pair<double, double> sample_joint(const ObservationModel& model, Rng& rng) {
  std::normal_distribution<double> z;
  const double z1 = z(rng);
  const double z2 = z(rng);
  const double r = model.rho();
  return {model.mu_x() + model.sd_x() * z1, model.mu_y() + model.sd_y() * (r * z1 + std::sqrt(1.0 - r * r) * z2)};
}

double sample_marginal(const ObservationModel& model, Axis axis, Rng& rng) {
  std::normal_distribution<double> z;
  return axis == Axis::X ? model.mu_x() + model.sd_x() * z(rng) : model.mu_y() + model.sd_y() * z(rng);
}

MultivariateModel::MultivariateModel(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)) {
  if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size() || mean_.size() == 0)
    throw Error(ErrorCode::SingularCovariance, "covariance must be k x k with k = dim(mean) >= 1");
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::SingularCovariance, "covariance is not symmetric");
  llt_.compute(cov_);
  if (llt_.info() != Eigen::Success) throw Error(ErrorCode::SingularCovariance, "covariance is not positive definite");
}

Eigen::VectorXd MultivariateModel::sample(Rng& rng) const {
  std::normal_distribution<double> z;
  Eigen::VectorXd u(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) u[i] = z(rng);
  return mean_ + llt_.matrixL() * u;
}

ModelParams read_model_params(std::istream& in, ModelParams base) {
  for (const auto& [key, value] : read_key_values(in)) {
    if (key == "mu_x") base.mu_x = parse_real(value, key);
    else if (key == "mu_y") base.mu_y = parse_real(value, key);
    else if (key == "var_x") base.var_x = parse_real(value, key);
    else if (key == "var_y") base.var_y = parse_real(value, key);
    else if (key == "rho") base.rho = parse_real(value, key);
    else throw Error(ErrorCode::InvalidConfig, "unknown model key '" + key + "'");
  }
  return base;
}

}  // namespace collab
