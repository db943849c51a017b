#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "collab/rng.hpp"

namespace collab {

/// Largest admissible |rho|. Every bound in the library divides by 1 - rho^2.
inline constexpr double kMaxAbsRho = 1.0 - 1e-9;

/// Unvalidated five-parameter record, as read from a config file or flags.
struct ModelParams {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double var_x = 1.0;
  double var_y = 1.0;
  double rho = 0.0;
};

/// Bivariate Gaussian observation model. Only constructible through
/// validate(), so every instance satisfies var > 0 and |rho| <= kMaxAbsRho.
class ObservationModel {
 public:
  double mu_x() const noexcept { return p_.mu_x; }
  double mu_y() const noexcept { return p_.mu_y; }
  double var_x() const noexcept { return p_.var_x; }
  double var_y() const noexcept { return p_.var_y; }
  double sd_x() const noexcept { return sd_x_; }
  double sd_y() const noexcept { return sd_y_; }
  double rho() const noexcept { return p_.rho; }
  double cov_xy() const noexcept { return p_.rho * sd_x_ * sd_y_; }
  /// Regression slope of Y on X.
  double beta() const noexcept { return p_.rho * sd_y_ / sd_x_; }

  const ModelParams& params() const noexcept { return p_; }

  friend ObservationModel validate(const ModelParams& params);

 private:
  explicit ObservationModel(const ModelParams& p);

  ModelParams p_;
  double sd_x_;
  double sd_y_;
};

/// Throws Error{NonPositiveVariance | CorrelationOutOfRange}. Never clamps.
ObservationModel validate(const ModelParams& params);

enum class Axis { X, Y };

enum class ObservationKind { MarginalX, MarginalY, Joint, Idle };

std::string_view to_string(ObservationKind kind);

/// One time slot's worth of data. The factories keep kind and the present
/// coordinates consistent.
struct Observation {
  ObservationKind kind = ObservationKind::Idle;
  std::optional<double> x;
  std::optional<double> y;
  std::uint64_t slot = 0;

  static Observation marginal_x(std::uint64_t slot, double x) { return {ObservationKind::MarginalX, x, {}, slot}; }
  static Observation marginal_y(std::uint64_t slot, double y) { return {ObservationKind::MarginalY, {}, y, slot}; }
  static Observation joint(std::uint64_t slot, double x, double y) { return {ObservationKind::Joint, x, y, slot}; }
  static Observation idle(std::uint64_t slot) { return {ObservationKind::Idle, {}, {}, slot}; }

  bool consistent() const noexcept;
};

/// x = mu_x + sd_x z1,  y = mu_y + sd_y (rho z1 + sqrt(1 - rho^2) z2).
std::pair<double, double> sample_joint(const ObservationModel& model, Rng& rng);

double sample_marginal(const ObservationModel& model, Axis axis, Rng& rng);

/// k-variate Gaussian with a symmetric positive definite covariance.
class MultivariateModel {
 public:
  /// Throws Error{SingularCovariance} when the covariance is not symmetric
  /// (to 1e-12) or its Cholesky factorization fails.
  MultivariateModel(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  Eigen::Index dim() const noexcept { return mean_.size(); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }
  const Eigen::LLT<Eigen::MatrixXd>& cholesky() const noexcept { return llt_; }

  Eigen::VectorXd sample(Rng& rng) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Parses `key = value` lines ('#' starts a comment). Keys are exactly
/// mu_x, mu_y, var_x, var_y, rho; missing keys keep the defaults in `base`.
/// Unknown keys and malformed numbers throw Error{InvalidConfig}.
ModelParams read_model_params(std::istream& in, ModelParams base = {});

}  // namespace collab
