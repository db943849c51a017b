#pragma once

#include <cstdint>

#include "collab/model.hpp"
#include "collab/rng.hpp"

namespace collab {

/// 2x2 matrix, used for Fisher information matrices and their inverses.
struct Matrix2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;

  static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Matrix2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

  double det() const noexcept { return a11 * a22 - a12 * a21; }
  double trace() const noexcept { return a11 + a22; }

  friend Matrix2 operator*(const Matrix2& l, const Matrix2& r) {
    return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
            l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
  }
  friend Matrix2 operator+(const Matrix2& l, const Matrix2& r) {
    return {l.a11 + r.a11, l.a12 + r.a12, l.a21 + r.a21, l.a22 + r.a22};
  }
  friend Matrix2 operator*(double s, const Matrix2& m) { return {s * m.a11, s * m.a12, s * m.a21, s * m.a22}; }
  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// Per-slot probabilities of a marginal-X, marginal-Y or joint observation.
/// The remainder 1 - p_x - p_y - p_xy is the idle probability.
struct SamplingPolicy {
  double p_x = 0.0;
  double p_y = 0.0;
  double p_xy = 0.0;

  double p_idle() const noexcept { return 1.0 - p_x - p_y - p_xy; }
  friend bool operator==(const SamplingPolicy&, const SamplingPolicy&) = default;
};

/// Throws Error{InvalidPolicy} unless every component lies in [0, 1] and the
/// sum is at most 1 + 1e-12.
void check_policy(const SamplingPolicy& policy);

/// Draws one slot: the kind from Categorical(p_x, p_y, p_xy, idle), then the
/// observation itself from the model.
Observation draw_observation(const ObservationModel& model, const SamplingPolicy& policy, Rng& rng,
                             std::uint64_t slot);

enum class Task { T1, T2, T3 };
enum class Target { MuX, MuY };

/// Fisher information about mu_y per slot with rho known:
/// p_y / var_y + p_xy / ((1 - rho^2) var_y). Marginal X slots carry none.
double info_t1(const SamplingPolicy& policy, const ObservationModel& model);

/// Reciprocal of info_t1, written as (1 - rho^2) var_y / ((1 - rho^2) p_y + p_xy).
/// Throws Error{DegeneratePolicy} when p_y = p_xy = 0.
double crb_t1(const SamplingPolicy& policy, const ObservationModel& model);

/// FIM over (mu_y, rho) with rho unknown. Diagonal: the mean and the
/// correlation are orthogonal parameters.
Matrix2 fim_t2(const SamplingPolicy& policy, const ObservationModel& model);

/// FIM over (mu_x, mu_y) with both means unknown.
Matrix2 fim_t3(const SamplingPolicy& policy, const ObservationModel& model);

inline constexpr double kSingularDet = 1e-14;

/// Adjugate over determinant. Throws Error{SingularMatrix} when |det| <= 1e-14.
Matrix2 invert_2x2(const Matrix2& m);

/// Bound on the variance of an unbiased estimator of `target` when both means
/// are unknown: the matching diagonal entry of inverse(fim_t3).
///
/// When the FIM is diagonal (rho * p_xy == 0) the two means decouple, and the
/// bound for the target is 1 / I_tt even if the other mean is unidentified.
/// Throws Error{SingularMatrix} when the target itself is unidentified.
double crb_t3(const SamplingPolicy& policy, const ObservationModel& model, Target target);

/// Monte Carlo FIM with per-entry standard errors.
struct EmpiricalFim {
  Matrix2 value;
  Matrix2 std_error;
  std::uint64_t samples = 0;
};

/// Averages the outer product of the per-slot score over n slots. Scores are
/// central finite differences (step 1e-5) of the log-density in the task's
/// unknown parameters, so this path never touches the closed forms.
/// Parameters: T1 -> (mu_y) in a11 only; T2 -> (mu_y, rho); T3 -> (mu_x, mu_y).
EmpiricalFim empirical_fim_with_error(const ObservationModel& model, const SamplingPolicy& policy, Task task,
                                      std::uint64_t n, Rng& rng);

/// Value-only form of empirical_fim_with_error. Requires n >= 1e4.
Matrix2 empirical_fim(const ObservationModel& model, const SamplingPolicy& policy, Task task, std::uint64_t n,
                      Rng& rng);

}  // namespace collab
