#include "collab/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "collab/error.hpp"

namespace collab {

void check_policy(const SamplingPolicy& p) {
  for (double v : {p.p_x, p.p_y, p.p_xy})
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(ErrorCode::InvalidPolicy, "policy components must lie in [0, 1]");
  if (p.p_x + p.p_y + p.p_xy > 1.0 + 1e-12)
    throw Error(ErrorCode::InvalidPolicy, "p_x + p_y + p_xy exceeds 1");
}

double info_t1(const SamplingPolicy& policy, const ObservationModel& model) {
  const double one_minus_r2 = 1.0 - model.rho() * model.rho();
  return policy.p_y / model.var_y() + policy.p_xy / (one_minus_r2 * model.var_y());
}

double crb_t1(const SamplingPolicy& policy, const ObservationModel& model) {
  const double one_minus_r2 = 1.0 - model.rho() * model.rho();
  const double denom = one_minus_r2 * policy.p_y + policy.p_xy;
  if (!(denom > 0.0)) throw Error(ErrorCode::DegeneratePolicy, "p_y = p_xy = 0 carries no information about mu_y");
  return one_minus_r2 * model.var_y() / denom;
}

Matrix2 fim_t2(const SamplingPolicy& policy, const ObservationModel& model) {
  const double r2 = model.rho() * model.rho();
  const double one_minus_r2 = 1.0 - r2;
  return Matrix2::diag(info_t1(policy, model), policy.p_xy * (1.0 + r2) / (one_minus_r2 * one_minus_r2));
}

Matrix2 fim_t3(const SamplingPolicy& policy, const ObservationModel& model) {
  const double one_minus_r2 = 1.0 - model.rho() * model.rho();
  const double joint = policy.p_xy / one_minus_r2;
  const double cross = -model.rho() * joint / (model.sd_x() * model.sd_y());
  return {policy.p_x / model.var_x() + joint / model.var_x(), cross, cross,
          policy.p_y / model.var_y() + joint / model.var_y()};
}

Matrix2 invert_2x2(const Matrix2& m) {
  const double det = m.det();
  if (!(std::abs(det) > kSingularDet)) throw Error(ErrorCode::SingularMatrix, "|det| = " + std::to_string(det));
  return {m.a22 / det, -m.a12 / det, -m.a21 / det, m.a11 / det};
}

double crb_t3(const SamplingPolicy& policy, const ObservationModel& model, Target target) {
  const Matrix2 fim = fim_t3(policy, model);
  const double own = target == Target::MuX ? fim.a11 : fim.a22;
  if (fim.a12 == 0.0 && fim.a21 == 0.0) {
    if (!(own > kSingularDet)) throw Error(ErrorCode::SingularMatrix, "target mean is unidentified");
    return 1.0 / own;
  }
  const Matrix2 inv = invert_2x2(fim);
  return target == Target::MuX ? inv.a11 : inv.a22;
}

namespace {

constexpr double kFdStep = 1e-5;

struct Theta {
  double mu_x;
  double mu_y;
  double rho;
};

double log_normal(double v, double mu, double var) {
  const double d = v - mu;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
}

double log_density(const Observation& obs, const Theta& t, const ObservationModel& m) {
  switch (obs.kind) {
    case ObservationKind::MarginalX: return log_normal(*obs.x, t.mu_x, m.var_x());
    case ObservationKind::MarginalY: return log_normal(*obs.y, t.mu_y, m.var_y());
    case ObservationKind::Joint: {
      const double u = (*obs.x - t.mu_x) / m.sd_x();
      const double v = (*obs.y - t.mu_y) / m.sd_y();
      const double q = 1.0 - t.rho * t.rho;
      return -std::log(2.0 * std::numbers::pi * m.sd_x() * m.sd_y() * std::sqrt(q)) -
             (u * u - 2.0 * t.rho * u * v + v * v) / (2.0 * q);
    }
    case ObservationKind::Idle: return 0.0;
  }
  return 0.0;
}

// Pointer-to-member for the i-th unknown parameter of each task.
double Theta::*param(Task task, int i) {
  switch (task) {
    case Task::T1: return &Theta::mu_y;
    case Task::T2: return i == 0 ? &Theta::mu_y : &Theta::rho;
    case Task::T3: return i == 0 ? &Theta::mu_x : &Theta::mu_y;
  }
  return &Theta::mu_y;
}

double fd_score(const Observation& obs, const Theta& base, double Theta::*field, const ObservationModel& m) {
  Theta hi = base;
  Theta lo = base;
  hi.*field += kFdStep;
  lo.*field -= kFdStep;
  return (log_density(obs, hi, m) - log_density(obs, lo, m)) / (2.0 * kFdStep);
}

}  // namespace

Observation draw_observation(const ObservationModel& model, const SamplingPolicy& p, Rng& rng, std::uint64_t slot) {
  const double u = std::generate_canonical<double, 53>(rng);
  if (u < p.p_x) return Observation::marginal_x(slot, sample_marginal(model, Axis::X, rng));
  if (u < p.p_x + p.p_y) return Observation::marginal_y(slot, sample_marginal(model, Axis::Y, rng));
  if (u < p.p_x + p.p_y + p.p_xy) {
    auto [x, y] = sample_joint(model, rng);
    return Observation::joint(slot, x, y);
  }
  return Observation::idle(slot);
}

EmpiricalFim empirical_fim_with_error(const ObservationModel& model, const SamplingPolicy& policy, Task task,
                                      std::uint64_t n, Rng& rng) {
  check_policy(policy);
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "empirical_fim needs n >= 1");
  const int dim = task == Task::T1 ? 1 : 2;
  const Theta truth{model.mu_x(), model.mu_y(), model.rho()};

  double sum[2][2] = {};
  double sum_sq[2][2] = {};
  for (std::uint64_t k = 0; k < n; ++k) {
    const Observation obs = draw_observation(model, policy, rng, k);
    double s[2] = {};
    for (int i = 0; i < dim; ++i) s[i] = fd_score(obs, truth, param(task, i), model);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        const double q = s[i] * s[j];
        sum[i][j] += q;
        sum_sq[i][j] += q * q;
      }
  }

  const double nd = static_cast<double>(n);
  auto mean = [&](int i, int j) { return sum[i][j] / nd; };
  auto se = [&](int i, int j) {
    const double m = mean(i, j);
    return std::sqrt(std::max(0.0, sum_sq[i][j] / nd - m * m) / nd);
  };
  EmpiricalFim out;
  out.samples = n;
  out.value = {mean(0, 0), mean(0, 1), mean(1, 0), mean(1, 1)};
  out.std_error = {se(0, 0), se(0, 1), se(1, 0), se(1, 1)};
  return out;
}

Matrix2 empirical_fim(const ObservationModel& model, const SamplingPolicy& policy, Task task, std::uint64_t n,
                      Rng& rng) {
  if (n < 10000) throw Error(ErrorCode::InvalidConfig, "empirical_fim needs n >= 1e4");
  return empirical_fim_with_error(model, policy, task, n, rng).value;
}

}  // namespace collab
