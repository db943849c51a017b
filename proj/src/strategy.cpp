#include "collab/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "collab/error.hpp"

namespace collab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nearly_equal(double a, double b, double rel) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Lexicographic order used to break ties: fewer joint slots first.
bool lex_less(const SamplingPolicy& a, const SamplingPolicy& b) {
  if (a.p_xy != b.p_xy) return a.p_xy < b.p_xy;
  if (a.p_x != b.p_x) return a.p_x < b.p_x;
  return a.p_y < b.p_y;
}

double linf(const SamplingPolicy& a, const SamplingPolicy& b) {
  return std::max({std::abs(a.p_x - b.p_x), std::abs(a.p_y - b.p_y), std::abs(a.p_xy - b.p_xy)});
}

double& component(SamplingPolicy& p, int i) { return i == 0 ? p.p_x : (i == 1 ? p.p_y : p.p_xy); }

LinearConstraint budget_row(std::array<double, 3> c, double bound, Actor actor, std::string label) {
  return {c, bound, ConstraintKind::Budget, actor, std::move(label)};
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::T1: return "t1";
    case Task::T2: return "t2";
    case Task::T3: return "t3";
  }
  return "?";
}

std::string_view to_string(Setting setting) {
  return setting == Setting::Decentralized ? "decentralized" : "centralized";
}

std::string_view to_string(Target target) { return target == Target::MuX ? "mu-x" : "mu-y"; }

std::string_view to_string(Actor actor) {
  switch (actor) {
    case Actor::SensorX: return "S_x";
    case Actor::SensorY: return "S_y";
    case Actor::DataCenter: return "DC";
  }
  return "?";
}

std::string_view to_string(PlanMethod method) {
  switch (method) {
    case PlanMethod::ClosedForm: return "ClosedForm";
    case PlanMethod::VertexEnum: return "VertexEnum";
    case PlanMethod::GridRefine: return "GridRefine";
  }
  return "?";
}

void check_scenario(const Scenario& s) {
  const auto& b = s.budget;
  if (!(b.alpha >= 0.0) || std::isinf(b.alpha)) throw Error(ErrorCode::InvalidScenario, "alpha must be finite and >= 0");
  if (!(b.e1 >= 0.0)) throw Error(ErrorCode::InvalidScenario, "e1 must be >= 0");
  if (b.e2 && !(*b.e2 >= 0.0)) throw Error(ErrorCode::InvalidScenario, "e2 must be >= 0");
  if (s.setting == Setting::Centralized && !b.e2)
    throw Error(ErrorCode::InvalidScenario, "centralized scenarios need a data-center budget e2");
  if (s.setting == Setting::Decentralized && b.e2)
    throw Error(ErrorCode::InvalidScenario, "e2 only applies to the centralized setting");
  if (s.task != Task::T3 && s.target != Target::MuY)
    throw Error(ErrorCode::InvalidScenario, "single-mean tasks estimate mu_y");
}

bool LinearConstraintSet::satisfied(const SamplingPolicy& p, double tol) const noexcept {
  return std::all_of(rows.begin(), rows.end(), [&](const LinearConstraint& r) { return r.lhs(p) <= r.bound + tol; });
}

void LinearConstraintSet::pin(int i, double value) {
  std::array<double, 3> up{};
  std::array<double, 3> down{};
  up[i] = 1.0;
  down[i] = -1.0;
  const std::string name = i == 0 ? "p_x" : (i == 1 ? "p_y" : "p_xy");
  rows.push_back({up, value, ConstraintKind::Pinned, std::nullopt, name + " pinned"});
  rows.push_back({down, -value, ConstraintKind::Pinned, std::nullopt, name + " pinned"});
}

LinearConstraintSet constraints_for(const Scenario& scenario, ConstraintOptions options) {
  check_scenario(scenario);
  const double a = scenario.budget.alpha;
  const double e1 = scenario.budget.e1;
  LinearConstraintSet set;
  auto& rows = set.rows;
  rows.push_back({{-1, 0, 0}, 0.0, ConstraintKind::NonNegative, std::nullopt, "p_x >= 0"});
  rows.push_back({{0, -1, 0}, 0.0, ConstraintKind::NonNegative, std::nullopt, "p_y >= 0"});
  rows.push_back({{0, 0, -1}, 0.0, ConstraintKind::NonNegative, std::nullopt, "p_xy >= 0"});
  rows.push_back({{1, 1, 1}, 1.0, ConstraintKind::Simplex, std::nullopt, "p_x + p_y + p_xy <= 1"});

  if (scenario.setting == Setting::Decentralized) {
    const double joint = scenario.task == Task::T3 ? 2.0 * a + 1.0 : a + 1.0;
    rows.push_back(budget_row({1, 0, joint}, e1, Actor::SensorX, "S_x budget"));
    rows.push_back(budget_row({0, 1, joint}, e1, Actor::SensorY, "S_y budget"));
    if (scenario.task != Task::T3 && options.pin_px_for_single_mean)
      rows.push_back({{1, 0, 0}, 0.0, ConstraintKind::Pinned, std::nullopt, "p_x = 0"});
  } else {
    rows.push_back(budget_row({a + 1, 0, a + 1}, e1, Actor::SensorX, "S_x budget"));
    rows.push_back(budget_row({0, a + 1, a + 1}, e1, Actor::SensorY, "S_y budget"));
    rows.push_back(budget_row({a, a, 2 * a}, *scenario.budget.e2, Actor::DataCenter, "DC budget"));
  }
  return set;
}

double joint_priority_threshold(double alpha, Setting setting) {
  if (!(alpha >= 0.0)) throw Error(ErrorCode::InvalidScenario, "alpha must be >= 0");
  if (setting == Setting::Centralized) return joint_priority_threshold(1.0, Setting::Decentralized);
  return std::sqrt(alpha / (alpha + 1.0));
}

PlanResult plan_t1_closed_form(double alpha, double e1, const ObservationModel& model) {
  if (!(alpha >= 0.0) || !(e1 >= 0.0)) throw Error(ErrorCode::InvalidScenario, "alpha and e1 must be >= 0");
  const double r2 = model.rho() * model.rho();
  const double critical = alpha / (alpha + 1.0);
  const bool at_threshold = std::abs(r2 - critical) <= 1e-12;

  PlanResult out;
  out.method = PlanMethod::ClosedForm;
  if (e1 >= alpha + 1.0) {
    out.policy = {0.0, 0.0, 1.0};
    // Uncorrelated: marginal and joint slots carry equal information.
    out.tie = r2 <= 1e-12;
  } else if (r2 > critical && !at_threshold) {
    out.policy = {0.0, 0.0, e1 / (alpha + 1.0)};
  } else {
    // Strategy 1; at the threshold this is the tied optimum with fewest joint slots.
    const double p_xy = e1 < 1.0 ? 0.0 : (e1 - 1.0) / alpha;
    out.policy = {0.0, std::min(e1, 1.0) - p_xy, p_xy};
    out.tie = at_threshold;
  }
  if (out.policy.p_y == 0.0 && out.policy.p_xy == 0.0)
    throw Error(ErrorCode::SingularEverywhere, "zero budget yields no information about mu_y");
  out.objective_value = crb_t1(out.policy, model);
  return out;
}

VertexOptimum maximize_linear(const LinearConstraintSet& constraints, const std::array<double, 3>& objective) {
  std::vector<const LinearConstraint*> planes;
  for (const auto& r : constraints.rows)
    if (std::isfinite(r.bound)) planes.push_back(&r);

  std::vector<std::pair<SamplingPolicy, double>> vertices;
  const std::size_t n = planes.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const auto& a = planes[i]->coeffs;
        const auto& b = planes[j]->coeffs;
        const auto& c = planes[k]->coeffs;
        // Cramer's rule on the 3x3 system with rows a, b, c.
        auto det3 = [](const std::array<double, 3>& r0, const std::array<double, 3>& r1,
                       const std::array<double, 3>& r2) {
          return r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0]) +
                 r0[2] * (r1[0] * r2[1] - r1[1] * r2[0]);
        };
        const double d = det3(a, b, c);
        if (std::abs(d) < 1e-12) continue;
        const std::array<double, 3> rhs{planes[i]->bound, planes[j]->bound, planes[k]->bound};
        SamplingPolicy p;
        for (int col = 0; col < 3; ++col) {
          auto a2 = a, b2 = b, c2 = c;
          a2[col] = rhs[0];
          b2[col] = rhs[1];
          c2[col] = rhs[2];
          double v = det3(a2, b2, c2) / d;
          if (std::abs(v) < 1e-15) v = 0.0;
          component(p, col) = v;
        }
        if (!constraints.satisfied(p, 1e-9)) continue;
        const double value = objective[0] * p.p_x + objective[1] * p.p_y + objective[2] * p.p_xy;
        vertices.emplace_back(p, value);
      }

  if (vertices.empty()) throw Error(ErrorCode::InfeasibleScenario, "constraint set has no feasible vertex");

  double best = -kInf;
  for (const auto& [p, v] : vertices) best = std::max(best, v);

  VertexOptimum out;
  bool have = false;
  for (const auto& [p, v] : vertices) {
    if (!nearly_equal(v, best, 1e-12)) continue;
    if (!have) {
      out.policy = p;
      out.value = v;
      have = true;
      continue;
    }
    if (linf(p, out.policy) > 1e-9) out.tie = true;
    if (lex_less(p, out.policy)) {
      out.policy = p;
      out.value = v;
    }
  }
  return out;
}

PlanResult plan_linear(const Scenario& scenario, const ObservationModel& model, ConstraintOptions options) {
  if (scenario.task == Task::T3) throw Error(ErrorCode::InvalidScenario, "plan_linear handles T1/T2 only");
  const auto constraints = constraints_for(scenario, options);
  const double one_minus_r2 = 1.0 - model.rho() * model.rho();
  const std::array<double, 3> info{0.0, 1.0 / model.var_y(), 1.0 / (one_minus_r2 * model.var_y())};
  const VertexOptimum opt = maximize_linear(constraints, info);
  if (!(opt.value > 0.0)) throw Error(ErrorCode::SingularEverywhere, "no feasible policy observes Y");

  PlanResult out;
  out.policy = opt.policy;
  out.method = PlanMethod::VertexEnum;
  out.tie = opt.tie;
  out.objective_value = crb_t1(out.policy, model);
  return out;
}

PlanResult minimize_crb_t3(const LinearConstraintSet& constraints, const ObservationModel& model, Target target,
                           GridOptions options) {
  // Per-component box from single-variable rows (non-negativity, pins, ...).
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
  for (const auto& r : constraints.rows) {
    int nz = -1;
    int count = 0;
    for (int i = 0; i < 3; ++i)
      if (r.coeffs[i] != 0.0) {
        nz = i;
        ++count;
      }
    if (count != 1) continue;
    const double v = r.bound / r.coeffs[nz];
    if (r.coeffs[nz] > 0) hi[nz] = std::min(hi[nz], v);
    else lo[nz] = std::max(lo[nz], v);
  }
  for (int i = 0; i < 3; ++i)
    if (lo[i] > hi[i] + 1e-12) throw Error(ErrorCode::InfeasibleScenario, "empty box");

  auto evaluate = [&](const SamplingPolicy& p) {
    if (!constraints.satisfied(p, 1e-12)) return kInf;
    try {
      return crb_t3(p, model, target);
    } catch (const Error&) {
      return kInf;
    }
  };

  SamplingPolicy best_p;
  double best_v = kInf;
  auto consider = [&](const SamplingPolicy& p, double v) {
    if (v == kInf) return;
    if (best_v == kInf || (v < best_v && !nearly_equal(v, best_v, 1e-12)) ||
        (nearly_equal(v, best_v, 1e-12) && lex_less(p, best_p))) {
      best_v = v;
      best_p = p;
    }
  };

  auto axis_values = [&](int i, double center, double step, int half) {
    std::vector<double> vals;
    if (hi[i] - lo[i] <= 1e-12) {
      vals.push_back(lo[i]);
      return vals;
    }
    if (half < 0) {
      const auto n = static_cast<long>(std::floor((hi[i] - lo[i]) / step + 1e-9));
      for (long k = 0; k <= n; ++k) vals.push_back(lo[i] + static_cast<double>(k) * step);
      if (hi[i] - vals.back() > 1e-12) vals.push_back(hi[i]);
    } else {
      for (int k = -half; k <= half; ++k) {
        const double v = center + k * step;
        if (v >= lo[i] - 1e-15 && v <= hi[i] + 1e-15) vals.push_back(std::clamp(v, lo[i], hi[i]));
      }
    }
    return vals;
  };

  // Coarse pass over the whole box.
  std::vector<std::pair<SamplingPolicy, double>> coarse;
  {
    const auto xs = axis_values(0, 0, options.coarse_step, -1);
    const auto ys = axis_values(1, 0, options.coarse_step, -1);
    const auto zs = axis_values(2, 0, options.coarse_step, -1);
    for (double x : xs)
      for (double y : ys) {
        if (x + y > 1.0 + 1e-12) break;
        for (double z : zs) {
          if (x + y + z > 1.0 + 1e-12) break;
          const SamplingPolicy p{x, y, z};
          const double v = evaluate(p);
          if (v == kInf) continue;
          coarse.emplace_back(p, v);
          consider(p, v);
        }
      }
  }
  if (best_v == kInf) throw Error(ErrorCode::SingularEverywhere, "target mean is unidentified on the whole feasible region");

  double step = options.coarse_step;
  for (int round = 0; round < options.refine_rounds; ++round) {
    step /= options.shrink;
    const SamplingPolicy c = best_p;
    const auto xs = axis_values(0, c.p_x, step, options.refine_half_width);
    const auto ys = axis_values(1, c.p_y, step, options.refine_half_width);
    const auto zs = axis_values(2, c.p_xy, step, options.refine_half_width);
    for (double x : xs)
      for (double y : ys)
        for (double z : zs) {
          const SamplingPolicy p{x, y, z};
          consider(p, evaluate(p));
        }
  }

  PlanResult out;
  out.policy = best_p;
  out.objective_value = best_v;
  out.method = PlanMethod::GridRefine;
  for (const auto& [p, v] : coarse)
    if (v <= best_v * (1.0 + 1e-9) && linf(p, best_p) >= 2.0 * options.coarse_step - 1e-12) {
      out.tie = true;
      break;
    }
  return out;
}

PlanResult plan_t3(const Scenario& scenario, const ObservationModel& model, GridOptions options) {
  if (scenario.task != Task::T3) throw Error(ErrorCode::InvalidScenario, "plan_t3 handles T3 only");
  const auto constraints = constraints_for(scenario);
  PlanResult out = minimize_crb_t3(constraints, model, scenario.target, options);
  if (!constraints.satisfied(out.policy, 1e-9))
    throw Error(ErrorCode::InfeasibleScenario, "grid optimum violates the constraint set");
  return out;
}

PlanResult plan(const Scenario& scenario, const ObservationModel& model) {
  check_scenario(scenario);
  if (scenario.task == Task::T3) return plan_t3(scenario, model);
  if (scenario.setting == Setting::Decentralized)
    return plan_t1_closed_form(scenario.budget.alpha, scenario.budget.e1, model);
  return plan_linear(scenario, model);
}

double target_crb(const Scenario& scenario, const SamplingPolicy& policy, const ObservationModel& model) {
  if (scenario.task == Task::T3) return crb_t3(policy, model, scenario.target);
  return crb_t1(policy, model);
}

}  // namespace collab
