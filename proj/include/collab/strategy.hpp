#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collab/fisher.hpp"
#include "collab/model.hpp"

namespace collab {

enum class Setting { Decentralized, Centralized };

std::string_view to_string(Task task);
std::string_view to_string(Setting setting);
std::string_view to_string(Target target);

/// Per-slot resource budgets. Observing costs 1 unit, each transmission or
/// reception costs alpha. Budgets may be +infinity.
struct ResourceBudget {
  double alpha = 0.0;
  double e1 = 0.0;
  std::optional<double> e2;
};

struct Scenario {
  Task task = Task::T1;
  Setting setting = Setting::Decentralized;
  ResourceBudget budget;
  Target target = Target::MuY;
};

/// Throws Error{InvalidScenario} on negative budgets or when e2 is present
/// for a decentralized scenario (or absent for a centralized one).
void check_scenario(const Scenario& scenario);

enum class Actor { SensorX, SensorY, DataCenter };

std::string_view to_string(Actor actor);

/// What a row of the constraint set represents.
enum class ConstraintKind { Budget, Simplex, NonNegative, Pinned };

/// coeffs . (p_x, p_y, p_xy) <= bound.
struct LinearConstraint {
  std::array<double, 3> coeffs{};
  double bound = 0.0;
  ConstraintKind kind = ConstraintKind::Budget;
  std::optional<Actor> actor;  // set for Budget rows
  std::string label;

  double lhs(const SamplingPolicy& p) const noexcept {
    return coeffs[0] * p.p_x + coeffs[1] * p.p_y + coeffs[2] * p.p_xy;
  }
  double slack(const SamplingPolicy& p) const noexcept { return bound - lhs(p); }
};

struct LinearConstraintSet {
  std::vector<LinearConstraint> rows;

  bool satisfied(const SamplingPolicy& p, double tol = 1e-9) const noexcept;
  /// Appends p_<component> == value as a pair of inequalities.
  void pin(int component, double value);
};

struct ConstraintOptions {
  /// Impose p_x = 0 for decentralized T1/T2. Disabling it lets the planner
  /// show that marginal X observations are never worth buying.
  bool pin_px_for_single_mean = true;
};

/// The budget polytope for a scenario, including the simplex and
/// non-negativity rows. Budget rows with an infinite bound are kept (they
/// never bind).
LinearConstraintSet constraints_for(const Scenario& scenario, ConstraintOptions options = {});

/// Critical |rho| above which joint observations should be prioritized.
/// Decentralized: sqrt(alpha / (alpha + 1)). Centralized (data-center budget
/// binding): a joint slot costs the data center twice a marginal one, which is
/// the decentralized rule at alpha = 1, i.e. sqrt(2)/2.
double joint_priority_threshold(double alpha, Setting setting);

enum class PlanMethod { ClosedForm, VertexEnum, GridRefine };

std::string_view to_string(PlanMethod method);

struct PlanResult {
  SamplingPolicy policy;
  double objective_value = 0.0;  // minimized CRB for the target parameter
  PlanMethod method = PlanMethod::ClosedForm;
  bool tie = false;
};

/// Piecewise optimum for decentralized T1/T2 (learner at S_y).
///   rho^2 < a/(a+1), E1 < 1        : p_xy = 0,           p_y = E1
///   rho^2 < a/(a+1), 1 <= E1 < a+1 : p_xy = (E1 - 1)/a,  p_y = 1 - p_xy
///   rho^2 > a/(a+1), E1 < a+1      : p_xy = E1 / (a+1),  p_y = 0
///   E1 >= a+1                      : p_xy = 1,           p_y = 0
/// At rho^2 == a/(a+1) (within 1e-12) every point between the two strategies
/// is optimal; the one with fewer joint slots is returned and `tie` is set.
PlanResult plan_t1_closed_form(double alpha, double e1, const ObservationModel& model);

/// Maximizes a linear objective c . p over a constraint set by enumerating
/// all vertices (intersections of three boundary planes). Ties within relative
/// 1e-12 prefer the smallest p_xy, then p_x, then p_y. Throws
/// Error{InfeasibleScenario} when no vertex is feasible.
struct VertexOptimum {
  SamplingPolicy policy;
  double value = 0.0;
  bool tie = false;
};
VertexOptimum maximize_linear(const LinearConstraintSet& constraints, const std::array<double, 3>& objective);

/// T1/T2 planner: maximizes info_t1 over constraints_for(scenario) exactly.
PlanResult plan_linear(const Scenario& scenario, const ObservationModel& model, ConstraintOptions options = {});

/// Coarse-to-fine grid minimization of crb_t3 for the scenario's target over
/// an arbitrary constraint set.
struct GridOptions {
  double coarse_step = 0.01;
  int refine_rounds = 3;
  double shrink = 10.0;
  int refine_half_width = 10;  // points each side of the incumbent per round
};
PlanResult minimize_crb_t3(const LinearConstraintSet& constraints, const ObservationModel& model, Target target,
                           GridOptions options = {});

/// T3 planner. Throws Error{SingularEverywhere} when the target's bound is
/// infinite over the whole feasible region.
PlanResult plan_t3(const Scenario& scenario, const ObservationModel& model, GridOptions options = {});

/// Dispatches to the closed form (decentralized T1/T2), vertex enumeration
/// (centralized T1/T2) or the grid planner (T3).
PlanResult plan(const Scenario& scenario, const ObservationModel& model);

/// CRB of the scenario's target parameter under `policy`.
double target_crb(const Scenario& scenario, const SamplingPolicy& policy, const ObservationModel& model);

}  // namespace collab
