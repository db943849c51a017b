#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "collab/estimators.hpp"
#include "collab/fisher.hpp"
#include "collab/model.hpp"
#include "collab/strategy.hpp"

namespace collab {

struct SimulationConfig {
  Scenario scenario;
  ObservationModel model;
  SamplingPolicy policy;
  EstimatorKind estimator = EstimatorKind::Delta1;
  std::uint64_t slots = 1000;  // K, calendar slots per replication
  std::uint64_t replications = 1000;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  /// Reject policies outside the scenario's budget polytope before running.
  bool enforce_feasibility = true;
};

/// Resource units charged to one actor.
struct ActorCost {
  double observation = 0.0;
  double transmit = 0.0;
  double receive = 0.0;

  double total() const noexcept { return observation + transmit + receive; }
};

/// Per-slot charge for each actor, indexed by ObservationKind.
using CostTable = std::array<std::array<ActorCost, 3>, 4>;

/// Accounting rules:
///   decentralized T1/T2: marginal Y -> S_y observes (1); joint -> S_y observes
///     and receives (1 + a), S_x observes and transmits (1 + a); marginal X ->
///     S_x observes (1).
///   decentralized T3: joint -> each sensor observes, transmits and receives
///     (1 + 2a); marginal -> owning sensor observes (1).
///   centralized: each observation costs its sensor 1 + a (observe, transmit)
///     and the data center a to receive.
/// Idle slots cost nothing.
CostTable cost_table(const Scenario& scenario);

struct ResourceLedger {
  std::array<ActorCost, 3> per_slot{};  // averaged over all slots of all replications
  std::array<std::uint64_t, 4> kind_counts{};  // indexed by ObservationKind
  std::uint64_t slots = 0;

  const ActorCost& of(Actor a) const { return per_slot[static_cast<int>(a)]; }
};

struct SimulationReport {
  explicit SimulationReport(SimulationConfig c) : config(std::move(c)) {}

  SimulationConfig config;
  double mean_estimate = 0.0;
  double estimate_std_error = 0.0;  // std error of mean_estimate
  double empirical_variance_per_slot = 0.0;  // K * sample variance across replications
  double variance_std_error = 0.0;  // std error of empirical_variance_per_slot
  double true_value = 0.0;
  double analytic_crb = 0.0;
  std::optional<double> analytic_estimator_variance;
  ResourceLedger ledger;
  std::uint64_t replications_used = 0;
  std::uint64_t replications_excluded = 0;
  std::string generator{kRngName};
};

/// Runs all replications. Replication r draws from make_rng(master_seed, r),
/// so the report is identical for every worker count. Replications where the
/// estimator lacks a required stratum are excluded and counted.
/// Throws Error{InfeasiblePolicy} for policies outside the budget polytope and
/// Error{MissingStratum} if every replication was excluded.
SimulationReport run(const SimulationConfig& config);

/// Writes one replication's slots as CSV: slot,kind,x,y,cost_sx,cost_sy,cost_dc.
void write_trace(const SimulationConfig& config, std::uint64_t replication, std::ostream& out);

struct ConstraintAudit {
  std::string label;
  Actor actor = Actor::SensorY;
  double bound = 0.0;
  double empirical_cost = 0.0;  // per-slot average
  double expected_cost = 0.0;   // constraint LHS at the configured policy
  double slack = 0.0;           // bound - empirical_cost
  double std_error = 0.0;
  bool pass = false;
};

struct AuditResult {
  bool pass = true;
  std::vector<ConstraintAudit> constraints;
};

/// Checks each budget row of constraints_for(scenario) against the ledger:
/// passes when empirical cost <= bound + 3 standard errors of the slot mix.
AuditResult audit_resources(const SimulationReport& report, const Scenario& scenario);

}  // namespace collab
