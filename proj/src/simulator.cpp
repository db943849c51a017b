#include "collab/simulator.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "collab/error.hpp"
#include "collab/format.hpp"

namespace collab {

namespace {

constexpr int kSensorX = static_cast<int>(Actor::SensorX);
constexpr int kSensorY = static_cast<int>(Actor::SensorY);
constexpr int kDataCenter = static_cast<int>(Actor::DataCenter);

constexpr int idx(ObservationKind k) { return static_cast<int>(k); }

struct ReplicationResult {
  std::array<std::uint64_t, 4> counts{};
  std::optional<double> estimate;
};

double apply_estimator(const SimulationConfig& cfg, const CollectedData& data) {
  switch (cfg.estimator) {
    case EstimatorKind::Delta1: return delta1(data, cfg.model).value;
    case EstimatorKind::Delta2: return delta2(data, cfg.model).value;
    case EstimatorKind::SampleMean:
      return sample_mean(data, cfg.scenario.target == Target::MuX ? Axis::X : Axis::Y).value;
  }
  return 0.0;
}

ReplicationResult run_replication(const SimulationConfig& cfg, std::uint64_t r) {
  Rng rng = make_rng(cfg.master_seed, r);
  CollectedData data;
  ReplicationResult out;
  for (std::uint64_t k = 0; k < cfg.slots; ++k) {
    const Observation obs = draw_observation(cfg.model, cfg.policy, rng, k);
    ++out.counts[idx(obs.kind)];
    data.add(obs);
  }
  try {
    out.estimate = apply_estimator(cfg, data);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MissingStratum) throw;
  }
  return out;
}

std::optional<double> analytic_variance(const SimulationConfig& cfg) {
  const auto& p = cfg.policy;
  const auto& m = cfg.model;
  switch (cfg.estimator) {
    case EstimatorKind::Delta1:
      if (p.p_y > 0.0 && p.p_xy > 0.0) return var_delta1(p, m);
      return std::nullopt;
    case EstimatorKind::Delta2:
      if (p.p_xy > 0.0) return (1.0 - m.rho() * m.rho()) * m.var_y() / p.p_xy;
      return std::nullopt;
    case EstimatorKind::SampleMean: {
      const bool x = cfg.scenario.target == Target::MuX;
      const double share = (x ? p.p_x : p.p_y) + p.p_xy;
      if (share > 0.0) return (x ? m.var_x() : m.var_y()) / share;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

CostTable cost_table(const Scenario& scenario) {
  const double a = scenario.budget.alpha;
  CostTable t{};
  auto& mx = t[idx(ObservationKind::MarginalX)];
  auto& my = t[idx(ObservationKind::MarginalY)];
  auto& jt = t[idx(ObservationKind::Joint)];
  if (scenario.setting == Setting::Decentralized) {
    mx[kSensorX] = {1.0, 0.0, 0.0};
    my[kSensorY] = {1.0, 0.0, 0.0};
    if (scenario.task == Task::T3) {
      jt[kSensorX] = {1.0, a, a};
      jt[kSensorY] = {1.0, a, a};
    } else {
      jt[kSensorX] = {1.0, a, 0.0};
      jt[kSensorY] = {1.0, 0.0, a};
    }
  } else {
    mx[kSensorX] = {1.0, a, 0.0};
    mx[kDataCenter] = {0.0, 0.0, a};
    my[kSensorY] = {1.0, a, 0.0};
    my[kDataCenter] = {0.0, 0.0, a};
    jt[kSensorX] = {1.0, a, 0.0};
    jt[kSensorY] = {1.0, a, 0.0};
    jt[kDataCenter] = {0.0, 0.0, 2.0 * a};
  }
  return t;
}

SimulationReport run(const SimulationConfig& config) {
  check_scenario(config.scenario);
  check_policy(config.policy);
  if (config.slots == 0 || config.replications == 0)
    throw Error(ErrorCode::InvalidConfig, "slots and replications must be >= 1");
  if (config.enforce_feasibility && !constraints_for(config.scenario).satisfied(config.policy, 1e-9))
    throw Error(ErrorCode::InfeasiblePolicy, "policy violates the scenario's resource constraints");

  const std::uint64_t reps = config.replications;
  std::vector<ReplicationResult> results(reps);
  const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(reps)));
  if (workers == 1) {
    for (std::uint64_t r = 0; r < reps; ++r) results[r] = run_replication(config, r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t r = w; r < reps; r += workers) results[r] = run_replication(config, r);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SimulationReport rep(config);
  rep.true_value = config.scenario.target == Target::MuX ? config.model.mu_x() : config.model.mu_y();

  // Ordered reduction so the result does not depend on the worker count.
  double sum = 0.0;
  std::uint64_t used = 0;
  for (const auto& r : results) {
    for (int k = 0; k < 4; ++k) rep.ledger.kind_counts[k] += r.counts[k];
    if (r.estimate) {
      sum += *r.estimate;
      ++used;
    }
  }
  rep.replications_used = used;
  rep.replications_excluded = reps - used;
  if (used == 0) throw Error(ErrorCode::MissingStratum, "every replication lacked a required stratum");

  const double n = double(used);
  const double mean = sum / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (const auto& r : results)
    if (r.estimate) {
      const double d = *r.estimate - mean;
      m2 += d * d;
      m4 += d * d * d * d;
    }
  const double var = used > 1 ? m2 / (n - 1.0) : 0.0;
  const double K = double(config.slots);
  rep.mean_estimate = mean;
  rep.estimate_std_error = std::sqrt(var / n);
  rep.empirical_variance_per_slot = K * var;
  const double pop_var = m2 / n;
  rep.variance_std_error = K * std::sqrt(std::max(0.0, m4 / n - pop_var * pop_var) / n);

  try {
    rep.analytic_crb = target_crb(config.scenario, config.policy, config.model);
  } catch (const Error&) {
    rep.analytic_crb = std::numeric_limits<double>::infinity();
  }
  rep.analytic_estimator_variance = analytic_variance(config);

  const CostTable table = cost_table(config.scenario);
  std::uint64_t total_slots = 0;
  for (auto c : rep.ledger.kind_counts) total_slots += c;
  rep.ledger.slots = total_slots;
  for (int a = 0; a < 3; ++a) {
    ActorCost acc;
    for (int k = 0; k < 4; ++k) {
      const double c = double(rep.ledger.kind_counts[k]);
      acc.observation += c * table[k][a].observation;
      acc.transmit += c * table[k][a].transmit;
      acc.receive += c * table[k][a].receive;
    }
    const double s = double(total_slots);
    rep.ledger.per_slot[a] = {acc.observation / s, acc.transmit / s, acc.receive / s};
  }
  return rep;
}

void write_trace(const SimulationConfig& config, std::uint64_t replication, std::ostream& out) {
  check_policy(config.policy);
  const CostTable table = cost_table(config.scenario);
  Rng rng = make_rng(config.master_seed, replication);
  out << "slot,kind,x,y,cost_sx,cost_sy,cost_dc\n";
  for (std::uint64_t k = 0; k < config.slots; ++k) {
    const Observation obs = draw_observation(config.model, config.policy, rng, k);
    const auto& cost = table[idx(obs.kind)];
    out << k << ',' << to_string(obs.kind) << ',' << (obs.x ? format_real(*obs.x) : "") << ','
        << (obs.y ? format_real(*obs.y) : "") << ',' << format_real(cost[kSensorX].total()) << ','
        << format_real(cost[kSensorY].total()) << ',' << format_real(cost[kDataCenter].total()) << '\n';
  }
}

AuditResult audit_resources(const SimulationReport& report, const Scenario& scenario) {
  const CostTable table = cost_table(scenario);
  const auto& counts = report.ledger.kind_counts;
  const double slots = double(report.ledger.slots);
  AuditResult out;
  for (const auto& row : constraints_for(scenario).rows) {
    if (row.kind != ConstraintKind::Budget || !row.actor) continue;
    const int a = static_cast<int>(*row.actor);
    double m1 = 0.0;
    double m2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double f = slots > 0 ? double(counts[k]) / slots : 0.0;
      const double c = table[k][a].total();
      m1 += f * c;
      m2 += f * c * c;
    }
    ConstraintAudit audit;
    audit.label = row.label;
    audit.actor = *row.actor;
    audit.bound = row.bound;
    audit.empirical_cost = m1;
    audit.expected_cost = row.lhs(report.config.policy);
    audit.slack = row.bound - m1;
    audit.std_error = slots > 0 ? std::sqrt(std::max(0.0, m2 - m1 * m1) / slots) : 0.0;
    audit.pass = m1 <= row.bound + 3.0 * audit.std_error + 1e-12;
    out.pass = out.pass && audit.pass;
    out.constraints.push_back(audit);
  }
  return out;
}

}  // namespace collab
