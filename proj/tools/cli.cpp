#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "collab/error.hpp"
#include "collab/format.hpp"
#include "collab/kv.hpp"
#include "collab/simulator.hpp"
#include "collab/strategy.hpp"

namespace collab::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Format { Csv, Jsonl };

using Cell = std::variant<double, std::string, std::int64_t, bool>;

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::logic_error("row width does not match header");
    rows_.push_back(std::move(row));
  }

  void write(std::ostream& out, Format format) const {
    if (format == Format::Csv) {
      for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
      out << '\n';
      for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
      }
      return;
    }
    for (const auto& row : rows_) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i)
        std::visit([&](const auto& v) { obj[header_[i]] = v; }, row[i]);
      out << obj.dump() << '\n';
    }
  }

 private:
  static std::string csv_cell(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return format_real(*d);
    if (auto s = std::get_if<std::string>(&c)) return *s;
    if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<bool>(c) ? "1" : "0";
  }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// Merged key/value view of --config and command-line flags.
class Fields {
 public:
  explicit Fields(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::InvalidConfig, "missing required field --" + flag(key));
    return it->second;
  }

  double real(const std::string& key) const { return parse_real(str(key), "--" + flag(key)); }
  double real_or(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

  std::uint64_t u64(const std::string& key) const {
    const std::string& s = str(key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
      throw Error(ErrorCode::InvalidConfig, "field --" + flag(key) + ": not a non-negative integer: '" + s + "'");
    return v;
  }

  static std::string flag(std::string key) {
    for (auto& c : key)
      if (c == '_') c = '-';
    return key;
  }

 private:
  std::map<std::string, std::string> values_;
};

template <typename E>
E parse_enum(const Fields& f, const std::string& key, const std::vector<std::pair<std::string, E>>& options) {
  const std::string& v = f.str(key);
  for (const auto& [name, value] : options)
    if (name == v) return value;
  std::string allowed;
  for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + name;
  throw Error(ErrorCode::InvalidConfig, "field --" + Fields::flag(key) + ": '" + v + "' is not one of {" + allowed + "}");
}

ModelParams model_params(const Fields& f, ModelParams p) {
  p.mu_x = f.real_or("mu_x", p.mu_x);
  p.mu_y = f.real_or("mu_y", p.mu_y);
  p.var_x = f.real_or("var_x", p.var_x);
  p.var_y = f.real_or("var_y", p.var_y);
  return p;
}

ObservationModel model_from(const Fields& f) {
  ModelParams p = model_params(f, {});
  p.rho = f.real("rho");
  return validate(p);
}

Task task_from(const Fields& f) { return parse_enum<Task>(f, "task", {{"t1", Task::T1}, {"t2", Task::T2}, {"t3", Task::T3}}); }

Scenario scenario_from(const Fields& f) {
  Scenario s;
  s.task = task_from(f);
  s.setting = parse_enum<Setting>(f, "setting",
                                  {{"decentralized", Setting::Decentralized}, {"centralized", Setting::Centralized}});
  s.budget.alpha = f.real("alpha");
  s.budget.e1 = f.real("e1");
  if (s.setting == Setting::Centralized) s.budget.e2 = f.real("e2");
  else if (f.has("e2")) throw Error(ErrorCode::InvalidConfig, "--e2 only applies to --setting centralized");
  s.target = f.has("target") ? parse_enum<Target>(f, "target", {{"mu-x", Target::MuX}, {"mu-y", Target::MuY}})
                             : (s.task == Task::T3 ? Target::MuX : Target::MuY);
  check_scenario(s);
  return s;
}

Format format_from(const Fields& f) {
  if (!f.has("format")) return Format::Csv;
  return parse_enum<Format>(f, "format", {{"csv", Format::Csv}, {"jsonl", Format::Jsonl}});
}

/// Writes to --out when given, otherwise to `out`.
void emit(const Fields& f, const Table& table, std::ostream& out) {
  const Format format = format_from(f);
  if (!f.has("out")) {
    table.write(out, format);
    return;
  }
  std::ofstream file(f.str("out"), std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidConfig, "cannot open --out " + f.str("out"));
  table.write(file, format);
}

std::array<double, 3> info_coefficients(const ObservationModel& m) {
  return {0.0, 1.0 / m.var_y(), 1.0 / ((1.0 - m.rho() * m.rho()) * m.var_y())};
}

struct ProfilePoint {
  bool feasible = false;
  double crb = kNaN;
  SamplingPolicy policy;
};

/// Best CRB for the scenario's target with some policy components held fixed.
ProfilePoint profile(const Scenario& s, const ObservationModel& m, const std::vector<std::pair<int, double>>& pins) {
  LinearConstraintSet cs = constraints_for(s);
  for (auto [i, v] : pins) cs.pin(i, v);
  try {
    maximize_linear(cs, {0.0, 0.0, 0.0});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InfeasibleScenario) return {};
    throw;
  }
  try {
    if (s.task == Task::T3) {
      const PlanResult r = minimize_crb_t3(cs, m, s.target);
      return {true, r.objective_value, r.policy};
    }
    const VertexOptimum v = maximize_linear(cs, info_coefficients(m));
    return {true, v.value > 0.0 ? crb_t1(v.policy, m) : kInf, v.policy};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularEverywhere) return {true, kInf, {}};
    throw;
  }
}

/// Plan, mapping an everywhere-singular scenario to an all-idle policy with
/// infinite CRB (used by sweeps that start at zero budget).
PlanResult plan_or_idle(const Scenario& s, const ObservationModel& m) {
  try {
    return plan(s, m);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularEverywhere) throw;
    PlanResult r;
    r.objective_value = kInf;
    r.method = s.task == Task::T3 ? PlanMethod::GridRefine
                                  : (s.setting == Setting::Decentralized ? PlanMethod::ClosedForm : PlanMethod::VertexEnum);
    return r;
  }
}

double snap(double v) { return std::round(v * 1e12) / 1e12; }

/// Inclusive grid start, start + step, ..., stop.
std::vector<double> grid(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !(step > 0.0) || stop < start)
    throw Error(ErrorCode::InvalidConfig, "malformed range");
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> out;
  for (long i = 0; i <= n; ++i) out.push_back(snap(start + static_cast<double>(i) * step));
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw Error(ErrorCode::InvalidConfig, "--range must be START:STOP:STEP, got '" + text + "'");
  return grid(parse_real(parts[0], "--range start"), parse_real(parts[1], "--range stop"),
              parse_real(parts[2], "--range step"));
}

// ---------------------------------------------------------------- plan

int cmd_plan(const Fields& f, std::ostream& out) {
  const ObservationModel model = model_from(f);
  const Scenario s = scenario_from(f);
  const PlanResult r = plan(s, model);
  Table t({"task", "setting", "target", "alpha", "e1", "e2", "rho", "p_x", "p_y", "p_xy", "objective", "method", "tie"});
  t.add({std::string(to_string(s.task)), std::string(to_string(s.setting)), std::string(to_string(s.target)),
         s.budget.alpha, s.budget.e1, s.budget.e2.value_or(kNaN), model.rho(), r.policy.p_x, r.policy.p_y,
         r.policy.p_xy, r.objective_value, std::string(to_string(r.method)), r.tie});
  emit(f, t, out);
  return kExitOk;
}

// ---------------------------------------------------------------- bounds

int cmd_bounds(const Fields& f, std::ostream& out) {
  const ModelParams base = [&] {
    ModelParams p = model_params(f, {});
    p.rho = f.real("rho");
    return p;
  }();
  const Scenario scenario = scenario_from(f);
  const std::string var = f.str("sweep");
  const std::vector<double> values = parse_range(f.str("range"));
  const std::map<std::string, int> policy_index{{"p_x", 0}, {"p_y", 1}, {"p_xy", 2}};

  Table t({"sweep_var", "value", "crb", "feasible"});
  for (double v : values) {
    ProfilePoint pt;
    if (auto it = policy_index.find(var); it != policy_index.end()) {
      pt = profile(scenario, validate(base), {{it->second, v}});
    } else if (var == "rho" || var == "e1" || var == "e2") {
      ModelParams p = base;
      Scenario s = scenario;
      if (var == "rho") p.rho = v;
      else if (var == "e1") s.budget.e1 = v;
      else if (!s.budget.e2) throw Error(ErrorCode::InvalidConfig, "sweeping e2 needs --setting centralized");
      else s.budget.e2 = v;
      const PlanResult r = plan_or_idle(s, validate(p));
      pt = {true, r.objective_value, r.policy};
    } else {
      throw Error(ErrorCode::InvalidConfig, "--sweep must be one of {p_y, p_x, p_xy, rho, e1, e2}, got '" + var + "'");
    }
    t.add({var, v, pt.crb, pt.feasible});
  }
  emit(f, t, out);
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

EstimatorKind default_estimator(const Scenario& s, const SamplingPolicy& p) {
  if (s.task != Task::T1) return EstimatorKind::SampleMean;
  if (p.p_y > 0.0 && p.p_xy > 0.0) return EstimatorKind::Delta1;
  if (p.p_xy > 0.0) return EstimatorKind::Delta2;
  return EstimatorKind::SampleMean;
}

int cmd_simulate(const Fields& f, std::ostream& out, std::ostream& err) {
  const ObservationModel model = model_from(f);
  const Scenario s = scenario_from(f);

  SamplingPolicy policy;
  if (f.has("p_x") || f.has("p_y") || f.has("p_xy")) {
    policy = {f.real_or("p_x", 0.0), f.real_or("p_y", 0.0), f.real_or("p_xy", 0.0)};
    check_policy(policy);
  } else {
    policy = plan(s, model).policy;
  }

  std::uint64_t seed = 0;
  if (f.has("seed")) {
    seed = f.u64("seed");
  } else {
    seed = (std::uint64_t(std::random_device{}()) << 32) ^ std::random_device{}();
    err << "seed: " << seed << '\n';
  }

  SimulationConfig cfg{s, model, policy};
  cfg.estimator = f.has("estimator") ? parse_enum<EstimatorKind>(f, "estimator",
                                                                 {{"delta1", EstimatorKind::Delta1},
                                                                  {"delta2", EstimatorKind::Delta2},
                                                                  {"sample-mean", EstimatorKind::SampleMean}})
                                     : default_estimator(s, policy);
  cfg.slots = f.has("slots") ? f.u64("slots") : 1000;
  cfg.replications = f.has("reps") ? f.u64("reps") : 1000;
  cfg.master_seed = seed;
  cfg.workers = f.has("workers") ? static_cast<unsigned>(f.u64("workers"))
                                 : std::max(1u, std::thread::hardware_concurrency());

  const SimulationReport rep = run(cfg);
  const AuditResult audit = audit_resources(rep, s);
  if (f.has("trace")) {
    std::ofstream trace(f.str("trace"), std::ios::binary);
    if (!trace) throw Error(ErrorCode::InvalidConfig, "cannot open --trace " + f.str("trace"));
    write_trace(cfg, 0, trace);
  }

  std::array<double, 3> slack{kNaN, kNaN, kNaN};
  for (const auto& c : audit.constraints) slack[static_cast<int>(c.actor)] = c.slack;
  const double est_var = rep.analytic_estimator_variance.value_or(kNaN);

  Table t({"task", "setting", "target", "estimator", "p_x", "p_y", "p_xy", "slots", "replications", "seed",
           "generator", "true_value", "mean_estimate", "estimate_std_error", "empirical_variance_per_slot",
           "variance_std_error", "analytic_crb", "analytic_estimator_variance", "ratio_to_crb",
           "ratio_to_estimator_variance", "replications_excluded", "cost_sx", "cost_sy", "cost_dc", "slack_sx",
           "slack_sy", "slack_dc", "audit_pass"});
  t.add({std::string(to_string(s.task)), std::string(to_string(s.setting)), std::string(to_string(s.target)),
         std::string(to_string(cfg.estimator)), policy.p_x, policy.p_y, policy.p_xy,
         static_cast<std::int64_t>(cfg.slots), static_cast<std::int64_t>(cfg.replications), std::to_string(seed),
         rep.generator, rep.true_value, rep.mean_estimate, rep.estimate_std_error, rep.empirical_variance_per_slot,
         rep.variance_std_error, rep.analytic_crb, est_var, rep.empirical_variance_per_slot / rep.analytic_crb,
         rep.empirical_variance_per_slot / est_var, static_cast<std::int64_t>(rep.replications_excluded),
         rep.ledger.of(Actor::SensorX).total(), rep.ledger.of(Actor::SensorY).total(),
         rep.ledger.of(Actor::DataCenter).total(), slack[0], slack[1], slack[2], audit.pass});
  emit(f, t, out);

  err << "                     analytic     empirical\n";
  err << "mean              " << format_real(rep.true_value) << "  " << format_real(rep.mean_estimate) << '\n';
  err << "K*Var vs CRB      " << format_real(rep.analytic_crb) << "  " << format_real(rep.empirical_variance_per_slot)
      << "  ratio " << format_real(rep.empirical_variance_per_slot / rep.analytic_crb) << '\n';
  if (rep.analytic_estimator_variance)
    err << "K*Var vs estimator " << format_real(est_var) << "  " << format_real(rep.empirical_variance_per_slot)
        << "  ratio " << format_real(rep.empirical_variance_per_slot / est_var) << '\n';
  for (const auto& c : audit.constraints)
    err << c.label << ": cost " << format_real(c.empirical_cost) << " bound " << format_real(c.bound) << " slack "
        << format_real(c.slack) << (c.pass ? " ok" : " FAIL") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

std::vector<double> list_or(const Fields& f, const std::string& key, std::vector<double> defaults) {
  if (f.has(key)) return {f.real(key)};
  return defaults;
}

ObservationModel figure_model(const Fields& f, double rho) {
  ModelParams p = model_params(f, {});
  p.rho = rho;
  return validate(p);
}

Scenario make_scenario(Task task, Setting setting, double alpha, double e1, std::optional<double> e2, Target target) {
  Scenario s;
  s.task = task;
  s.setting = setting;
  s.budget = {alpha, e1, e2};
  s.target = target;
  return s;
}

Table fig1a(const Fields&) {
  Table t({"alpha", "rho_critical"});
  for (double a : grid(0.0, 10.0, 0.05)) t.add({a, joint_priority_threshold(a, Setting::Decentralized)});
  return t;
}

Table fig1b(const Fields& f) {
  const double alpha = f.real_or("alpha", 2.0);
  const ObservationModel m = figure_model(f, f.real_or("rho", 0.5));
  Table t({"e1", "p_y", "p_xy", "crb", "feasible"});
  for (double e1 : list_or(f, "e1", {kInf, 2.0, 0.8})) {
    const Scenario s = make_scenario(Task::T1, Setting::Decentralized, alpha, e1, std::nullopt, Target::MuY);
    for (double py : grid(0.0, 1.0, 0.01)) {
      const ProfilePoint pt = profile(s, m, {{1, py}});
      t.add({e1, py, pt.feasible ? pt.policy.p_xy : kNaN, pt.crb, pt.feasible});
    }
  }
  return t;
}

Table fig1c(const Fields& f) {
  const double alpha = f.real_or("alpha", 2.0);
  const double critical = joint_priority_threshold(alpha, Setting::Decentralized);
  Table t({"rho", "e1", "p_y", "p_xy", "crb", "tie"});
  for (double rho : list_or(f, "rho", {0.5, critical, std::min(0.95, critical + 0.1)})) {
    const ObservationModel m = figure_model(f, rho);
    for (double e1 : grid(0.0, alpha + 2.0, 0.05)) {
      const Scenario s = make_scenario(Task::T1, Setting::Decentralized, alpha, e1, std::nullopt, Target::MuY);
      const PlanResult r = plan_or_idle(s, m);
      t.add({rho, e1, r.policy.p_y, r.policy.p_xy, r.objective_value, r.tie});
    }
  }
  return t;
}

Table fig2a(const Fields& f) {
  const double alpha = f.real_or("alpha", 2.0);
  const ObservationModel m = figure_model(f, f.real_or("rho", 0.5));
  Table t({"e1", "p_x", "p_y", "p_xy", "crb", "feasible"});
  for (double e1 : list_or(f, "e1", {kInf, 2.0, 1.0})) {
    const Scenario s = make_scenario(Task::T3, Setting::Decentralized, alpha, e1, std::nullopt, Target::MuX);
    for (double px : grid(0.0, 1.0, 0.01)) {
      const ProfilePoint pt = profile(s, m, {{0, px}});
      t.add({e1, px, pt.feasible ? pt.policy.p_y : kNaN, pt.feasible ? pt.policy.p_xy : kNaN, pt.crb, pt.feasible});
    }
  }
  return t;
}

Table fig2bc(const Fields& f, double default_e1) {
  const double alpha = f.real_or("alpha", 2.0);
  const double e1 = f.real_or("e1", default_e1);
  Table t({"rho", "e1", "e2", "p_x", "p_y", "p_xy", "crb", "tie"});
  for (double rho : list_or(f, "rho", {0.5, 0.9})) {
    const ObservationModel m = figure_model(f, rho);
    for (double e2 : grid(0.0, 4.0 * alpha, 0.05)) {
      const Scenario s = make_scenario(Task::T1, Setting::Centralized, alpha, e1, e2, Target::MuY);
      const PlanResult r = plan_or_idle(s, m);
      t.add({rho, e1, e2, r.policy.p_x, r.policy.p_y, r.policy.p_xy, r.objective_value, r.tie});
    }
  }
  return t;
}

Table fig3(const Fields& f) {
  const double alpha = f.real_or("alpha", 2.0);
  const ObservationModel m = figure_model(f, f.real_or("rho", 0.8));
  std::vector<std::pair<double, double>> budgets{{kInf, kInf}, {3.0, 3.0}, {2.0, 2.0}};
  if (f.has("e1") || f.has("e2")) budgets = {{f.real_or("e1", kInf), f.real_or("e2", kInf)}};
  Table t({"e1", "e2", "p_x", "p_y", "p_xy", "crb", "feasible"});
  for (auto [e1, e2] : budgets) {
    const Scenario s = make_scenario(Task::T3, Setting::Centralized, alpha, e1, e2, Target::MuX);
    for (double px : grid(0.0, 1.0, 0.01)) {
      const ProfilePoint pt = profile(s, m, {{0, px}});
      t.add({e1, e2, px, pt.feasible ? pt.policy.p_y : kNaN, pt.feasible ? pt.policy.p_xy : kNaN, pt.crb,
             pt.feasible});
    }
  }
  return t;
}

// CRB against a symmetric marginal share p_x = p_y, joint share optimized.
Table fig4ac(const Fields& f, double default_budget) {
  const double alpha = f.real_or("alpha", 2.0);
  const double e1 = f.real_or("e1", default_budget);
  const double e2 = f.real_or("e2", default_budget);
  Table t({"rho", "e1", "e2", "p_x", "p_y", "p_xy", "crb", "feasible"});
  for (double rho : list_or(f, "rho", {0.5, 0.6, 0.7, 0.8, 0.9})) {
    const ObservationModel m = figure_model(f, rho);
    const Scenario s = make_scenario(Task::T3, Setting::Centralized, alpha, e1, e2, Target::MuX);
    for (double v : grid(0.0, 0.5, 0.01)) {
      const ProfilePoint pt = profile(s, m, {{0, v}, {1, v}});
      t.add({rho, e1, e2, v, v, pt.feasible ? pt.policy.p_xy : kNaN, pt.crb, pt.feasible});
    }
  }
  return t;
}

Table fig4b(const Fields& f) {
  const double alpha = f.real_or("alpha", 2.0);
  const double e1 = f.real_or("e1", 2.0);
  const double e2 = f.real_or("e2", 2.0);
  Table t({"rho", "p_x", "p_y", "p_xy", "crb", "tie"});
  for (double rho : grid(0.0, 0.99, 0.01)) {
    const ObservationModel m = figure_model(f, rho);
    const Scenario s = make_scenario(Task::T3, Setting::Centralized, alpha, e1, e2, Target::MuX);
    const PlanResult r = plan_or_idle(s, m);
    t.add({rho, r.policy.p_x, r.policy.p_y, r.policy.p_xy, r.objective_value, r.tie});
  }
  return t;
}

int cmd_sweep(const Fields& f, const std::string& id, std::ostream& out) {
  const double alpha = f.real_or("alpha", 2.0);
  std::optional<Table> t;
  if (id == "fig1a") t = fig1a(f);
  else if (id == "fig1b") t = fig1b(f);
  else if (id == "fig1c") t = fig1c(f);
  else if (id == "fig2a") t = fig2a(f);
  else if (id == "fig2b") t = fig2bc(f, 2.0);
  else if (id == "fig2c") t = fig2bc(f, alpha + 1.0);
  else if (id == "fig3") t = fig3(f);
  else if (id == "fig4a") t = fig4ac(f, 2.0);
  else if (id == "fig4b") t = fig4b(f);
  else if (id == "fig4c") t = fig4ac(f, 3.0);
  else throw Error(ErrorCode::InvalidConfig, "unknown figure id '" + id + "'");
  emit(f, *t, out);
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularEverywhere:
    case ErrorCode::DegeneratePolicy:
    case ErrorCode::SingularMatrix:
    case ErrorCode::SingularCovariance:
    case ErrorCode::MissingStratum:
      return kExitDegenerate;
    default:
      return kExitConfig;
  }
}

const std::vector<std::string> kCommonFlags{"task", "setting", "alpha", "e1",   "e2",   "rho",
                                            "mu-x", "mu-y",    "var-x", "var-y", "target", "seed",
                                            "slots", "reps",   "out",   "format", "config"};

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1a", "fig1b", "fig1c", "fig2a", "fig2b",
                                            "fig2c", "fig3",  "fig4a", "fig4b", "fig4c"};
  return ids;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fisher information, Cramer-Rao bounds and sampling policies for two-sensor Gaussian estimation"};
  app.require_subcommand(1);

  std::map<std::string, std::string> raw;
  std::string figure;
  auto add_flags = [&](CLI::App* sub, const std::vector<std::string>& names) {
    for (const auto& name : names) sub->add_option("--" + name, raw[name]);
  };

  auto* plan_cmd = app.add_subcommand("plan", "Optimal sampling policy for a scenario");
  auto* bounds_cmd = app.add_subcommand("bounds", "CRB along a one-parameter sweep");
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of estimators against the bounds");
  auto* sweep_cmd = app.add_subcommand("sweep", "Plot-ready data for a figure");
  for (auto* sub : {plan_cmd, bounds_cmd, sim_cmd, sweep_cmd}) add_flags(sub, kCommonFlags);
  add_flags(bounds_cmd, {"sweep", "range"});
  add_flags(sim_cmd, {"p-x", "p-y", "p-xy", "estimator", "workers", "trace"});
  sweep_cmd->add_option("figure", figure, "one of fig1a fig1b fig1c fig2a fig2b fig2c fig3 fig4a fig4b fig4c")
      ->required();

  std::vector<const char*> argv{"collab-cli"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    std::map<std::string, std::string> merged;
    if (active->count("--config")) {
      std::ifstream in(raw["config"]);
      if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read --config " + raw["config"]);
      merged = read_key_values(in);
    }
    for (const auto& [name, value] : raw) {
      if (name == "config" || !active->get_option_no_throw("--" + name) || !active->count("--" + name)) continue;
      std::string key = name;
      for (auto& c : key)
        if (c == '-') c = '_';
      merged[key] = value;
    }
    const Fields fields(std::move(merged));

    if (active == plan_cmd) return cmd_plan(fields, out);
    if (active == bounds_cmd) return cmd_bounds(fields, out);
    if (active == sim_cmd) return cmd_simulate(fields, out, err);
    return cmd_sweep(fields, figure, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace collab::cli
