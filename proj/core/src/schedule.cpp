#include "mrplan/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mrplan/errors.hpp"

namespace mrplan {

double travel_time(const RobotProfile& robot, const Point& from, const Point& to) {
  return distance(from, to) / robot.speed;
}

SchedulingProblem::SchedulingProblem(std::vector<RobotProfile> robots, std::vector<NodeId> actions,
                                     const std::set<Precedence>& precedence,
                                     const std::map<NodeId, ActionSite>& sites)
    : robots_(std::move(robots)), actions_(std::move(actions)), precedence_(precedence) {
  const std::size_t n = actions_.size();
  for (ActionIndex a = 0; a < n; ++a) {
    if (!action_index_.emplace(actions_[a], a).second) {
      throw ValidationError("duplicate action '" + actions_[a] + "'");
    }
  }
  for (const auto& robot : robots_) {
    if (!(robot.speed > 0.0)) {
      throw ValidationError("robot '" + robot.id + "' needs a positive speed");
    }
  }

  sites_.resize(n);
  for (ActionIndex a = 0; a < n; ++a) {
    if (auto it = sites.find(actions_[a]); it != sites.end()) {
      sites_[a] = it->second;
    }
  }

  service_.resize(robots_.size() * n);
  capable_.resize(n);
  for (RobotIndex r = 0; r < robots_.size(); ++r) {
    for (ActionIndex a = 0; a < n; ++a) {
      if (robots_[r].can_perform(actions_[a])) {
        service_[r * n + a] = robots_[r].outcome(actions_[a]);
        capable_[a].push_back(r);
      }
    }
  }
  for (ActionIndex a = 0; a < n; ++a) {
    if (capable_[a].empty()) {
      throw InfeasibleError("unservable action '" + actions_[a] + "'");
    }
  }

  preds_.resize(n);
  succs_.resize(n);
  for (const auto& p : precedence_) {
    auto b = action_index_.find(p.before);
    auto f = action_index_.find(p.after);
    if (b == action_index_.end() || f == action_index_.end()) {
      throw ValidationError("precedence (" + p.before + ", " + p.after +
                            ") references an unscheduled action");
    }
    if (b->second == f->second) {
      throw ValidationError("action '" + p.before + "' cannot precede itself");
    }
    succs_[b->second].push_back(f->second);
    preds_[f->second].push_back(b->second);
  }

  // Topological order doubles as the acyclicity check.
  std::vector<std::size_t> indeg(n);
  for (ActionIndex a = 0; a < n; ++a) {
    indeg[a] = preds_[a].size();
  }
  std::vector<ActionIndex> order;
  order.reserve(n);
  for (ActionIndex a = 0; a < n; ++a) {
    if (indeg[a] == 0) {
      order.push_back(a);
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (ActionIndex s : succs_[order[i]]) {
      if (--indeg[s] == 0) {
        order.push_back(s);
      }
    }
  }
  if (order.size() != n) {
    throw ValidationError("action-level precedence is cyclic");
  }

  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (ActionIndex s : succs_[*it]) {
      reach[*it][s] = true;
      for (ActionIndex t = 0; t < n; ++t) {
        if (reach[s][t]) {
          reach[*it][t] = true;
        }
      }
    }
  }
  closure_preds_.resize(n);
  closure_succs_.resize(n);
  for (ActionIndex a = 0; a < n; ++a) {
    for (ActionIndex b = 0; b < n; ++b) {
      if (reach[a][b]) {
        closure_succs_[a].push_back(b);
        closure_preds_[b].push_back(a);
      }
    }
  }
}

SchedulingProblem SchedulingProblem::from_mission(const Mission& mission,
                                                  const std::vector<NodeId>& selected) {
  std::set<NodeId> chosen(selected.begin(), selected.end());
  return SchedulingProblem(mission.robots, selected,
                           induced_action_precedence(mission.tree, chosen), mission.sites);
}

ActionIndex SchedulingProblem::action_index(const NodeId& id) const {
  auto it = action_index_.find(id);
  if (it == action_index_.end()) {
    throw ValidationError("action '" + id + "' is not part of the problem");
  }
  return it->second;
}

RobotIndex SchedulingProblem::robot_index(const RobotId& id) const {
  for (RobotIndex r = 0; r < robots_.size(); ++r) {
    if (robots_[r].id == id) {
      return r;
    }
  }
  throw ValidationError("unknown robot '" + id + "'");
}

double SchedulingProblem::leg_time(RobotIndex r, ActionIndex from, ActionIndex to) const {
  const Point origin = from == kDepot ? robots_[r].start : sites_[from].exit();
  return travel_time(robots_[r], origin, sites_[to].location);
}

namespace {

struct Placement {
  std::vector<RobotIndex> robot;
  std::vector<std::size_t> position;
};

// Validates single, capable assignment; returns where each action sits.
Placement locate(const SchedulingProblem& problem, const Genotype& genotype,
                 FeasibilityReport* report) {
  const std::size_t n = problem.action_count();
  Placement p{std::vector<RobotIndex>(n, kDepot), std::vector<std::size_t>(n, 0)};
  auto fail = [&](ScheduleViolation kind, std::string detail) {
    if (report == nullptr) {
      throw ValidationError(std::move(detail));
    }
    report->issues.push_back({kind, std::move(detail)});
  };
  if (genotype.routes.size() != problem.robot_count()) {
    fail(ScheduleViolation::kAssignment, "genotype has " + std::to_string(genotype.routes.size()) +
                                             " routes for " +
                                             std::to_string(problem.robot_count()) + " robots");
    return p;
  }
  for (RobotIndex r = 0; r < genotype.routes.size(); ++r) {
    const auto& route = genotype.routes[r];
    for (std::size_t k = 0; k < route.size(); ++k) {
      ActionIndex a = route[k];
      if (a >= n) {
        fail(ScheduleViolation::kAssignment, "unknown action index " + std::to_string(a));
        continue;
      }
      if (p.robot[a] != kDepot) {
        fail(ScheduleViolation::kAssignment, "action '" + problem.action_id(a) + "' assigned twice");
        continue;
      }
      if (!problem.capable(r, a)) {
        fail(ScheduleViolation::kCapability, "robot '" + problem.robot(r).id +
                                                 "' cannot perform '" + problem.action_id(a) + "'");
      }
      p.robot[a] = r;
      p.position[a] = k;
    }
  }
  for (ActionIndex a = 0; a < n; ++a) {
    if (p.robot[a] == kDepot) {
      fail(ScheduleViolation::kAssignment, "action '" + problem.action_id(a) + "' unassigned");
    }
  }
  return p;
}

}  // namespace

std::optional<Phenotype> try_render(const SchedulingProblem& problem, const Genotype& genotype) {
  const std::size_t n = problem.action_count();
  const Placement place = locate(problem, genotype, nullptr);

  std::vector<std::size_t> indeg(n);
  std::vector<ActionIndex> ready;
  ready.reserve(n);
  for (ActionIndex a = 0; a < n; ++a) {
    indeg[a] = problem.predecessors(a).size() + (place.position[a] > 0 ? 1 : 0);
    if (indeg[a] == 0) {
      ready.push_back(a);
    }
  }

  std::vector<double> start(n, 0.0), finish(n, 0.0);
  std::vector<double> travel_seconds(problem.robot_count(), 0.0);
  double service_cost = 0.0;
  std::size_t done = 0;
  while (!ready.empty()) {
    const ActionIndex a = ready.back();
    ready.pop_back();
    ++done;
    const RobotIndex r = place.robot[a];
    const auto& route = genotype.routes[r];
    const std::size_t k = place.position[a];
    const ActionIndex prev = k > 0 ? route[k - 1] : kDepot;

    const double leg = problem.leg_time(r, prev, a);
    travel_seconds[r] += leg;
    double earliest = (prev == kDepot ? 0.0 : finish[prev]) + leg;
    for (ActionIndex p : problem.predecessors(a)) {
      earliest = std::max(earliest, finish[p]);
    }
    start[a] = earliest;
    finish[a] = earliest + problem.service_duration(r, a);
    service_cost += problem.service_cost(r, a);

    if (k + 1 < route.size() && --indeg[route[k + 1]] == 0) {
      ready.push_back(route[k + 1]);
    }
    for (ActionIndex s : problem.successors(a)) {
      if (--indeg[s] == 0) {
        ready.push_back(s);
      }
    }
  }
  if (done != n) {
    return std::nullopt;
  }

  Phenotype out;
  out.schedules.resize(problem.robot_count());
  for (RobotIndex r = 0; r < problem.robot_count(); ++r) {
    auto& sched = out.schedules[r];
    sched.reserve(genotype.routes[r].size());
    for (ActionIndex a : genotype.routes[r]) {
      sched.push_back({a, start[a], finish[a]});
      out.makespan = std::max(out.makespan, finish[a]);
    }
    out.travel_cost += energy_kj(travel_seconds[r], problem.robot(r).drive_power);
  }
  out.service_cost = service_cost;
  out.total_cost = out.service_cost + out.travel_cost;
  return out;
}

Phenotype render_phenotype(const SchedulingProblem& problem, const Genotype& genotype) {
  auto out = try_render(problem, genotype);
  if (!out) {
    throw InfeasibleError("cross-schedule deadlock: route orders contradict precedence");
  }
  return std::move(*out);
}

std::string_view describe(ScheduleViolation kind) {
  switch (kind) {
    case ScheduleViolation::kAssignment: return "assignment";
    case ScheduleViolation::kCapability: return "capability";
    case ScheduleViolation::kRouteOrder: return "route order";
    case ScheduleViolation::kDeadlock: return "cross-schedule deadlock";
    case ScheduleViolation::kDuration: return "duration";
    case ScheduleViolation::kTravel: return "travel";
    case ScheduleViolation::kPrecedence: return "precedence";
    case ScheduleViolation::kNotSemiActive: return "not semi-active";
    case ScheduleViolation::kObjective: return "objective";
  }
  return "unknown";
}

bool FeasibilityReport::has(ScheduleViolation kind) const {
  return std::any_of(issues.begin(), issues.end(), [kind](const Issue& i) { return i.kind == kind; });
}

std::string FeasibilityReport::to_string() const {
  std::ostringstream os;
  for (const auto& i : issues) {
    os << describe(i.kind) << ": " << i.detail << '\n';
  }
  return os.str();
}

FeasibilityReport check_genotype(const SchedulingProblem& problem, const Genotype& genotype) {
  FeasibilityReport report;
  const Placement place = locate(problem, genotype, &report);
  if (!report.ok()) {
    return report;
  }
  for (const auto& p : problem.precedence()) {
    const ActionIndex b = problem.action_index(p.before);
    const ActionIndex f = problem.action_index(p.after);
    if (place.robot[b] == place.robot[f] && place.position[b] > place.position[f]) {
      report.issues.push_back({ScheduleViolation::kRouteOrder,
                               "'" + p.before + "' after '" + p.after + "' on one route"});
    }
  }
  if (report.ok() && !try_render(problem, genotype)) {
    report.issues.push_back({ScheduleViolation::kDeadlock, "route orders contradict precedence"});
  }
  return report;
}

namespace {

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

FeasibilityReport check_feasible(const SchedulingProblem& problem, const Phenotype& phenotype,
                                 double tolerance) {
  FeasibilityReport report;
  const std::size_t n = problem.action_count();
  auto issue = [&](ScheduleViolation kind, std::string detail) {
    report.issues.push_back({kind, std::move(detail)});
  };
  if (phenotype.schedules.size() != problem.robot_count()) {
    issue(ScheduleViolation::kAssignment, "schedule count differs from robot count");
    return report;
  }

  std::vector<int> seen(n, 0);
  std::vector<double> start(n, 0.0), finish(n, 0.0);
  for (RobotIndex r = 0; r < phenotype.schedules.size(); ++r) {
    for (const auto& e : phenotype.schedules[r]) {
      if (e.action >= n) {
        issue(ScheduleViolation::kAssignment, "unknown action index " + std::to_string(e.action));
        continue;
      }
      ++seen[e.action];
      start[e.action] = e.start;
      finish[e.action] = e.finish;
      if (!problem.capable(r, e.action)) {
        issue(ScheduleViolation::kCapability,
              problem.robot(r).id + " cannot perform " + problem.action_id(e.action));
      }
    }
  }
  for (ActionIndex a = 0; a < n; ++a) {
    if (seen[a] != 1) {
      issue(ScheduleViolation::kAssignment,
            problem.action_id(a) + " scheduled " + std::to_string(seen[a]) + " times");
    }
  }
  if (!report.ok()) {
    return report;
  }

  double makespan = 0.0;
  double cost = 0.0;
  for (RobotIndex r = 0; r < phenotype.schedules.size(); ++r) {
    const RobotProfile& robot = problem.robot(r);
    Point at = robot.start;
    double free_at = 0.0;
    for (const auto& e : phenotype.schedules[r]) {
      const std::string& id = problem.action_id(e.action);
      const double dur = problem.service_duration(r, e.action);
      if (!close(e.finish, e.start + dur, tolerance)) {
        issue(ScheduleViolation::kDuration, id + " finish != start + service duration");
      }
      const double leg = travel_time(robot, at, problem.site(e.action).location);
      double lower = free_at + leg;
      if (e.start < lower && !close(e.start, lower, tolerance)) {
        issue(ScheduleViolation::kTravel, id + " starts before " + robot.id + " can arrive");
      }
      for (ActionIndex p : problem.predecessors(e.action)) {
        lower = std::max(lower, finish[p]);
      }
      if (e.start > lower && !close(e.start, lower, tolerance)) {
        issue(ScheduleViolation::kNotSemiActive, id + " could start earlier");
      }
      cost += problem.service_cost(r, e.action) + energy_kj(leg, robot.drive_power);
      makespan = std::max(makespan, e.finish);
      at = problem.site(e.action).exit();
      free_at = e.finish;
    }
  }
  for (const auto& p : problem.precedence()) {
    const ActionIndex b = problem.action_index(p.before);
    const ActionIndex f = problem.action_index(p.after);
    if (start[f] < finish[b] && !close(start[f], finish[b], tolerance)) {
      issue(ScheduleViolation::kPrecedence, p.after + " starts before " + p.before + " finishes");
    }
  }
  if (!close(makespan, phenotype.makespan, tolerance)) {
    issue(ScheduleViolation::kObjective, "makespan mismatch");
  }
  if (std::abs(cost - phenotype.total_cost) > std::max(1e-6, tolerance * std::max(1.0, std::abs(cost)))) {
    issue(ScheduleViolation::kObjective, "total cost mismatch");
  }
  return report;
}

Genotype genotype_of(const Phenotype& phenotype) {
  Genotype g;
  g.routes.reserve(phenotype.schedules.size());
  for (const auto& sched : phenotype.schedules) {
    auto& route = g.routes.emplace_back();
    route.reserve(sched.size());
    for (const auto& e : sched) {
      route.push_back(e.action);
    }
  }
  return g;
}

}  // namespace mrplan
