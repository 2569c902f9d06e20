#include "mrplan/schedule_io.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mrplan/errors.hpp"

namespace mrplan {

namespace {

constexpr std::string_view kScheduleHeader = "robot_id,action_id,start_s,finish_s";
constexpr std::string_view kSummaryHeader = "makespan_s,total_cost";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double parse_number(const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) {
      throw ValidationError("bad number '" + text + "'");
    }
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError("bad number '" + text + "'");
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
}

}  // namespace

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

void write_schedule_csv(std::ostream& out, const SchedulingProblem& problem,
                        const Phenotype& phenotype) {
  out << kScheduleHeader << '\n';
  for (RobotIndex r = 0; r < phenotype.schedules.size(); ++r) {
    for (const auto& e : phenotype.schedules[r]) {
      out << problem.robot(r).id << ',' << problem.action_id(e.action) << ','
          << format_fixed(e.start) << ',' << format_fixed(e.finish) << '\n';
    }
  }
  out << '\n' << kSummaryHeader << '\n';
  out << format_fixed(phenotype.makespan) << ',' << format_fixed(phenotype.total_cost) << '\n';
}

std::string schedule_csv(const SchedulingProblem& problem, const Phenotype& phenotype) {
  std::ostringstream os;
  write_schedule_csv(os, problem, phenotype);
  return os.str();
}

Phenotype read_schedule_csv(std::istream& in, const SchedulingProblem& problem) {
  std::string line;
  if (!std::getline(in, line) || (strip_cr(line), line != kScheduleHeader)) {
    throw ValidationError("schedule CSV: missing header");
  }
  Phenotype out;
  out.schedules.resize(problem.robot_count());
  bool summary = false;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) {
      continue;
    }
    if (line == kSummaryHeader) {
      summary = true;
      break;
    }
    auto f = split(line);
    if (f.size() != 4) {
      throw ValidationError("schedule CSV: expected 4 fields in '" + line + "'");
    }
    const RobotIndex r = problem.robot_index(f[0]);
    out.schedules[r].push_back({problem.action_index(f[1]), parse_number(f[2]), parse_number(f[3])});
  }
  if (!summary || !std::getline(in, line)) {
    throw ValidationError("schedule CSV: missing summary record");
  }
  strip_cr(line);
  auto f = split(line);
  if (f.size() != 2) {
    throw ValidationError("schedule CSV: malformed summary '" + line + "'");
  }
  out.makespan = parse_number(f[0]);
  out.total_cost = parse_number(f[1]);
  return out;
}

std::string schedule_json(const SchedulingProblem& problem, const Phenotype& phenotype) {
  nlohmann::ordered_json doc;
  doc["makespan_s"] = phenotype.makespan;
  doc["total_cost"] = phenotype.total_cost;
  doc["service_cost"] = phenotype.service_cost;
  doc["travel_cost"] = phenotype.travel_cost;
  auto robots = nlohmann::ordered_json::array();
  for (RobotIndex r = 0; r < phenotype.schedules.size(); ++r) {
    auto actions = nlohmann::ordered_json::array();
    for (const auto& e : phenotype.schedules[r]) {
      actions.push_back({{"id", problem.action_id(e.action)},
                         {"start_s", e.start},
                         {"finish_s", e.finish}});
    }
    robots.push_back({{"id", problem.robot(r).id}, {"actions", std::move(actions)}});
  }
  doc["robots"] = std::move(robots);
  return doc.dump(2) + "\n";
}

std::string front_csv(const std::vector<Objectives>& front) {
  std::ostringstream os;
  os << kSummaryHeader << '\n';
  for (const auto& o : front) {
    os << format_fixed(o.makespan) << ',' << format_fixed(o.cost) << '\n';
  }
  return os.str();
}

}  // namespace mrplan
