#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mrplan/schedule.hpp"

namespace mrplan {

// Fixed-point with six decimals, the precision of every exported number.
std::string format_fixed(double value);

// Schedule CSV. Action rows grouped by robot (problem order), each robot's
// rows in route order, then a blank line and the summary record:
//
//   robot_id,action_id,start_s,finish_s
//   ugv1,o_A.0.0.0,0.000000,25.000000
//   ...
//
//   makespan_s,total_cost
//   1234.500000,56.780000
void write_schedule_csv(std::ostream& out, const SchedulingProblem& problem,
                        const Phenotype& phenotype);
std::string schedule_csv(const SchedulingProblem& problem, const Phenotype& phenotype);

// Parses write_schedule_csv output back against the same problem. Cost
// breakdown fields are left zero. Throws ValidationError on malformed input.
Phenotype read_schedule_csv(std::istream& in, const SchedulingProblem& problem);

// Gantt-ready JSON: {"makespan_s", "total_cost", "service_cost",
// "travel_cost", "robots": [{"id", "actions": [{"id", "start_s",
// "finish_s"}]}]}.
std::string schedule_json(const SchedulingProblem& problem, const Phenotype& phenotype);

// Objective pairs, one per line under "makespan_s,total_cost".
std::string front_csv(const std::vector<Objectives>& front);

}  // namespace mrplan
