#pragma once

#include <string>

#include "mrplan/task_model.hpp"

namespace mrplan {

// Mission document (JSON):
//   {"root": id,
//    "nodes": [{"id", "kind": "task"|"action", "qaf": "AND"|"XOR",
//               "children": [...], "location": [x, y], "end_location": [x, y]}],
//    "precedence": [[before, after], ...],
//    "robots": [{"id", "start": [x, y], "speed", "drive_power",
//                "actions": {action: {"quality", "duration", "cost"}}}]}
// Parsing checks the document shape only; run validate_mission afterwards.
// Throws ValidationError.
Mission parse_mission(const std::string& text);
std::string mission_to_json(const Mission& mission);

Mission load_mission(const std::string& path);
void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}  // namespace mrplan
