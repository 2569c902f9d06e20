#include "mrplan/mission_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mrplan/errors.hpp"

namespace mrplan {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Point point_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(what + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ordered_json point_json(const Point& p) { return ordered_json::array({p.x, p.y}); }

}  // namespace

Mission parse_mission(const std::string& text) {
  Mission m;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) {
      throw ValidationError("mission must be a JSON object");
    }
    std::vector<Node> nodes;
    for (const auto& jn : doc.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<std::string>();
      const std::string kind = jn.at("kind").get<std::string>();
      if (kind == "action") {
        n.kind = NodeKind::kAction;
      } else if (kind == "task") {
        n.kind = NodeKind::kTask;
        const std::string qaf = jn.value("qaf", std::string("AND"));
        if (qaf == "AND") {
          n.qaf = Qaf::kAnd;
        } else if (qaf == "XOR") {
          n.qaf = Qaf::kXor;
        } else {
          throw ValidationError("node '" + n.id + "': unknown qaf '" + qaf + "'");
        }
      } else {
        throw ValidationError("node '" + n.id + "': unknown kind '" + kind + "'");
      }
      if (jn.contains("children")) {
        n.children = jn.at("children").get<std::vector<std::string>>();
      }
      if (jn.contains("location")) {
        ActionSite site{point_from(jn.at("location"), "location of '" + n.id + "'"), std::nullopt};
        if (jn.contains("end_location")) {
          site.end_location = point_from(jn.at("end_location"), "end_location of '" + n.id + "'");
        }
        m.sites[n.id] = site;
      } else if (jn.contains("end_location")) {
        throw ValidationError("node '" + n.id + "' has end_location without location");
      }
      nodes.push_back(std::move(n));
    }
    std::vector<Precedence> precedence;
    if (doc.contains("precedence")) {
      for (const auto& jp : doc.at("precedence")) {
        if (!jp.is_array() || jp.size() != 2) {
          throw ValidationError("precedence entries must be [before, after]");
        }
        precedence.push_back({jp[0].get<std::string>(), jp[1].get<std::string>()});
      }
    }
    m.tree = MissionTree(std::move(nodes), doc.at("root").get<std::string>(), std::move(precedence));

    for (const auto& jr : doc.at("robots")) {
      RobotProfile r;
      r.id = jr.at("id").get<std::string>();
      if (jr.contains("start")) {
        r.start = point_from(jr.at("start"), "start of robot '" + r.id + "'");
      }
      r.speed = jr.value("speed", 1.0);
      r.drive_power = jr.value("drive_power", 0.0);
      for (const auto& [action, jo] : jr.at("actions").items()) {
        r.outcomes[action] = {jo.at("quality").get<double>(), jo.at("duration").get<double>(),
                              jo.at("cost").get<double>()};
      }
      m.robots.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("mission document: ") + e.what());
  }
  return m;
}

std::string mission_to_json(const Mission& mission) {
  ordered_json doc;
  doc["root"] = mission.tree.root();
  doc["nodes"] = ordered_json::array();
  for (const auto& n : mission.tree.nodes()) {
    ordered_json jn;
    jn["id"] = n.id;
    jn["kind"] = n.is_action() ? "action" : "task";
    if (!n.is_action()) {
      jn["qaf"] = n.qaf == Qaf::kAnd ? "AND" : "XOR";
      jn["children"] = n.children;
    }
    if (auto it = mission.sites.find(n.id); it != mission.sites.end()) {
      jn["location"] = point_json(it->second.location);
      if (it->second.end_location) {
        jn["end_location"] = point_json(*it->second.end_location);
      }
    }
    doc["nodes"].push_back(std::move(jn));
  }
  doc["precedence"] = ordered_json::array();
  for (const auto& p : mission.tree.precedence()) {
    doc["precedence"].push_back(ordered_json::array({p.before, p.after}));
  }
  doc["robots"] = ordered_json::array();
  for (const auto& r : mission.robots) {
    ordered_json jr;
    jr["id"] = r.id;
    jr["start"] = point_json(r.start);
    jr["speed"] = r.speed;
    jr["drive_power"] = r.drive_power;
    jr["actions"] = ordered_json::object();
    for (const auto& [action, o] : r.outcomes) {
      jr["actions"][action] = {{"quality", o.quality}, {"duration", o.duration}, {"cost", o.cost}};
    }
    doc["robots"].push_back(std::move(jr));
  }
  return doc.dump(2) + "\n";
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot read '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw ValidationError("cannot write '" + path + "'");
  }
}

Mission load_mission(const std::string& path) { return parse_mission(load_text(path)); }

}  // namespace mrplan
