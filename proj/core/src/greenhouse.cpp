#include "mrplan/greenhouse.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mrplan/errors.hpp"
#include "mrplan/schedule.hpp"

namespace mrplan {

namespace {

struct PlantSlot {
  std::size_t table = 0;
  std::size_t row = 0;
  std::size_t column = 0;
};

PlantSlot parse_plant(const std::string& plant) {
  PlantSlot slot;
  char dot1 = 0;
  char dot2 = 0;
  std::istringstream is(plant);
  if (!(is >> slot.table >> dot1 >> slot.row >> dot2 >> slot.column) || dot1 != '.' || dot2 != '.' ||
      is.peek() != std::char_traits<char>::eof()) {
    throw ValidationError("plant id '" + plant + "' is not table.row.column");
  }
  return slot;
}

struct DefaultPlant {
  const char* id;
  int left;
  int right;
};

// Tables 0-3 (bottom row of the grid) carry three plants each, tables 4-7
// two each. Batches follow this order in groups of four.
constexpr DefaultPlant kDefaultPlants[] = {
    {"0.0.0", 5, 1}, {"0.1.0", 3, 4}, {"0.2.0", 6, 6}, {"1.0.0", 2, 2}, {"1.1.0", 7, 5},
    {"1.2.0", 1, 3}, {"2.0.0", 4, 4}, {"2.1.0", 2, 1}, {"2.2.0", 6, 7}, {"3.0.0", 3, 2},
    {"3.1.0", 5, 5}, {"3.2.0", 1, 1}, {"4.0.0", 6, 8}, {"4.1.0", 2, 3}, {"5.0.0", 4, 6},
    {"5.1.0", 3, 1}, {"6.0.0", 5, 4}, {"6.1.0", 2, 2}, {"7.0.0", 7, 6}, {"7.1.0", 1, 2},
};

std::string role_prefix(RobotRole role) {
  switch (role) {
    case RobotRole::kUgv: return "ugv_";
    case RobotRole::kStationary: return "stationary_";
    case RobotRole::kMobile: return "mobile_";
  }
  return "robot_";
}

using nlohmann::json;


Point point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw ValidationError("point must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

GreenhouseConfig GreenhouseConfig::defaults() {
  GreenhouseConfig c;
  for (std::size_t t = 0; t < c.n_tables; ++t) {
    c.tables.push_back({2.0 + 3.0 * static_cast<double>(t % 4), 2.0 + 4.0 * static_cast<double>(t / 4)});
  }
  std::size_t k = 0;
  for (const auto& p : kDefaultPlants) {
    c.counts[p.id] = {p.left, p.right};
    c.batches[p.id] = c.batch_labels[k++ / 4];
  }
  return c;
}

void GreenhouseConfig::validate() const {
  if (tables.size() != n_tables) {
    throw ValidationError("expected " + std::to_string(n_tables) + " table coordinates, got " +
                          std::to_string(tables.size()));
  }
  if (counts.empty()) {
    throw ValidationError("greenhouse has no plants to tend");
  }
  for (double v : {unit_op_duration, handling_time, prep_duration, ready_duration, ugv_power, mobile_power,
                   mobile_work_power, manipulation_power, plant_spacing, aisle_offset, action_quality}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("greenhouse durations, powers and distances must be nonnegative");
    }
  }
  if (!(ugv_speed > 0.0) || !(mobile_speed > 0.0)) {
    throw ValidationError("robot speeds must be positive");
  }
  const std::set<std::string> labels(batch_labels.begin(), batch_labels.end());
  for (const auto& [plant, units] : counts) {
    PlantSlot slot = parse_plant(plant);
    if (slot.table >= n_tables || slot.row >= plants_per_table || slot.column != 0) {
      throw ValidationError("plant '" + plant + "' lies outside the greenhouse");
    }
    if (units.left < 0 || units.right < 0) {
      throw ValidationError("plant '" + plant + "' has a negative unit count");
    }
    auto it = batches.find(plant);
    if (it == batches.end() || !labels.contains(it->second)) {
      throw ValidationError("plant '" + plant + "' has no known batch");
    }
  }
}

std::vector<std::string> GreenhouseConfig::plants() const {
  std::vector<std::string> out;
  for (const auto& [plant, _] : counts) {
    out.push_back(plant);
  }
  return out;
}

Point GreenhouseConfig::plant_location(const std::string& plant) const {
  PlantSlot slot = parse_plant(plant);
  if (slot.table >= tables.size() || slot.row >= plants_per_table) {
    throw ValidationError("plant '" + plant + "' is outside the greenhouse");
  }
  const Point& table = tables[slot.table];
  const double middle = (static_cast<double>(plants_per_table) - 1.0) / 2.0;
  return {table.x, table.y + plant_spacing * (middle - static_cast<double>(slot.row))};
}

Point GreenhouseConfig::left_aisle(const std::string& plant) const {
  Point p = plant_location(plant);
  return {p.x - aisle_offset, p.y};
}

Point GreenhouseConfig::right_aisle(const std::string& plant) const {
  Point p = plant_location(plant);
  return {p.x + aisle_offset, p.y};
}

double GreenhouseConfig::transport_duration(const std::string& plant) const {
  return distance(plant_location(plant), workspace) / ugv_speed + handling_time;
}

std::string config_to_json(const GreenhouseConfig& c) {
  nlohmann::ordered_json j;
  j["n_tables"] = c.n_tables;
  j["plants_per_table"] = c.plants_per_table;
  j["batch_labels"] = c.batch_labels;
  j["unit_op_duration"] = c.unit_op_duration;
  nlohmann::ordered_json plants = nlohmann::ordered_json::object();
  for (const auto& [plant, units] : c.counts) {
    auto it = c.batches.find(plant);
    plants[plant] = {{"left", units.left},
                     {"right", units.right},
                     {"batch", it == c.batches.end() ? std::string() : it->second}};
  }
  j["plants"] = plants;
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : c.tables) {
    j["tables"].push_back(nlohmann::ordered_json::array({t.x, t.y}));
  }
  j["workspace"] = nlohmann::ordered_json::array({c.workspace.x, c.workspace.y});
  j["plant_spacing"] = c.plant_spacing;
  j["aisle_offset"] = c.aisle_offset;
  j["ugv_speed"] = c.ugv_speed;
  j["ugv_power"] = c.ugv_power;
  j["mobile_speed"] = c.mobile_speed;
  j["mobile_power"] = c.mobile_power;
  j["mobile_work_power"] = c.mobile_work_power;
  j["manipulation_power"] = c.manipulation_power;
  j["handling_time"] = c.handling_time;
  j["prep_duration"] = c.prep_duration;
  j["ready_duration"] = c.ready_duration;
  j["action_quality"] = c.action_quality;
  return j.dump(2);
}

GreenhouseConfig config_from_json(const std::string& text) {
  GreenhouseConfig c = GreenhouseConfig::defaults();
  try {
    const json j = json::parse(text);
    if (!j.is_object()) {
      throw ValidationError("greenhouse config must be a JSON object");
    }
    auto number = [&](const char* key, double& field) {
      if (j.contains(key)) field = j.at(key).get<double>();
    };
    if (j.contains("n_tables")) c.n_tables = j.at("n_tables").get<std::size_t>();
    if (j.contains("plants_per_table")) c.plants_per_table = j.at("plants_per_table").get<std::size_t>();
    if (j.contains("batch_labels")) c.batch_labels = j.at("batch_labels").get<std::vector<std::string>>();
    number("unit_op_duration", c.unit_op_duration);
    if (j.contains("plants")) {
      c.counts.clear();
      c.batches.clear();
      for (const auto& [plant, spec] : j.at("plants").items()) {
        c.counts[plant] = {spec.at("left").get<int>(), spec.at("right").get<int>()};
        c.batches[plant] = spec.at("batch").get<std::string>();
      }
    }
    if (j.contains("tables")) {
      c.tables.clear();
      for (const auto& t : j.at("tables")) {
        c.tables.push_back(point_from(t));
      }
    } else if (c.tables.size() != c.n_tables) {
      throw ValidationError("table coordinates are required when n_tables changes");
    }
    if (j.contains("workspace")) c.workspace = point_from(j.at("workspace"));
    number("plant_spacing", c.plant_spacing);
    number("aisle_offset", c.aisle_offset);
    number("ugv_speed", c.ugv_speed);
    number("ugv_power", c.ugv_power);
    number("mobile_speed", c.mobile_speed);
    number("mobile_power", c.mobile_power);
    number("mobile_work_power", c.mobile_work_power);
    number("manipulation_power", c.manipulation_power);
    number("handling_time", c.handling_time);
    number("prep_duration", c.prep_duration);
    number("ready_duration", c.ready_duration);
    number("action_quality", c.action_quality);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("greenhouse config: ") + e.what());
  }
  c.validate();
  return c;
}

TreeFragment build_plant_tree(const std::string& plant, const std::string& batch,
                              const GreenhouseConfig& config) {
  auto it = config.counts.find(plant);
  if (it == config.counts.end()) {
    throw ValidationError("unknown plant '" + plant + "'");
  }
  const UnitCounts units = it->second;
  const std::string& x = plant;
  const std::string& a = batch;

  const NodeId o = "o_" + a + "." + x;
  const NodeId prep = a + "_prep." + x;
  const NodeId op = a + "." + x;
  const NodeId ready = a + "_ready." + x;
  const NodeId i = "i_" + a + "." + x;
  const NodeId l = "l_" + a + "." + x;
  const NodeId r = "r_" + a + "." + x;

  TreeFragment f;
  f.root = "plant." + x;
  const NodeId stationary = "stationary." + x;
  const NodeId mobile = "mobile." + x;
  f.nodes.push_back(Node::task(f.root, Qaf::kXor, {stationary, mobile}));
  f.nodes.push_back(Node::task(stationary, Qaf::kAnd, {o, prep, op, ready, i}));
  f.nodes.push_back(Node::task(mobile, Qaf::kAnd, {l, r}));
  for (const auto& id : {o, prep, op, ready, i, l, r}) {
    f.nodes.push_back(Node::action(id));
  }
  f.precedence = {{o, prep}, {prep, op}, {op, ready}, {ready, i}};

  const Point home = config.plant_location(x);
  const Point ws = config.workspace;
  const double transport = config.transport_duration(x);
  const double unit = config.unit_op_duration;
  f.actions[o] = {RobotRole::kUgv, transport, {home, ws}};
  f.actions[prep] = {RobotRole::kStationary, config.prep_duration, {ws, std::nullopt}};
  f.actions[op] = {RobotRole::kStationary, unit * (units.left + units.right), {ws, std::nullopt}};
  f.actions[ready] = {RobotRole::kStationary, config.ready_duration, {ws, std::nullopt}};
  f.actions[i] = {RobotRole::kUgv, transport, {ws, home}};
  f.actions[l] = {RobotRole::kMobile, unit * units.left, {config.left_aisle(x), std::nullopt}};
  f.actions[r] = {RobotRole::kMobile, unit * units.right, {config.right_aisle(x), std::nullopt}};
  return f;
}

void FleetSpec::validate() const {
  if (mobile < 0 || stationary < 0 || ugv < 0 || mobile + stationary + ugv == 0) {
    throw ValidationError("fleet needs at least one robot and no negative counts");
  }
  criteria().validate();
}

FleetSpec setup_fleet(int setup) {
  switch (setup) {
    case 1: return {0, 1, 2, 50.0, 50.0};
    case 2: return {2, 0, 0, 50.0, 50.0};
    case 3: return {1, 1, 1, 0.0, 100.0};
    case 4: return {1, 1, 1, 50.0, 50.0};
    case 5: return {1, 1, 1, 100.0, 0.0};
    default: throw ValidationError("setup must be between 1 and 5, got " + std::to_string(setup));
  }
}

Mission build_mission(const GreenhouseConfig& config, const FleetSpec& fleet) {
  config.validate();
  fleet.validate();

  std::vector<Node> nodes;
  std::vector<Precedence> precedence;
  std::map<NodeId, ActionSpec> specs;
  std::vector<NodeId> plant_roots;
  for (const auto& plant : config.plants()) {
    TreeFragment f = build_plant_tree(plant, config.batches.at(plant), config);
    plant_roots.push_back(f.root);
    nodes.insert(nodes.end(), f.nodes.begin(), f.nodes.end());
    precedence.insert(precedence.end(), f.precedence.begin(), f.precedence.end());
    specs.insert(f.actions.begin(), f.actions.end());
  }
  nodes.insert(nodes.begin(), Node::task("mission", Qaf::kAnd, plant_roots));

  Mission m;
  m.tree = MissionTree(std::move(nodes), "mission", std::move(precedence));
  for (const auto& [id, spec] : specs) {
    m.sites[id] = spec.site;
  }

  auto add_robots = [&](RobotRole role, int count, double speed, double drive, double work) {
    for (int k = 0; k < count; ++k) {
      RobotProfile robot;
      robot.id = role_prefix(role) + std::to_string(k);
      robot.start = config.workspace;
      robot.speed = speed;
      robot.drive_power = drive;
      for (const auto& [id, spec] : specs) {
        if (spec.role == role) {
          robot.outcomes[id] = {config.action_quality, spec.duration, energy_kj(spec.duration, work)};
        }
      }
      m.robots.push_back(std::move(robot));
    }
  };
  add_robots(RobotRole::kMobile, fleet.mobile, config.mobile_speed, config.mobile_power,
             config.mobile_work_power);
  // The arm never leaves the workspace, so its speed only has to be valid.
  add_robots(RobotRole::kStationary, fleet.stationary, config.ugv_speed, 0.0, config.manipulation_power);
  add_robots(RobotRole::kUgv, fleet.ugv, config.ugv_speed, config.ugv_power, config.ugv_power);
  return m;
}

BranchSelection classify_branches(const GreenhouseConfig& config, const std::vector<NodeId>& actions) {
  const std::set<NodeId> chosen(actions.begin(), actions.end());
  BranchSelection out;
  for (const auto& plant : config.plants()) {
    TreeFragment f = build_plant_tree(plant, config.batches.at(plant), config);
    bool stationary = false;
    bool mobile = false;
    for (const auto& [id, spec] : f.actions) {
      if (chosen.contains(id)) {
        (spec.role == RobotRole::kMobile ? mobile : stationary) = true;
      }
    }
    Branch b = stationary && mobile ? Branch::kMixed
               : stationary         ? Branch::kStationary
               : mobile             ? Branch::kMobile
                                    : Branch::kNone;
    out.plants[plant] = b;
    out.stationary += b == Branch::kStationary ? 1 : 0;
    out.mobile += b == Branch::kMobile ? 1 : 0;
  }
  return out;
}

std::string to_string(Branch branch) {
  switch (branch) {
    case Branch::kNone: return "none";
    case Branch::kStationary: return "stationary";
    case Branch::kMobile: return "mobile";
    case Branch::kMixed: return "mixed";
  }
  return "none";
}

}  // namespace mrplan
