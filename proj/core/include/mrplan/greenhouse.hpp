#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mrplan/decomposition.hpp"
#include "mrplan/task_model.hpp"

namespace mrplan {

struct UnitCounts {
  int left = 0;
  int right = 0;

  friend bool operator==(const UnitCounts&, const UnitCounts&) = default;
};

// Greenhouse layout and work model. Tables stand in a grid, each holding a
// column of plant slots; a plant is named "table.row.column" and row 0 is
// the top slot. Only plants listed in `counts` need tending.
struct GreenhouseConfig {
  std::size_t n_tables = 8;
  std::size_t plants_per_table = 4;
  std::vector<std::string> batch_labels{"A", "B", "C", "D", "E"};
  double unit_op_duration = 10.0;        // s per unit operation
  std::map<std::string, UnitCounts> counts;
  std::map<std::string, std::string> batches;  // plant -> batch label
  std::vector<Point> tables;             // table centers, m
  Point workspace{0.0, 4.0};
  double plant_spacing = 1.0;            // along a table, m
  double aisle_offset = 1.0;             // table center to either aisle, m

  double ugv_speed = 0.5;                // m/s
  double ugv_power = 30.0;               // W
  double mobile_speed = 0.5;
  double mobile_power = 400.0;           // drive power of the mobile base
  double mobile_work_power = 400.0;      // while tending a plant
  double manipulation_power = 0.0;       // stationary arm
  double handling_time = 5.0;            // loading or unloading a plant, s
  double prep_duration = 5.0;
  double ready_duration = 5.0;
  double action_quality = 1.0;

  // Eight tables on a 2 x 4 grid, 20 plants in five batches of four.
  static GreenhouseConfig defaults();

  // Throws ValidationError.
  void validate() const;

  [[nodiscard]] std::vector<std::string> plants() const;  // sorted ids
  [[nodiscard]] Point plant_location(const std::string& plant) const;
  [[nodiscard]] Point left_aisle(const std::string& plant) const;
  [[nodiscard]] Point right_aisle(const std::string& plant) const;
  // Time a UGV needs to carry the plant between its slot and the workspace,
  // including handling.
  [[nodiscard]] double transport_duration(const std::string& plant) const;
};

// JSON object with every config field; absent fields keep their defaults.
std::string config_to_json(const GreenhouseConfig& config);
GreenhouseConfig config_from_json(const std::string& text);

enum class RobotRole { kUgv, kStationary, kMobile };

struct ActionSpec {
  RobotRole role = RobotRole::kUgv;
  double duration = 0.0;
  ActionSite site;
};

struct TreeFragment {
  NodeId root;
  std::vector<Node> nodes;
  std::vector<Precedence> precedence;
  std::map<NodeId, ActionSpec> actions;
};

// XOR "plant.X" over AND "stationary.X" (o_A, A_prep, A, A_ready, i_A in
// sequence) and AND "mobile.X" (l_A, r_A).
TreeFragment build_plant_tree(const std::string& plant, const std::string& batch,
                              const GreenhouseConfig& config);

struct FleetSpec {
  int mobile = 0;
  int stationary = 0;
  int ugv = 0;
  double makespan_importance = 50.0;
  double cost_importance = 50.0;

  void validate() const;
  [[nodiscard]] Criteria criteria() const {
    return Criteria::from_importance(makespan_importance, cost_importance);
  }
};

// Setups 1-5: {1 stationary + 2 UGV, 2 mobile, then 1 + 1 + 1 with
// importance 0-100, 50-50 and 100-0}.
FleetSpec setup_fleet(int setup);

// AND "mission" over every plant tree, plus robots "mobile_<i>",
// "stationary_<i>", "ugv_<i>" starting at the workspace.
Mission build_mission(const GreenhouseConfig& config, const FleetSpec& fleet);

enum class Branch { kNone, kStationary, kMobile, kMixed };

struct BranchSelection {
  std::map<std::string, Branch> plants;
  std::size_t stationary = 0;
  std::size_t mobile = 0;
};

// Which branch of each plant the action set executes.
BranchSelection classify_branches(const GreenhouseConfig& config, const std::vector<NodeId>& actions);

std::string to_string(Branch branch);

}  // namespace mrplan
