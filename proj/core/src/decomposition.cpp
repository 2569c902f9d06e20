#include "mrplan/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "mrplan/errors.hpp"

namespace mrplan {

void Criteria::validate() const {
  for (double w : {alpha, beta, gamma}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("criteria weights must be finite and nonnegative");
    }
  }
  if (std::abs(alpha + beta + gamma - 1.0) > 1e-9) {
    throw ValidationError("criteria weights must sum to 1");
  }
}

Criteria Criteria::from_importance(double makespan_percent, double cost_percent) {
  if (std::abs(makespan_percent + cost_percent - 100.0) > 1e-9) {
    throw ValidationError("importance pair must sum to 100");
  }
  Criteria c{0.0, makespan_percent / 100.0, cost_percent / 100.0};
  c.validate();
  return c;
}

double score(const Outcome& aggregate, const Criteria& criteria) {
  return criteria.alpha * aggregate.quality - criteria.beta * aggregate.duration -
         criteria.gamma * aggregate.cost;
}

Outcome estimate_action(const NodeId& action, std::span<const RobotProfile> robots) {
  Outcome sum;
  std::size_t n = 0;
  for (const auto& robot : robots) {
    if (robot.can_perform(action)) {
      sum += robot.outcome(action);
      ++n;
    }
  }
  if (n == 0) {
    throw InfeasibleError("unservable action '" + action + "': no robot can perform it");
  }
  const auto count = static_cast<double>(n);
  return {sum.quality / count, sum.duration / count, sum.cost / count};
}

bool ranks_before(const Alternative& a, const Alternative& b) {
  if (a.score != b.score) {
    return a.score > b.score;
  }
  return a.actions < b.actions;
}

std::string format_prune_record(const PruneRecord& record) {
  std::ostringstream os;
  os << "node=" << record.task << " candidates=" << record.candidates << " kept=" << record.kept;
  return os.str();
}

namespace {

class Generator {
 public:
  Generator(const MissionTree& tree, std::span<const RobotProfile> robots,
            const DecompositionOptions& options)
      : tree_(tree), robots_(robots), options_(options) {}

  std::vector<Alternative> run(const NodeId& task) {
    auto out = expand(task);
    if (out.empty()) {
      std::string names;
      for (const auto& a : unservable_) {
        names += (names.empty() ? "" : ", ") + a;
      }
      throw InfeasibleError("no servable decomposition of '" + task +
                            "'; unservable actions: " + names);
    }
    return out;
  }

 private:
  std::vector<Alternative> expand(const NodeId& id) {
    const Node& n = tree_.node(id);
    if (n.is_action()) {
      auto est = estimate(id);
      if (!est) {
        return {};
      }
      return {Alternative{{id}, {}, *est, score(*est, options_.criteria)}};
    }

    std::vector<std::vector<Alternative>> children;
    children.reserve(n.children.size());
    for (const auto& child : n.children) {
      children.push_back(expand(child));
    }

    std::vector<Alternative> out;
    std::size_t candidates = 0;
    if (n.qaf == Qaf::kXor) {
      std::size_t total = 0;
      for (const auto& list : children) {
        total += list.size();
      }
      guard(id, total);
      out.reserve(total);
      for (std::size_t i = 0; i < children.size(); ++i) {
        for (auto& alt : children[i]) {
          alt.branches[id] = n.children[i];
          out.push_back(std::move(alt));
        }
      }
      candidates = out.size();
      prune(out);
    } else {
      out = std::move(children.front());
      candidates = out.size();
      for (std::size_t i = 1; i < children.size(); ++i) {
        out = product(id, out, children[i]);
        candidates = out.size();
        prune(out);
      }
      if (children.size() == 1) {
        prune(out);
      }
    }

    if (options_.on_task) {
      options_.on_task(PruneRecord{id, candidates, out.size()});
    }
    return out;
  }

  std::vector<Alternative> product(const NodeId& task, const std::vector<Alternative>& left,
                                   const std::vector<Alternative>& right) {
    guard(task, left.size() * right.size());
    std::vector<Alternative> out;
    out.reserve(left.size() * right.size());
    for (const auto& a : left) {
      for (const auto& b : right) {
        Alternative c;
        c.actions.reserve(a.actions.size() + b.actions.size());
        std::merge(a.actions.begin(), a.actions.end(), b.actions.begin(), b.actions.end(),
                   std::back_inserter(c.actions));
        c.branches = a.branches;
        c.branches.insert(b.branches.begin(), b.branches.end());
        c.aggregate = a.aggregate + b.aggregate;
        c.score = score(c.aggregate, options_.criteria);
        out.push_back(std::move(c));
      }
    }
    return out;
  }

  void prune(std::vector<Alternative>& list) const {
    if (list.size() > options_.mu) {
      std::partial_sort(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(options_.mu),
                        list.end(), ranks_before);
      list.resize(options_.mu);
    } else {
      std::sort(list.begin(), list.end(), ranks_before);
    }
  }

  void guard(const NodeId& task, std::size_t size) const {
    if (size > options_.hard_cap) {
      throw ResourceCapError("task '" + task + "' would combine " + std::to_string(size) +
                             " alternatives (cap " + std::to_string(options_.hard_cap) + ")");
    }
  }

  std::optional<Outcome> estimate(const NodeId& action) {
    if (auto it = cache_.find(action); it != cache_.end()) {
      return it->second;
    }
    std::optional<Outcome> est;
    try {
      est = estimate_action(action, robots_);
    } catch (const InfeasibleError&) {
      unservable_.push_back(action);
    }
    cache_.emplace(action, est);
    return est;
  }

  const MissionTree& tree_;
  std::span<const RobotProfile> robots_;
  const DecompositionOptions& options_;
  std::unordered_map<NodeId, std::optional<Outcome>> cache_;
  std::vector<NodeId> unservable_;
};

}  // namespace

std::vector<Alternative> generate_alternatives(const MissionTree& tree, const NodeId& task,
                                               std::span<const RobotProfile> robots,
                                               const DecompositionOptions& options) {
  options.criteria.validate();
  if (options.mu == 0) {
    throw ValidationError("mu must be at least 1");
  }
  return Generator(tree, robots, options).run(task);
}

std::vector<Alternative> select_top_k(std::span<const Alternative> ordered, std::size_t k) {
  const std::size_t n = std::min(k, ordered.size());
  return {ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace mrplan
