#include "chainunify/propagation_graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace chainunify {

std::string_view to_string(ArcLabel label) {
  switch (label) {
    case ArcLabel::Cons: return "cons";
    case ArcLabel::Bc: return "bc";
    case ArcLabel::Db: return "db";
  }
  return "?";
}

std::string OccurCheckCycle::to_string() const {
  std::string out = steps.empty() ? std::string() : steps.front().from;
  for (const auto& s : steps) {
    out += s.forward ? " >" : " <";
    out += chainunify::to_string(s.label);
    out += " " + s.to;
  }
  return out;
}

std::string PropagationGraph::find(const std::string& v) const {
  auto it = parent_.find(v);
  if (it == parent_.end()) return v;
  std::string cur = v;
  while (true) {
    const std::string& p = parent_.at(cur);
    if (p == cur) return cur;
    cur = p;
  }
}

std::string PropagationGraph::class_of(const std::string& var) const { return find(var); }

PropagationGraph PropagationGraph::build(const std::vector<Equation>& equations) {
  PropagationGraph gr;
  auto add = [&](const Term& t) {
    if (t->is_var() && t->sort() == Sort::List) gr.parent_.emplace(t->name(), t->name());
  };
  for (const auto& e : equations) {
    if (!e.is_list()) continue;
    add(e.lhs);
    for (const auto& a : e.rhs->args()) add(a);
    if (e.rhs->is_var()) add(e.rhs);
  }
  for (const auto& e : equations) {
    if (e.shape != Shape::VarVarL) continue;
    std::string a = gr.find(e.lhs->name());
    std::string b = gr.find(e.rhs->name());
    if (a == b) continue;
    if (b < a) std::swap(a, b);
    gr.parent_[b] = a;
  }
  // Path compression so that later lookups are one hop.
  for (auto& [v, p] : gr.parent_) p = gr.find(v);

  for (const auto& e : equations) {
    ArcLabel label;
    switch (e.shape) {
      case Shape::Cons: label = ArcLabel::Cons; break;
      case Shape::Bc: label = ArcLabel::Bc; break;
      case Shape::Db: label = ArcLabel::Db; break;
      default: continue;
    }
    const Term& target = e.shape == Shape::Cons ? e.rhs->arg(1) : e.rhs->arg(0);
    gr.arcs_.push_back(Arc{gr.find(e.lhs->name()), label, gr.find(target->name()), e});
  }

  std::deque<std::string> work;
  for (const auto& arc : gr.arcs_) {
    if (arc.label == ArcLabel::Cons && gr.nonnil_.insert(arc.from).second) work.push_back(arc.from);
  }
  while (!work.empty()) {
    std::string c = work.front();
    work.pop_front();
    for (const auto& arc : gr.arcs_) {
      if (arc.label == ArcLabel::Cons) continue;
      if (arc.from == c && gr.nonnil_.insert(arc.to).second) work.push_back(arc.to);
      if (arc.to == c && gr.nonnil_.insert(arc.from).second) work.push_back(arc.from);
    }
  }
  return gr;
}

std::vector<std::string> PropagationGraph::classes() const {
  std::set<std::string> reps;
  for (const auto& [v, p] : parent_) reps.insert(p);
  return {reps.begin(), reps.end()};
}

std::vector<std::string> PropagationGraph::members(const std::string& rep) const {
  std::vector<std::string> out;
  for (const auto& [v, p] : parent_) {
    if (p == rep) out.push_back(v);
  }
  return out;
}

std::vector<const Arc*> PropagationGraph::outgoing(const std::string& rep) const {
  std::vector<const Arc*> out;
  for (const auto& arc : arcs_) {
    if (arc.from == rep) out.push_back(&arc);
  }
  return out;
}

std::optional<OccurCheckCycle> PropagationGraph::occur_check() const {
  // Neighbours in the mixed graph: cons arcs forward only, chaining edges
  // both ways. Forward moves are listed first so that reported cycles follow
  // arc directions where possible.
  auto neighbours = [&](const std::string& c) {
    std::vector<CycleStep> out;
    for (const auto& arc : arcs_) {
      if (arc.from == c) out.push_back(CycleStep{c, arc.label, true, arc.to});
    }
    for (const auto& arc : arcs_) {
      if (arc.label != ArcLabel::Cons && arc.to == c) {
        out.push_back(CycleStep{c, arc.label, false, arc.from});
      }
    }
    return out;
  };

  std::vector<const Arc*> cons_arcs;
  for (const auto& arc : arcs_) {
    if (arc.label == ArcLabel::Cons) cons_arcs.push_back(&arc);
  }
  std::sort(cons_arcs.begin(), cons_arcs.end(), [](const Arc* a, const Arc* b) {
    return std::tie(a->from, a->to) < std::tie(b->from, b->to);
  });

  for (const Arc* ca : cons_arcs) {
    // Shortest path from the cons target back to its source.
    std::map<std::string, CycleStep> via;
    std::deque<std::string> queue{ca->to};
    std::set<std::string> seen{ca->to};
    bool found = ca->to == ca->from;
    while (!queue.empty() && !found) {
      std::string c = queue.front();
      queue.pop_front();
      for (const auto& step : neighbours(c)) {
        if (!seen.insert(step.to).second) continue;
        via.emplace(step.to, step);
        if (step.to == ca->from) {
          found = true;
          break;
        }
        queue.push_back(step.to);
      }
    }
    if (!found) continue;
    std::vector<CycleStep> back;
    for (std::string c = ca->from; c != ca->to;) {
      const CycleStep& s = via.at(c);
      back.push_back(s);
      c = s.from;
    }
    std::reverse(back.begin(), back.end());
    std::vector<CycleStep> steps{CycleStep{ca->from, ArcLabel::Cons, true, ca->to}};
    steps.insert(steps.end(), back.begin(), back.end());
    auto least = std::min_element(steps.begin(), steps.end(), [](const auto& a, const auto& b) {
      return a.from < b.from;
    });
    std::rotate(steps.begin(), least, steps.end());
    return OccurCheckCycle{std::move(steps)};
  }
  return std::nullopt;
}

bool PropagationGraph::related(Relation relation, const std::string& from,
                               const std::string& to) const {
  const std::string src = find(from);
  const std::string dst = find(to);
  const bool reflexive = relation != Relation::CPlus;
  if (reflexive && src == dst) return true;
  auto usable = [&](ArcLabel l) {
    switch (relation) {
      case Relation::BcStar: return l == ArcLabel::Bc;
      case Relation::DbStar: return l == ArcLabel::Db;
      default: return l != ArcLabel::Cons;
    }
  };
  const bool undirected = relation == Relation::CSimStar;
  std::set<std::string> seen;
  std::deque<std::string> queue{src};
  // For the transitive (non-reflexive) case the source is only "reached"
  // after following at least one arc.
  while (!queue.empty()) {
    std::string c = queue.front();
    queue.pop_front();
    for (const auto& arc : arcs_) {
      if (!usable(arc.label)) continue;
      std::string next;
      if (arc.from == c) {
        next = arc.to;
      } else if (undirected && arc.to == c) {
        next = arc.from;
      } else {
        continue;
      }
      if (next == dst) return true;
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return false;
}

std::string PropagationGraph::class_label(const std::string& rep) const {
  auto ms = members(rep);
  if (ms.empty()) ms.push_back(rep);
  std::string out = "[";
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (i) out += ", ";
    out += ms[i];
  }
  return out + "]";
}

std::string PropagationGraph::dump() const {
  std::ostringstream os;
  for (const auto& arc : arcs_) {
    os << class_label(arc.from) << " -" << to_string(arc.label) << "-> " << class_label(arc.to)
       << " via " << to_string(arc.witness) << '\n';
  }
  return os.str();
}

}  // namespace chainunify
