#include "refi/graph.hpp"

#include <algorithm>
#include <sstream>

namespace refi::graph {

using surface::ReactiveKind;

bool Node::persistent() const {
  return kind == ReactiveKind::Fold || kind == ReactiveKind::FoldAll || kind == ReactiveKind::Change;
}

bool reads_value(const Node& consumer, std::size_t /*input*/) {
  // A snapshot only needs its trigger to fire and reads the sampled fold's
  // state, not a transient value.
  return consumer.kind != ReactiveKind::Snapshot;
}

int DataflowGraph::find(const std::string& name) const {
  for (const auto& n : nodes) {
    if (n.name == name) return n.id;
  }
  return -1;
}

std::vector<std::vector<int>> DataflowGraph::consumers() const {
  std::vector<std::vector<int>> out(nodes.size());
  for (const auto& n : nodes) {
    for (int in : n.inputs) {
      auto& c = out[static_cast<std::size_t>(in)];
      if (c.empty() || c.back() != n.id) c.push_back(n.id);
    }
  }
  return out;
}

DataflowGraph build_graph(const typer::TypedProgram& tp) {
  DataflowGraph g;
  auto sizes = typer::size_check(tp);
  for (std::size_t i = 0; i < tp.core.defs.size(); ++i) {
    const auto& d = tp.core.defs[i];
    Node n;
    n.id = static_cast<int>(i);
    n.def = static_cast<int>(i);
    n.name = d.name;
    n.kind = d.kind;
    n.type = tp.types[i];
    n.bytes = sizes[i];
    n.span = d.span;
    for (const auto& in : d.inputs) {
      int j = tp.index_of(in);
      if (j < 0 || j >= n.id) throw InternalError("input '" + in + "' of '" + d.name + "' is not defined earlier");
      n.inputs.push_back(j);
    }
    g.nodes.push_back(std::move(n));
  }
  return g;
}

DataflowGraph eliminate_dead(const DataflowGraph& g, std::vector<Diagnostic>* warnings) {
  std::vector<bool> live(g.nodes.size(), false);
  for (auto it = g.nodes.rbegin(); it != g.nodes.rend(); ++it) {
    if (it->kind == ReactiveKind::Observe) live[static_cast<std::size_t>(it->id)] = true;
    if (!live[static_cast<std::size_t>(it->id)]) continue;
    for (int in : it->inputs) live[static_cast<std::size_t>(in)] = true;
  }
  DataflowGraph out;
  std::vector<int> remap(g.nodes.size(), -1);
  for (const auto& n : g.nodes) {
    if (!live[static_cast<std::size_t>(n.id)]) {
      if (warnings) {
        warnings->push_back({Diagnostic::Severity::Warning, n.span,
                             "reactive '" + n.name + "' does not reach any observer and is removed"});
      }
      continue;
    }
    Node m = n;
    m.id = static_cast<int>(out.nodes.size());
    remap[static_cast<std::size_t>(n.id)] = m.id;
    for (int& in : m.inputs) in = remap[static_cast<std::size_t>(in)];
    out.nodes.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conditions

Condition Condition::atom(Atom a) {
  Condition c;
  c.terms_ = {{a}};
  return c;
}

Condition Condition::any_of(const std::vector<Condition>& cs) {
  Condition c;
  for (const auto& x : cs) c.terms_.insert(c.terms_.end(), x.terms_.begin(), x.terms_.end());
  c.normalize();
  return c;
}

Condition Condition::all_of(const std::vector<Condition>& cs) {
  Condition acc;
  acc.terms_ = {{}};
  for (const auto& x : cs) {
    std::vector<std::vector<Atom>> next;
    for (const auto& a : acc.terms_) {
      for (const auto& b : x.terms_) {
        std::vector<Atom> t = a;
        t.insert(t.end(), b.begin(), b.end());
        next.push_back(std::move(t));
      }
    }
    acc.terms_ = std::move(next);
    acc.normalize();
  }
  return acc;
}

void Condition::normalize() {
  for (auto& t : terms_) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
  }
  std::sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
  // Absorption: drop any term that contains a shorter (already kept) term.
  std::vector<std::vector<Atom>> kept;
  for (auto& t : terms_) {
    bool absorbed = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
      return std::includes(t.begin(), t.end(), k.begin(), k.end());
    });
    if (!absorbed) kept.push_back(std::move(t));
  }
  std::sort(kept.begin(), kept.end());
  terms_ = std::move(kept);
}

bool Condition::eval(const std::function<bool(const Atom&)>& value) const {
  for (const auto& t : terms_) {
    if (std::all_of(t.begin(), t.end(), value)) return true;
  }
  return false;
}

std::vector<Atom> Condition::atoms() const {
  std::vector<Atom> out;
  for (const auto& t : terms_) out.insert(out.end(), t.begin(), t.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Condition::implies(const Condition& other) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) {
    return std::any_of(other.terms_.begin(), other.terms_.end(),
                       [&](const auto& u) { return std::includes(t.begin(), t.end(), u.begin(), u.end()); });
  });
}

std::string to_string(const Condition& c, const DataflowGraph& g) {
  std::string out;
  for (std::size_t i = 0; i < c.terms().size(); ++i) {
    if (i) out += " || ";
    const auto& t = c.terms()[i];
    bool paren = c.terms().size() > 1 && t.size() > 1;
    if (paren) out += "(";
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j) out += " && ";
      out += t[j].kind == Atom::Kind::SourceFired ? "fired(" : "passed(";
      out += g.nodes[static_cast<std::size_t>(t[j].node)].name + ")";
    }
    if (paren) out += ")";
  }
  return out;
}

std::vector<Condition> derive_conditions(const DataflowGraph& g) {
  std::vector<Condition> conds;
  conds.reserve(g.nodes.size());
  for (const auto& n : g.nodes) {
    std::vector<Condition> ins;
    for (int in : n.inputs) ins.push_back(conds[static_cast<std::size_t>(in)]);
    switch (n.kind) {
      case ReactiveKind::Source:
        conds.push_back(Condition::atom({Atom::Kind::SourceFired, n.id}));
        break;
      case ReactiveKind::Filter:
        conds.push_back(Condition::all_of({ins[0], Condition::atom({Atom::Kind::FilterPassed, n.id})}));
        break;
      case ReactiveKind::Choice:
      case ReactiveKind::FoldAll:
        conds.push_back(Condition::any_of(ins));
        break;
      case ReactiveKind::Snapshot:
        conds.push_back(ins[0]);
        break;
      default:
        conds.push_back(Condition::all_of(ins));
        break;
    }
  }
  return conds;
}

// ---------------------------------------------------------------------------
// Scheduling and memory

std::vector<int> GroupedSchedule::order() const {
  std::vector<int> out;
  for (const auto& gr : groups) out.insert(out.end(), gr.nodes.begin(), gr.nodes.end());
  return out;
}

GroupedSchedule form_groups(const DataflowGraph& g, const std::vector<Condition>& conds) {
  GroupedSchedule s;
  for (const auto& n : g.nodes) {
    const Condition& c = conds[static_cast<std::size_t>(n.id)];
    if (s.groups.empty() || !(s.groups.back().condition == c)) s.groups.push_back({c, {}});
    s.groups.back().nodes.push_back(n.id);
  }
  return s;
}

ScopeMap compute_scopes(const DataflowGraph& g, const GroupedSchedule& s) {
  ScopeMap m;
  auto order = s.order();
  m.position.assign(g.nodes.size(), -1);
  for (std::size_t p = 0; p < order.size(); ++p) m.position[static_cast<std::size_t>(order[p])] = static_cast<int>(p);
  m.scopes.resize(g.nodes.size());
  for (const auto& n : g.nodes) {
    Scope& sc = m.scopes[static_cast<std::size_t>(n.id)];
    sc.first = sc.last = m.position[static_cast<std::size_t>(n.id)];
    sc.persistent = n.persistent();
  }
  // Walk the order backwards; the first consumer met is the last user.
  std::vector<bool> seen(g.nodes.size(), false);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Node& consumer = g.nodes[static_cast<std::size_t>(*it)];
    for (std::size_t k = 0; k < consumer.inputs.size(); ++k) {
      const int in = consumer.inputs[k];
      if (!reads_value(consumer, k) || seen[static_cast<std::size_t>(in)]) continue;
      seen[static_cast<std::size_t>(in)] = true;
      m.scopes[static_cast<std::size_t>(in)].last = m.position[static_cast<std::size_t>(consumer.id)];
    }
  }
  return m;
}

MemoryReport memory_report(const DataflowGraph& g, const GroupedSchedule& s, const ScopeMap& scopes) {
  MemoryReport r;
  for (const auto& n : g.nodes) {
    if (n.persistent()) r.persistent += n.bytes;
  }
  auto order = s.order();
  for (std::size_t p = 0; p < order.size(); ++p) {
    MemoryPoint pt;
    pt.position = static_cast<int>(p);
    pt.node = g.nodes[static_cast<std::size_t>(order[p])].name;
    for (const auto& n : g.nodes) {
      const Scope& sc = scopes.scopes[static_cast<std::size_t>(n.id)];
      if (!sc.persistent && sc.first <= pt.position && pt.position <= sc.last) pt.transient += n.bytes;
    }
    pt.total = r.persistent + pt.transient;
    r.peak = std::max(r.peak, pt.total);
    r.points.push_back(std::move(pt));
  }
  return r;
}

Json to_json(const MemoryReport& r) {
  Json j = Json::object();
  j["persistent"] = r.persistent;
  j["points"] = Json::array();
  for (const auto& p : r.points) {
    j["points"].push_back({{"position", p.position}, {"node", p.node}, {"transient", p.transient}, {"total", p.total}});
  }
  j["peak"] = r.peak;
  return j;
}

std::string to_dot(const DataflowGraph& g, const std::vector<Condition>& conds, const GroupedSchedule& s) {
  std::ostringstream out;
  out << "digraph refi {\n  rankdir=LR;\n  node [shape=box];\n";
  for (std::size_t gi = 0; gi < s.groups.size(); ++gi) {
    const Group& gr = s.groups[gi];
    out << "  subgraph cluster_" << gi << " {\n";
    out << "    label=\"" << to_string(gr.condition, g) << "\";\n";
    for (int id : gr.nodes) {
      const Node& n = g.nodes[static_cast<std::size_t>(id)];
      out << "    n" << id << " [label=\"" << n.name << "\\n" << surface::kind_name(n.kind) << "\\n"
          << to_string(conds[static_cast<std::size_t>(id)], g) << "\\n" << n.bytes << " B\"";
      if (n.persistent()) out << ", style=rounded";
      out << "];\n";
    }
    out << "  }\n";
  }
  for (const auto& n : g.nodes) {
    for (int in : n.inputs) out << "  n" << in << " -> n" << n.id << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace refi::graph
