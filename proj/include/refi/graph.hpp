#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "refi/diagnostics.hpp"
#include "refi/surface.hpp"
#include "refi/typer.hpp"
#include "refi/value.hpp"

namespace refi::graph {

struct Node {
  int id = 0;        // position in DataflowGraph::nodes
  int def = 0;       // index into the typed program's definitions
  std::string name;
  surface::ReactiveKind kind = surface::ReactiveKind::Source;
  std::vector<int> inputs;
  ReactiveType type;
  std::size_t bytes = 0;
  Span span;

  /// Folds, fold-alls and changes keep state across update cycles.
  bool persistent() const;
};

/// Whether `consumer` reads the value of its input number `input` (as
/// opposed to only depending on its firing).
bool reads_value(const Node& consumer, std::size_t input);

/// Nodes in definition order, which is a topological order.
struct DataflowGraph {
  std::vector<Node> nodes;

  int find(const std::string& name) const;  // -1 when absent
  std::vector<std::vector<int>> consumers() const;
};

DataflowGraph build_graph(const typer::TypedProgram& tp);

/// Removes nodes from which no observer is reachable. One warning per
/// removed node is appended to `warnings`.
DataflowGraph eliminate_dead(const DataflowGraph& g, std::vector<Diagnostic>* warnings = nullptr);

// ---------------------------------------------------------------------------
// Conditions

struct Atom {
  enum class Kind { SourceFired, FilterPassed };
  Kind kind = Kind::SourceFired;
  int node = 0;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom& a, const Atom& b) {
    if (a.node != b.node) return a.node <=> b.node;
    return a.kind <=> b.kind;
  }
};

/// Positive boolean formula over atoms, kept in a canonical minimal
/// disjunctive normal form: each term is a sorted, duplicate-free atom set,
/// no term contains another, and terms are sorted.
class Condition {
 public:
  static Condition atom(Atom a);
  static Condition any_of(const std::vector<Condition>& cs);
  static Condition all_of(const std::vector<Condition>& cs);

  const std::vector<std::vector<Atom>>& terms() const { return terms_; }
  bool eval(const std::function<bool(const Atom&)>& value) const;
  /// Every atom mentioned anywhere in the formula.
  std::vector<Atom> atoms() const;
  /// True when every term of *this contains some term of `other`, i.e.
  /// *this implies `other`.
  bool implies(const Condition& other) const;

  friend bool operator==(const Condition&, const Condition&) = default;

 private:
  void normalize();
  std::vector<std::vector<Atom>> terms_;
};

std::string to_string(const Condition& c, const DataflowGraph& g);

/// Condition per node (indexed by node id).
std::vector<Condition> derive_conditions(const DataflowGraph& g);

// ---------------------------------------------------------------------------
// Scheduling

struct Group {
  Condition condition;
  std::vector<int> nodes;
};

struct GroupedSchedule {
  std::vector<Group> groups;

  /// Node ids in execution order.
  std::vector<int> order() const;
};

GroupedSchedule form_groups(const DataflowGraph& g, const std::vector<Condition>& conds);

struct Scope {
  int first = 0;  // position of the node itself
  int last = 0;   // position of its last consumer (itself when unused)
  bool persistent = false;
};

/// Scope per node id; positions index GroupedSchedule::order().
struct ScopeMap {
  std::vector<Scope> scopes;
  std::vector<int> position;  // node id -> position
};

ScopeMap compute_scopes(const DataflowGraph& g, const GroupedSchedule& s);

struct MemoryPoint {
  int position = 0;
  std::string node;
  std::size_t transient = 0;
  std::size_t total = 0;
};

struct MemoryReport {
  std::size_t persistent = 0;
  std::vector<MemoryPoint> points;
  std::size_t peak = 0;
};

MemoryReport memory_report(const DataflowGraph& g, const GroupedSchedule& s, const ScopeMap& scopes);

Json to_json(const MemoryReport& r);

/// Graphviz rendering with one cluster per group; nodes are labeled with
/// kind, condition and byte size.
std::string to_dot(const DataflowGraph& g, const std::vector<Condition>& conds, const GroupedSchedule& s);

}  // namespace refi::graph
