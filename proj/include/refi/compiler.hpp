#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "refi/diagnostics.hpp"
#include "refi/graph.hpp"
#include "refi/surface.hpp"
#include "refi/typer.hpp"

namespace refi {

/// Everything the back ends need: the typed program plus all static
/// analyses over its (dead-code-free) dataflow graph.
struct CompiledProgram {
  std::shared_ptr<const typer::TypedProgram> typed;
  graph::DataflowGraph graph;
  std::vector<graph::Condition> conditions;  // by node id
  graph::GroupedSchedule schedule;
  graph::ScopeMap scopes;
  graph::MemoryReport memory;
  std::vector<Diagnostic> warnings;

  const graph::Node& node(int id) const { return graph.nodes[static_cast<std::size_t>(id)]; }
  const surface::CoreDef& def(const graph::Node& n) const {
    return typed->core.defs[static_cast<std::size_t>(n.def)];
  }
};

/// Runs the analyses on an already type-checked program.
CompiledProgram analyze(typer::TypedProgram tp);

/// Front end plus analyses: parse, desugar, typecheck, analyze.
CompiledProgram compile_source(std::string_view source, const surface::SignatureTable& sigs = {});

/// Parse, desugar and typecheck only.
typer::TypedProgram check_source(std::string_view source, const surface::SignatureTable& sigs = {});

}  // namespace refi
