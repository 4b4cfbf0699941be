#include "refi/compiler.hpp"

namespace refi {

CompiledProgram analyze(typer::TypedProgram tp) {
  CompiledProgram cp;
  cp.typed = std::make_shared<const typer::TypedProgram>(std::move(tp));
  cp.graph = graph::eliminate_dead(graph::build_graph(*cp.typed), &cp.warnings);
  cp.conditions = graph::derive_conditions(cp.graph);
  cp.schedule = graph::form_groups(cp.graph, cp.conditions);
  cp.scopes = graph::compute_scopes(cp.graph, cp.schedule);
  cp.memory = graph::memory_report(cp.graph, cp.schedule, cp.scopes);
  return cp;
}

typer::TypedProgram check_source(std::string_view source, const surface::SignatureTable& sigs) {
  return typer::typecheck(surface::desugar(surface::parse_program(source)), sigs);
}

CompiledProgram compile_source(std::string_view source, const surface::SignatureTable& sigs) {
  return analyze(check_source(source, sigs));
}

}  // namespace refi
