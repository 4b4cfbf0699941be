// Command-line driver: check, compile, run, mem-report, graph, sim.
//
// Exit codes: 0 success, 1 user error (bad program, trace, or scenario),
// 2 usage error or internal failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "refi/codegen.hpp"
#include "refi/compiler.hpp"
#include "refi/interp.hpp"
#include "refi/sim.hpp"
#include "refi/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write '" + path + "'");
  return out;
}

/// Signatures come from --sigs, or from a `.sig` file next to the program.
refi::surface::SignatureTable load_sigs(const std::string& program, const std::string& sigs) {
  std::string path = sigs;
  if (path.empty()) {
    auto sibling = fs::path(program).replace_extension(".sig");
    if (fs::exists(sibling)) path = sibling.string();
  }
  if (path.empty()) return {};
  try {
    return refi::surface::parse_signature_table(slurp(path));
  } catch (const refi::CompileError& e) {
    throw UserError(path + ":" + e.what());
  }
}

void print_warnings(const refi::CompiledProgram& cp, const std::string& file) {
  for (const auto& w : cp.warnings) std::cerr << refi::format(w, file) << "\n";
}

struct Common {
  std::string file;
  std::string sigs;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("file", c.file, "ReactiFi program (.rfi)")->required();
  cmd->add_option("--sigs", c.sigs, "signature table (default: <file>.sig when present)");
}

refi::CompiledProgram compile(const Common& c) {
  return refi::compile_source(slurp(c.file), load_sigs(c.file, c.sigs));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ReactiFi compiler, interpreter and trace simulator"};
  app.require_subcommand(1);

  Common check_opts;
  auto* check = app.add_subcommand("check", "parse, type-check and size-check a program");
  add_common(check, check_opts);

  Common compile_opts;
  std::string emit_c;
  auto* compile_cmd = app.add_subcommand("compile", "emit C for the firmware runtime");
  add_common(compile_cmd, compile_opts);
  compile_cmd->add_option("--emit-c", emit_c, "output .c file")->required();

  Common run_opts;
  std::string trace_path;
  std::string effects_path;
  bool use_oracle = false;
  auto* run = app.add_subcommand("run", "execute a program on a trace");
  add_common(run, run_opts);
  run->add_option("--trace", trace_path, "input trace (JSON lines)")->required();
  run->add_option("--effects", effects_path, "output effect log (JSON lines)")->required();
  run->add_flag("--oracle", use_oracle, "use the literal reference semantics instead of the scheduled runtime");

  Common mem_opts;
  auto* mem = app.add_subcommand("mem-report", "print the static memory report as JSON");
  add_common(mem, mem_opts);

  Common graph_opts;
  std::string dot_path;
  auto* graph_cmd = app.add_subcommand("graph", "write the grouped dataflow graph in Graphviz format");
  add_common(graph_cmd, graph_opts);
  graph_cmd->add_option("--dot", dot_path, "output .dot file")->required();

  std::string scenario;
  std::string config_path;
  std::string out_path;
  auto* sim_cmd = app.add_subcommand("sim", "generate a synthetic trace");
  sim_cmd->add_option("scenario", scenario, "counting or filesharing")
      ->required()
      ->check(CLI::IsMember({"counting", "filesharing"}));
  sim_cmd->add_option("--config", config_path, "scenario JSON (fields override the defaults)");
  sim_cmd->add_option("--out", out_path, "output trace (JSON lines)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string current_file;
  try {
    if (*check) {
      current_file = check_opts.file;
      auto cp = compile(check_opts);
      print_warnings(cp, current_file);
      std::cout << "ok: " << cp.graph.nodes.size() << " reactives in " << cp.schedule.groups.size() << " groups, "
                << cp.memory.persistent << " persistent bytes, peak " << cp.memory.peak << " bytes\n";
    } else if (*compile_cmd) {
      current_file = compile_opts.file;
      auto cp = compile(compile_opts);
      print_warnings(cp, current_file);
      refi::codegen::Options options;
      options.source_name = fs::path(compile_opts.file).filename().string();
      open_out(emit_c) << refi::codegen::emit_c(cp, options);
    } else if (*run) {
      current_file = run_opts.file;
      auto cp = compile(run_opts);
      print_warnings(cp, current_file);
      std::ifstream in(trace_path);
      if (!in) throw UserError("cannot open '" + trace_path + "'");
      auto trace = refi::trace_io::read_trace(in);
      refi::interp::RunStats stats;
      auto log = use_oracle ? refi::interp::oracle_run(*cp.typed, trace, &stats)
                            : refi::interp::run_trace(cp, trace, &stats);
      auto out = open_out(effects_path);
      refi::trace_io::write_effects(out, log);
      for (const auto& e : stats.errors) {
        std::cerr << "cycle at t=" << e.t_ms << " ms aborted: " << e.message << "\n";
      }
    } else if (*mem) {
      current_file = mem_opts.file;
      auto cp = compile(mem_opts);
      print_warnings(cp, current_file);
      std::cout << refi::graph::to_json(cp.memory).dump(2) << "\n";
    } else if (*graph_cmd) {
      current_file = graph_opts.file;
      auto cp = compile(graph_opts);
      print_warnings(cp, current_file);
      open_out(dot_path) << refi::graph::to_dot(cp.graph, cp.conditions, cp.schedule);
    } else if (*sim_cmd) {
      const bool counting = scenario == "counting";
      auto params = counting ? refi::sim::default_counting_scenario() : refi::sim::default_filesharing_scenario();
      if (!config_path.empty()) {
        refi::Json j;
        try {
          j = refi::Json::parse(slurp(config_path));
        } catch (const refi::Json::parse_error& e) {
          throw UserError(config_path + ": " + e.what());
        }
        params = refi::sim::scenario_from_json(j, params);
      }
      refi::sim::apply_seed_override(params);
      auto records = counting ? refi::sim::gen_counting_trace(params) : refi::sim::gen_filesharing_trace(params);
      auto out = open_out(out_path);
      refi::trace_io::write_trace(out, records);
    }
  } catch (const refi::CompileError& e) {
    std::cerr << refi::format({refi::Diagnostic::Severity::Error, e.span(), e.message()}, current_file) << "\n";
    return 1;
  } catch (const refi::interp::TraceError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
