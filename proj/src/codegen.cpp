#include "refi/codegen.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <set>
#include <sstream>

#include "refi/interaction.hpp"
#include "refi/minic.hpp"

namespace refi::codegen {

namespace {

using graph::Atom;
using graph::Condition;
using graph::Node;
using surface::ReactiveKind;

std::string mangle(const TypeTag& t) {
  switch (t.kind) {
    case TypeKind::Int32: return "int32";
    case TypeKind::Bool: return "bool";
    case TypeKind::TimeMs: return "time";
    case TypeKind::MacAddr: return "mac";
    case TypeKind::Bytes: return "bytes" + std::to_string(t.length);
    case TypeKind::Record: {
      std::string s = t.name;
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      return s;
    }
    case TypeKind::Pair: return "pair_" + mangle(t.args[0]) + "_" + mangle(t.args[1]);
    case TypeKind::FixedSet: return "set";
    case TypeKind::FixedMap: return "map";
    case TypeKind::Unit: return "unit";
  }
  return "unit";
}

std::string snake(std::string_view camel) {
  std::string out;
  for (std::size_t i = 0; i < camel.size(); ++i) {
    const char c = camel[i];
    const bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
    if (upper && i > 0 && !std::isupper(static_cast<unsigned char>(camel[i - 1]))) out += '_';
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string c_literal(const Value& v, const TypeTag& t) {
  switch (t.kind) {
    case TypeKind::Int32:
    case TypeKind::TimeMs: {
      const std::int32_t i = v.as_integer();
      if (i == INT32_MIN) return "(-2147483647 - 1)";
      if (i < 0) return "(" + std::to_string(i) + ")";
      return std::to_string(i);
    }
    case TypeKind::Bool: return v.as_bool() ? "true" : "false";
    case TypeKind::MacAddr: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "0x%012" PRIx64 "ULL", v.as_mac().to_u64());
      return buf;
    }
    default: throw InternalError("constant of type " + to_string(t) + " has no C literal");
  }
}

// Names the C side reserves for itself; user functions with these names
// are emitted with a prefix.
const std::set<std::string>& reserved_names() {
  static const std::set<std::string> names{
      "init",       "update",       "main",         "deallocate", "compound_key", "send_to_os",
      "send_frame", "switch_channel", "change_csi", "set_tx_power", "set_tdls",   "runtime_is_triggered",
      "hashset_new", "hashset_add", "hashmap_new",  "hashmap_put", "hashmap_get", "refi_sizeof",
      // C keywords and library functions the compiler knows as builtins.
      "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else", "enum",
      "extern", "float", "for", "goto", "if", "inline", "int", "long", "register", "restrict", "return",
      "short", "signed", "sizeof", "static", "struct", "switch", "typedef", "union", "unsigned", "void",
      "volatile", "while", "bool", "true", "false", "abort", "abs", "calloc", "exit", "free", "labs",
      "malloc", "memcmp", "memcpy", "memmove", "memset", "printf", "puts", "realloc", "strcmp", "strcpy",
      "strlen", "strncmp",
  };
  return names;
}

std::string fn_name(const std::string& name) {
  if (reserved_names().count(name) || name.rfind("refi_", 0) == 0 || name.rfind("runtime_", 0) == 0) {
    return "refi_fn_" + name;
  }
  return name;
}

void visit_expr(const minic::Expr& e, int& set_cap, int& map_cap) {
  if (e.kind == minic::Expr::Kind::Call) {
    if (e.name == "hashset_new" && set_cap < 0) set_cap = e.type.length;
    if (e.name == "hashmap_new" && map_cap < 0) map_cap = e.type.length;
  }
  for (const auto& a : e.args) visit_expr(*a, set_cap, map_cap);
}

void visit_stmts(const std::vector<minic::Stmt>& body, int& set_cap, int& map_cap) {
  for (const auto& s : body) {
    if (s.expr) visit_expr(*s.expr, set_cap, map_cap);
    visit_stmts(s.then_body, set_cap, map_cap);
    visit_stmts(s.else_body, set_cap, map_cap);
  }
}

void read_slots(const minic::Expr& e, std::set<int>& slots) {
  if (e.kind == minic::Expr::Kind::Local) slots.insert(e.slot);
  for (const auto& a : e.args) read_slots(*a, slots);
}

void read_slots(const std::vector<minic::Stmt>& body, std::set<int>& slots) {
  for (const auto& s : body) {
    if (s.expr) read_slots(*s.expr, slots);
    read_slots(s.then_body, slots);
    read_slots(s.else_body, slots);
  }
}

/// `#define` lines for the capacities of collections created in `fn`, and
/// the matching `#undef` lines.
std::pair<std::string, std::string> capacity_macros(const minic::FnIR& fn) {
  int set_cap = -1;
  int map_cap = -1;
  visit_stmts(fn.body, set_cap, map_cap);
  std::string def;
  std::string undef;
  if (set_cap >= 0) {
    def += "#define REFI_SET_CAPACITY " + std::to_string(set_cap) + "\n";
    undef += "#undef REFI_SET_CAPACITY\n";
  }
  if (map_cap >= 0) {
    def += "#define REFI_MAP_CAPACITY " + std::to_string(map_cap) + "\n";
    undef += "#undef REFI_MAP_CAPACITY\n";
  }
  return {def, undef};
}

/// Body text with EFL's `sizeof` renamed to the runtime's cardinality macro.
std::string c_text(const minic::FnIR& fn) {
  std::string raw = fn.raw_body;
  for (auto it = fn.sizeof_offsets.rbegin(); it != fn.sizeof_offsets.rend(); ++it) {
    raw.replace(*it, 6, "refi_sizeof");
  }
  return raw;
}

/// Statement body re-indented to two spaces; the first line of raw_body is
/// already trimmed, later lines keep their relative indentation.
std::string indent_body(const std::string& raw) {
  std::vector<std::string> lines;
  std::istringstream in(raw);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  std::size_t common = std::string::npos;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto first = lines[i].find_first_not_of(" \t");
    if (first != std::string::npos) common = std::min(common, first);
  }
  if (common == std::string::npos) common = 0;
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string l = i == 0 ? lines[i] : (lines[i].size() > common ? lines[i].substr(common) : std::string());
    while (!l.empty() && (l.back() == ' ' || l.back() == '\t' || l.back() == '\r')) l.pop_back();
    out += l.empty() ? "\n" : "  " + l + "\n";
  }
  return out;
}

class Emitter {
 public:
  Emitter(const CompiledProgram& cp, const Options& options)
      : cp_(cp), g_(cp.graph), tp_(*cp.typed), options_(options) {}

  std::string run() {
    std::ostringstream out;
    if (!options_.source_name.empty()) out << "/* Generated by refi from " << options_.source_name << ". */\n";
    out << "#include \"refi_runtime.h\"\n";
    emit_constants(out);
    emit_typedefs(out);
    emit_functions(out);
    emit_state(out);
    emit_init(out);
    emit_update(out);
    return out.str();
  }

 private:
  struct Block {
    Condition cond;
    std::vector<Atom> known;  // atoms true everywhere inside the block
  };

  const Node& node(int id) const { return g_.nodes[static_cast<std::size_t>(id)]; }
  const Condition& cond(int id) const { return cp_.conditions[static_cast<std::size_t>(id)]; }
  const surface::CoreDef& def(int id) const { return cp_.def(node(id)); }
  static std::string value(const Node& n) { return n.name + "_value"; }

  // ---- file-level sections ----

  void emit_constants(std::ostream& out) const {
    const auto& user = tp_.constants.user_constants();
    if (user.empty()) return;
    out << "\n";
    for (const auto& c : user) out << "#define " << c.name << " " << c_literal(c.value, c.type) << "\n";
  }

  void collect_type(const TypeTag& t, std::vector<std::pair<std::string, std::string>>& defs) const {
    if (t.kind == TypeKind::Pair) {
      collect_type(t.args[0], defs);
      collect_type(t.args[1], defs);
      std::string name = c_type(t);
      std::string body = "typedef struct {\n  " + c_type(t.args[0]) + " fst;\n  " + c_type(t.args[1]) + " snd;\n} " +
                         name + ";\n";
      add_typedef(defs, name, body);
    } else if (t.kind == TypeKind::Bytes && t.length != minic::kCompoundKeyBytes && t.length != kOpaquePayloadBytes) {
      std::string name = c_type(t);
      add_typedef(defs, name, "typedef struct {\n  uint8_t data[" + std::to_string(t.length) + "];\n} " + name + ";\n");
    } else if (t.kind == TypeKind::FixedSet || t.kind == TypeKind::FixedMap) {
      for (const auto& a : t.args) collect_type(a, defs);
    }
  }

  static void add_typedef(std::vector<std::pair<std::string, std::string>>& defs, const std::string& name,
                          std::string body) {
    for (const auto& d : defs) {
      if (d.first == name) return;
    }
    defs.emplace_back(name, std::move(body));
  }

  std::vector<std::string> used_functions() const {
    std::set<std::string> used;
    for (const auto& n : g_.nodes) {
      for (const auto& f : def(n.id).fns) used.insert(f);
    }
    std::vector<std::string> out;
    for (const auto& f : tp_.core.functions) {
      if (used.count(f.name)) out.push_back(f.name);
    }
    return out;
  }

  void emit_typedefs(std::ostream& out) const {
    std::vector<std::pair<std::string, std::string>> defs;
    for (const auto& n : g_.nodes) {
      if (!n.type.is_observer()) collect_type(n.type.inner, defs);
    }
    for (const auto& f : used_functions()) {
      const auto& sig = tp_.function(f).signature;
      for (const auto& p : sig.params) collect_type(p, defs);
      collect_type(sig.result, defs);
    }
    for (const auto& [name, body] : defs) out << "\n" << body;
  }

  void emit_functions(std::ostream& out) const {
    for (const auto& name : used_functions()) {
      const auto& fn = tp_.function(name);
      auto [def, undef] = capacity_macros(fn);
      out << "\n" << def;
      out << "static " << c_type(fn.signature.result) << " " << fn_name(name) << "(";
      std::set<int> used;
      read_slots(fn.body, used);
      for (std::size_t i = 0; i < fn.param_names.size(); ++i) {
        if (i) out << ", ";
        out << c_type(fn.signature.params[i]) << " " << fn.param_names[i];
        if (!used.count(static_cast<int>(i))) out << " REFI_UNUSED";
      }
      if (fn.param_names.empty()) out << "void";
      out << ") {\n";
      if (fn.expression_body) {
        out << "  return " << c_text(fn) << ";\n";
      } else {
        out << indent_body(c_text(fn));
      }
      out << "}\n" << undef;
    }
  }

  void emit_state(std::ostream& out) const {
    bool any = false;
    for (const auto& n : g_.nodes) {
      if (!n.persistent()) continue;
      if (!any) out << "\n";
      any = true;
      out << "static " << c_type(n.type.inner) << " " << value(n) << ";\n";
    }
  }

  void emit_init(std::ostream& out) const {
    std::ostringstream helpers;
    std::ostringstream body;
    for (const auto& n : g_.nodes) {
      if (!n.persistent()) continue;
      const auto& init = tp_.inits[static_cast<std::size_t>(n.def)];
      if (!init) throw InternalError("stateful reactive '" + n.name + "' has no initial value");
      auto [def, undef] = capacity_macros(*init);
      std::string expr;
      if (init->expression_body) {
        expr = c_text(*init);
      } else {
        helpers << "\n" << def << "static " << c_type(init->signature.result) << " " << init->name << "(void) {\n"
                << indent_body(c_text(*init)) << "}\n" << undef;
        def.clear();
        undef.clear();
        expr = init->name + "()";
      }
      body << def;
      if (n.kind == ReactiveKind::Change) {
        body << "  " << value(n) << ".fst = " << expr << ";\n";
        body << "  " << value(n) << ".snd = " << value(n) << ".fst;\n";
      } else {
        body << "  " << value(n) << " = " << expr << ";\n";
      }
      body << undef;
    }
    out << helpers.str();
    out << "\nvoid init(void) {\n" << body.str() << "}\n";
  }

  // ---- update() ----

  std::string source_condition(int id) const {
    const auto& spec = def(id).source;
    std::string base = snake(source_kind_name(spec.kind));
    if (spec.kind == SourceKind::Timer) base += "_" + std::to_string(spec.period_ms) + "ms";
    std::string name = base + "_condition";
    for (const auto& n : g_.nodes) {
      if (n.kind == ReactiveKind::Filter && n.name + "_condition" == name) return "source_" + name;
    }
    return name;
  }

  std::string source_id(int id) const {
    const auto& spec = def(id).source;
    if (spec.kind == SourceKind::Timer) return "TIMER(" + std::to_string(spec.period_ms) + ")";
    return std::string(source_kind_name(spec.kind));
  }

  std::string payload_call(int id) const {
    const auto& spec = def(id).source;
    const char* fn = "runtime_payload_frame";
    switch (spec.kind) {
      case SourceKind::ScanResult:
      case SourceKind::ChannelState:
      case SourceKind::IOCTL: fn = "runtime_payload_bytes64"; break;
      case SourceKind::TxPower: fn = "runtime_payload_int32"; break;
      case SourceKind::Timer: fn = "runtime_payload_time"; break;
      default: break;
    }
    return std::string(fn) + "(" + source_id(id) + ")";
  }

  std::string atom_name(const Atom& a) const {
    if (a.kind == Atom::Kind::SourceFired) return source_condition(a.node);
    return node(a.node).name + "_condition";
  }

  /// Guard expression for `c`, dropping atoms known to hold in the current
  /// block and factoring out atoms common to every term.
  std::string render(const Condition& c) const {
    const auto& known = stack_.back().known;
    std::vector<std::vector<Atom>> terms;
    for (const auto& t : c.terms()) {
      std::vector<Atom> rest;
      for (const auto& a : t) {
        if (!std::binary_search(known.begin(), known.end(), a)) rest.push_back(a);
      }
      terms.push_back(std::move(rest));
    }
    std::vector<Atom> common = terms.front();
    for (const auto& t : terms) {
      std::vector<Atom> next;
      std::set_intersection(common.begin(), common.end(), t.begin(), t.end(), std::back_inserter(next));
      common = std::move(next);
    }
    std::vector<std::string> parts;
    for (const auto& a : common) parts.push_back(atom_name(a));
    std::vector<std::string> alternatives;
    bool trivial = false;
    for (const auto& t : terms) {
      std::vector<std::string> conj;
      for (const auto& a : t) {
        if (!std::binary_search(common.begin(), common.end(), a)) conj.push_back(atom_name(a));
      }
      if (conj.empty()) trivial = true;
      std::string s;
      for (std::size_t i = 0; i < conj.size(); ++i) s += (i ? " && " : "") + conj[i];
      if (conj.size() > 1 && terms.size() > 1) s = "(" + s + ")";
      alternatives.push_back(std::move(s));
    }
    if (!trivial) {
      std::string alt;
      for (std::size_t i = 0; i < alternatives.size(); ++i) alt += (i ? " || " : "") + alternatives[i];
      if (alternatives.size() > 1 && !parts.empty()) alt = "(" + alt + ")";
      parts.push_back(std::move(alt));
    }
    if (parts.empty()) return "true";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " && " : "") + parts[i];
    return out;
  }

  void line(const std::string& text) { body_ << std::string(2 * stack_.size(), ' ') << text << "\n"; }

  void open(const Condition& c, const std::string& header) {
    line(header);
    Block b;
    b.cond = c;
    b.known = stack_.back().known;
    if (c.terms().size() == 1) {
      b.known.insert(b.known.end(), c.terms()[0].begin(), c.terms()[0].end());
      std::sort(b.known.begin(), b.known.end());
      b.known.erase(std::unique(b.known.begin(), b.known.end()), b.known.end());
    }
    stack_.push_back(std::move(b));
  }

  void close() {
    stack_.pop_back();
    line("}");
  }

  /// Ends the static scope of a transient value right after its last read.
  void release(int id) { line("deallocate(" + value(node(id)) + ");"); }

  void release_after(const Node& n) {
    const int pos = cp_.scopes.position[static_cast<std::size_t>(n.id)];
    std::vector<int> done;
    for (std::size_t k = 0; k < n.inputs.size(); ++k) {
      const int in = n.inputs[k];
      const Node& src = node(in);
      if (!graph::reads_value(n, k) || src.persistent()) continue;
      if (std::find(done.begin(), done.end(), in) != done.end()) continue;
      if (cp_.scopes.scopes[static_cast<std::size_t>(in)].last != pos) continue;
      done.push_back(in);
      release(in);
    }
    if (!n.persistent() && !n.type.is_observer() && cp_.scopes.scopes[static_cast<std::size_t>(n.id)].last == pos) {
      release(n.id);
    }
  }

  std::string args_of(const Node& n) const {
    std::string s;
    for (std::size_t i = 0; i < n.inputs.size(); ++i) s += (i ? ", " : "") + value(node(n.inputs[i]));
    return s;
  }

  void emit_node(const Node& n) {
    const auto& d = def(n.id);
    switch (n.kind) {
      case ReactiveKind::Source:
        line(value(n) + " = " + payload_call(n.id) + ";");
        break;
      case ReactiveKind::Filter:
        line(value(n) + " = " + value(node(n.inputs[0])) + ";");
        break;
      case ReactiveKind::Map:
        line(value(n) + " = " + fn_name(d.fns[0]) + "(" + args_of(n) + ");");
        break;
      case ReactiveKind::Fold:
        line(value(n) + " = " + fn_name(d.fns[0]) + "(" + value(n) + ", " + args_of(n) + ");");
        break;
      case ReactiveKind::FoldAll:
        for (std::size_t arm = 0; arm < n.inputs.size(); ++arm) {
          const Node& in = node(n.inputs[arm]);
          line("if (" + render(cond(in.id)) + ") {");
          line("  " + value(n) + " = " + fn_name(d.fns[arm]) + "(" + value(n) + ", " + value(in) + ");");
          line("}");
        }
        break;
      case ReactiveKind::Choice: {
        const Node& l = node(n.inputs[0]);
        const Node& r = node(n.inputs[1]);
        line("if (" + render(cond(l.id)) + ") {");
        line("  " + value(n) + " = " + value(l) + ";");
        line("} else if (" + render(cond(r.id)) + ") {");
        line("  " + value(n) + " = " + value(r) + ";");
        line("}");
        break;
      }
      case ReactiveKind::Snapshot:
        line(value(n) + " = " + value(node(n.inputs[1])) + ";");
        break;
      case ReactiveKind::Change:
        line("/* change: " + value(n) + " holds (current, previous) */");
        line(value(n) + ".snd = " + value(n) + ".fst;");
        line(value(n) + ".fst = " + value(node(n.inputs[0])) + ";");
        break;
      case ReactiveKind::Observe:
        line(effect_call(d.effect) + "(" + value(node(n.inputs[0])) + ");");
        break;
    }
    release_after(n);
  }

  static std::string effect_call(EffectKind e) {
    switch (e) {
      case EffectKind::SendFrame: return "send_frame";
      case EffectKind::SwitchChannel: return "switch_channel";
      case EffectKind::ChangeCSI: return "change_csi";
      case EffectKind::SetTxPower: return "set_tx_power";
      case EffectKind::SendToOS: return "send_to_os";
      case EffectKind::SetTDLS: return "set_tdls";
    }
    return "send_to_os";
  }

  void emit_update(std::ostream& out) {
    std::vector<std::string> source_vars;
    std::vector<std::pair<std::string, std::string>> source_inits;
    for (const auto& n : g_.nodes) {
      if (n.kind != ReactiveKind::Source) continue;
      auto name = source_condition(n.id);
      if (std::find(source_vars.begin(), source_vars.end(), name) != source_vars.end()) continue;
      source_vars.push_back(name);
      source_inits.emplace_back(name, "runtime_is_triggered(" + source_id(n.id) + ")");
    }

    out << "\nvoid update(void) {\n";
    for (const auto& v : source_vars) out << "  bool " << v << ";\n";
    for (const auto& n : g_.nodes) {
      if (n.kind == ReactiveKind::Filter) out << "  bool " << n.name << "_condition = false;\n";
    }
    for (const auto& n : g_.nodes) {
      if (n.persistent() || n.type.is_observer()) continue;
      out << "  " << c_type(n.type.inner) << " " << value(n) << ";\n";
    }
    out << "\n";
    for (const auto& [name, call] : source_inits) out << "  " << name << " = " << call << ";\n";

    stack_.clear();
    stack_.push_back(Block{Condition::all_of({}), {}});
    for (const auto& group : cp_.schedule.groups) emit_group(group);
    while (stack_.size() > 1) close();
    out << body_.str() << "}\n";
  }

  void emit_group(const graph::Group& group) {
    const Node& head = node(group.nodes.front());
    const Condition& c = group.condition;
    while (stack_.size() > 1 && !c.implies(stack_.back().cond)) close();
    body_ << "\n";
    if (head.kind == ReactiveKind::Filter) {
      const Node& in = node(head.inputs[0]);
      if (!(stack_.back().cond == cond(in.id))) open(cond(in.id), "if (" + render(cond(in.id)) + ") {");
      line(head.name + "_condition = " + fn_name(def(head.id).fns[0]) + "(" + value(in) + ");");
      open(c, "if (" + head.name + "_condition) {");
    } else if (!(stack_.back().cond == c)) {
      open(c, "if (" + render(c) + ") {");
    }
    for (int id : group.nodes) emit_node(node(id));
  }

  const CompiledProgram& cp_;
  const graph::DataflowGraph& g_;
  const typer::TypedProgram& tp_;
  const Options& options_;
  std::vector<Block> stack_;
  std::ostringstream body_;
};

}  // namespace

std::string c_type(const TypeTag& t) {
  switch (t.kind) {
    case TypeKind::Int32: return "int32_t";
    case TypeKind::Bool: return "bool";
    case TypeKind::TimeMs: return "time_ms_t";
    case TypeKind::MacAddr: return "mac_addr_t";
    case TypeKind::Bytes: return "bytes" + std::to_string(t.length) + "_t";
    case TypeKind::Record:
    case TypeKind::Pair: return mangle(t) + "_t";
    case TypeKind::FixedSet: return "hashset_t";
    case TypeKind::FixedMap: return "hashmap_t";
    case TypeKind::Unit: return "refi_unit_t";
  }
  return "refi_unit_t";
}

std::string emit_c(const CompiledProgram& cp, const Options& options) {
  return Emitter(cp, options).run();
}

}  // namespace refi::codegen
