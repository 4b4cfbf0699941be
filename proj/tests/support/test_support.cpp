#include "test_support.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "refi/frame.hpp"
#include "refi/sim.hpp"

namespace fs = std::filesystem;

namespace refi::testing {

std::string corpus_path(const std::string& name) { return std::string(REFI_CORPUS_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

surface::SignatureTable load_corpus_sigs(const std::string& stem) {
  const auto path = corpus_path(stem + ".sig");
  if (!fs::exists(path)) return {};
  return surface::parse_signature_table(read_file(path));
}

CompiledProgram load_corpus_program(const std::string& stem) {
  return compile_source(read_file(corpus_path(stem + ".rfi")), load_corpus_sigs(stem));
}

std::vector<CorpusScenario> corpus_scenarios() {
  std::vector<CorpusScenario> out;
  for (const auto& entry : fs::directory_iterator(corpus_path("scenarios"))) {
    if (entry.path().extension() != ".json") continue;
    const auto name = entry.path().stem().string();
    const auto kind = name.substr(0, name.find('_'));
    if (kind != "counting" && kind != "filesharing") continue;
    out.push_back({name, kind, entry.path().string()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::vector<trace_io::TraceRecord> corpus_trace(const CorpusScenario& s) {
  const bool counting = s.kind == "counting";
  auto base = counting ? sim::default_counting_scenario() : sim::default_filesharing_scenario();
  auto params = sim::scenario_from_json(Json::parse(read_file(s.path)), base);
  return counting ? sim::gen_counting_trace(params) : sim::gen_filesharing_trace(params);
}

// ---------------------------------------------------------------------------
// Oracles

namespace {

std::uint64_t mac_at(const std::vector<std::uint8_t>& raw, std::size_t off) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 6; ++i) v = (v << 8) | raw.at(off + i);
  return v;
}

std::vector<std::uint8_t> unhex(const std::string& s) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoi(s.substr(i, 2), nullptr, 16)));
  }
  return out;
}

}  // namespace

RawFrameView view_frame(const Json& payload) {
  const auto raw = unhex(payload.at("raw").get<std::string>());
  RawFrameView v;
  v.fc0 = raw.at(6);
  v.fc1 = raw.at(7);
  v.addr1 = mac_at(raw, 10);
  v.addr2 = mac_at(raw, 16);
  v.addr3 = mac_at(raw, 22);
  v.signal = payload.at("signal").get<std::int32_t>();
  v.noise = payload.at("noise").get<std::int32_t>();
  return v;
}

std::vector<int> distinct_senders_per_window(const std::vector<trace_io::TraceRecord>& trace, int window_ms) {
  std::int32_t horizon = 0;
  std::map<int, std::set<std::uint64_t>> senders;
  for (const auto& rec : trace) {
    horizon = std::max(horizon, rec.t_ms);
    for (const auto& f : rec.firings) {
      if (f.source != "Monitor") continue;
      const auto v = view_frame(f.payload);
      if (((v.fc0 >> 2) & 0x3) != 0) continue;  // not a management frame
      senders[rec.t_ms / window_ms + 1].insert(v.addr2);
    }
  }
  std::vector<int> out;
  for (int k = 1; static_cast<std::int64_t>(k) * window_ms <= horizon; ++k) {
    out.push_back(static_cast<int>(senders[k].size()));
  }
  return out;
}

std::vector<int> channel_hops(int horizon_ms, int tick_ms) {
  std::vector<int> out;
  int c = 0;
  for (int t = tick_ms; t <= horizon_ms; t += tick_ms) {
    c = c % 20 + 1;
    out.push_back(c);
  }
  return out;
}

std::vector<Decision> tdls_decisions(const std::vector<trace_io::TraceRecord>& trace, std::uint64_t receiver) {
  std::int32_t count = 0;
  // key: (sender address, relayed?)
  std::map<std::pair<std::uint64_t, bool>, std::int32_t> avg;
  auto get = [&](std::uint64_t who, bool relayed) {
    auto it = avg.find({who, relayed});
    return it == avg.end() ? INT32_MIN : it->second;
  };
  std::vector<Decision> out;
  for (const auto& rec : trace) {
    for (const auto& f : rec.firings) {
      if (f.source != "Monitor") continue;
      const auto v = view_frame(f.payload);
      const bool to_ds = v.fc1 & 0x01;
      const bool from_ds = v.fc1 & 0x02;
      if (to_ds && from_ds) continue;
      const std::uint64_t dst = to_ds ? v.addr3 : v.addr1;
      const std::uint64_t src = from_ds ? v.addr3 : v.addr2;
      if (dst != receiver) continue;
      ++count;
      const bool data = ((v.fc0 >> 2) & 0x3) == 2;
      if (!data) continue;
      const bool relayed = from_ds;
      const std::int32_t snr = v.signal - v.noise;
      auto it = avg.find({src, relayed});
      if (it == avg.end()) {
        avg[{src, relayed}] = snr;
      } else {
        it->second = it->second + (snr - it->second) / count;
      }
      out.push_back({rec.t_ms, get(src, false) > get(src, true)});
    }
  }
  return out;
}

std::size_t instrumented_peak_bytes(const CompiledProgram& cp, const interp::Trace& trace) {
  const auto& nodes = cp.graph.nodes;
  const auto order = cp.schedule.order();
  std::vector<int> pos(nodes.size());
  for (std::size_t p = 0; p < order.size(); ++p) pos[static_cast<std::size_t>(order[p])] = static_cast<int>(p);

  std::size_t persistent = 0;
  std::vector<int> last(nodes.size());
  for (const auto& n : nodes) {
    last[static_cast<std::size_t>(n.id)] = pos[static_cast<std::size_t>(n.id)];
    if (n.kind == surface::ReactiveKind::Fold || n.kind == surface::ReactiveKind::FoldAll ||
        n.kind == surface::ReactiveKind::Change) {
      persistent += n.bytes;
    }
  }
  for (const auto& n : nodes) {
    for (std::size_t k = 0; k < n.inputs.size(); ++k) {
      if (n.kind == surface::ReactiveKind::Snapshot && k == 0) continue;  // trigger only
      auto& l = last[static_cast<std::size_t>(n.inputs[k])];
      l = std::max(l, pos[static_cast<std::size_t>(n.id)]);
    }
  }
  auto transient = [&](const graph::Node& n) {
    return !(n.kind == surface::ReactiveKind::Fold || n.kind == surface::ReactiveKind::FoldAll ||
             n.kind == surface::ReactiveKind::Change || n.kind == surface::ReactiveKind::Observe);
  };
  std::vector<std::size_t> live_at(order.size(), persistent);
  for (const auto& n : nodes) {
    if (!transient(n)) continue;
    for (int p = pos[static_cast<std::size_t>(n.id)]; p <= last[static_cast<std::size_t>(n.id)]; ++p) {
      live_at[static_cast<std::size_t>(p)] += n.bytes;
    }
  }

  std::map<int, int> node_of_def;
  for (const auto& n : nodes) node_of_def[n.def] = n.id;
  std::size_t peak = 0;
  interp::Probe probe = [&](std::uint64_t, int def, bool triggered) {
    if (!triggered) return;
    auto it = node_of_def.find(def);
    if (it == node_of_def.end()) return;
    peak = std::max(peak, live_at[static_cast<std::size_t>(pos[static_cast<std::size_t>(it->second)])]);
  };
  interp::oracle_run(*cp.typed, trace, nullptr, probe);
  return peak;
}

// ---------------------------------------------------------------------------
// Random programs

namespace {

enum class VT { Int, Time, Frame, Pair };

const char* type_text(VT t) {
  switch (t) {
    case VT::Int: return "Int32";
    case VT::Time: return "TimeMs";
    case VT::Frame: return "Frame";
    case VT::Pair: return "Pair[Int32, Int32]";
  }
  return "?";
}

struct GenNode {
  std::string name;
  VT type;
  bool stateful;  // fold, fold-all or change
};

struct Param {
  std::string name;
  VT type;
};

class Generator {
 public:
  Generator(std::uint64_t seed, RandomProgramOptions opts) : rng_(seed), opts_(opts) {}

  RandomProgram run() {
    RandomProgram out;
    const int target = pick(3, std::max(3, opts_.max_reactives));
    int count = 0;
    while (count < target - 1) {
      if (nodes_.empty() || pick(0, 5) == 0) {
        add_source();
        ++count;
        continue;
      }
      const int kind = pick(0, 7);
      bool made = false;
      switch (kind) {
        case 0: made = add_map(); break;
        case 1: made = add_filter(); break;
        case 2: made = add_fold(); break;
        case 3: made = add_fold_all(); break;
        case 4: made = add_choice(); break;
        case 5: made = add_snapshot(); break;
        case 6: made = add_change(); break;
        case 7: made = add_observe(); break;
      }
      if (made) ++count;
    }
    add_observe(true);
    out.source = src_.str();
    out.trace = make_trace();
    return out;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(int percent) { return pick(0, 99) < percent; }
  const GenNode& any_node() { return nodes_[static_cast<std::size_t>(pick(0, static_cast<int>(nodes_.size()) - 1))]; }

  std::string fresh() { return "r" + std::to_string(next_++); }

  void define(const std::string& name, VT type, bool stateful, const std::string& rhs) {
    src_ << "val " << name << " = " << rhs << "\n";
    nodes_.push_back({name, type, stateful});
  }

  std::string int_leaf(const std::vector<Param>& ps) {
    if (ps.empty() || chance(25)) return std::to_string(pick(0, 20));
    const auto& p = ps[static_cast<std::size_t>(pick(0, static_cast<int>(ps.size()) - 1))];
    switch (p.type) {
      case VT::Int:
      case VT::Time: return p.name;
      case VT::Pair: return p.name + (chance(50) ? ".fst" : ".snd");
      case VT::Frame: {
        static const std::array<const char*, 8> fields = {"snr",      "signal",  "noise", "seq_ctl",
                                                          "duration", "type",    "sub_type", "ds_type"};
        return p.name + "." + fields[static_cast<std::size_t>(pick(0, fields.size() - 1))];
      }
    }
    return "0";
  }

  std::string int_expr(const std::vector<Param>& ps, int depth) {
    if (depth == 0 || chance(30)) return int_leaf(ps);
    switch (pick(0, 6)) {
      case 0: return "(" + int_expr(ps, depth - 1) + " + " + int_expr(ps, depth - 1) + ")";
      case 1: return "(" + int_expr(ps, depth - 1) + " - " + int_expr(ps, depth - 1) + ")";
      case 2: return "(" + int_expr(ps, depth - 1) + " * " + int_expr(ps, depth - 1) + ")";
      case 3: return "(" + int_expr(ps, depth - 1) + " % " + std::to_string(pick(1, 9)) + ")";
      case 4: return "(" + int_expr(ps, depth - 1) + " / " + std::to_string(pick(1, 9)) + ")";
      case 5: return "(-" + int_expr(ps, depth - 1) + ")";
      default:
        return "(" + bool_expr(ps, depth - 1) + " ? " + int_expr(ps, depth - 1) + " : " + int_expr(ps, depth - 1) +
               ")";
    }
  }

  std::string bool_expr(const std::vector<Param>& ps, int depth) {
    static const std::array<const char*, 6> cmps = {"<", ">", "==", "!=", "<=", ">="};
    const auto lhs = int_expr(ps, std::min(depth, 1));
    auto rhs = int_expr(ps, std::min(depth, 1));
    if (rhs == lhs) rhs = std::to_string(pick(0, 20));  // C compilers reject self-comparisons under -Werror
    std::string e = lhs + " " + cmps[static_cast<std::size_t>(pick(0, 5))] + " " + rhs;
    if (depth > 0 && chance(25)) e = "(" + e + ") " + (chance(50) ? "&&" : "||") + " (" + bool_expr(ps, 0) + ")";
    if (chance(10)) e = "!(" + e + ")";
    return e;
  }

  /// A total function body returning Int32.
  std::string int_body(const std::vector<Param>& ps) {
    if (chance(20)) {
      return "{ int t = " + int_expr(ps, 2) + "; if (" + bool_expr(ps, 1) + ") { t = t + " +
             std::to_string(pick(1, 5)) + "; } return t; }";
    }
    return "{ " + int_expr(ps, 3) + " }";
  }

  std::string lambda(const std::vector<Param>& ps, const std::string& result, const std::string& body) {
    std::string s = "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (i) s += ", ";
      s += ps[i].name + ": " + type_text(ps[i].type);
    }
    return s + "): " + result + " => " + body;
  }

  void add_source() {
    const auto name = fresh();
    switch (pick(0, 2)) {
      case 0: define(name, VT::Int, false, "Source(TxPower)"); break;
      case 1: define(name, VT::Frame, false, "Source(Monitor)"); break;
      default: {
        static const std::array<int, 3> periods = {10, 20, 50};
        define(name, VT::Time, false,
               "Source(Timer(" + std::to_string(periods[static_cast<std::size_t>(pick(0, 2))]) + "ms))");
      }
    }
  }

  bool add_map() {
    const int arity = pick(1, std::min<int>(3, static_cast<int>(nodes_.size())));
    std::vector<std::string> inputs;
    std::vector<Param> ps;
    std::set<std::string> used;
    for (int i = 0; i < arity; ++i) {
      const auto& n = any_node();
      if (!used.insert(n.name).second) continue;
      inputs.push_back(n.name);
      ps.push_back({"a" + std::to_string(ps.size()), n.type});
    }
    std::string target = inputs.size() == 1 ? inputs[0] : "(";
    if (inputs.size() > 1) {
      for (std::size_t i = 0; i < inputs.size(); ++i) target += (i ? ", " : "") + inputs[i];
      target += ")";
    }
    define(fresh(), VT::Int, false, target + ".map(" + lambda(ps, "Int32", int_body(ps)) + ")");
    return true;
  }

  bool add_filter() {
    const auto n = any_node();
    std::vector<Param> ps{{"v", n.type}};
    define(fresh(), n.type, false, n.name + ".filter(" + lambda(ps, "Bool", "{ " + bool_expr(ps, 2) + " }") + ")");
    return true;
  }

  bool add_fold() {
    const auto n = any_node();
    std::vector<Param> ps{{"acc", VT::Int}, {"x", n.type}};
    define(fresh(), VT::Int, true,
           n.name + ".fold({ " + std::to_string(pick(0, 9)) + " })(" + lambda(ps, "Int32", int_body(ps)) + ")");
    return true;
  }

  bool add_fold_all() {
    if (nodes_.size() < 2) return false;
    const int arms = pick(2, std::min<int>(3, static_cast<int>(nodes_.size())));
    std::set<std::string> used;
    std::string rhs = "fold({ " + std::to_string(pick(0, 9)) + " })(";
    int made = 0;
    for (int i = 0; i < arms; ++i) {
      const auto n = any_node();
      if (!used.insert(n.name).second) continue;
      std::vector<Param> ps{{"acc", VT::Int}, {"x", n.type}};
      rhs += std::string(made ? ", " : "") + n.name + " -> " + lambda(ps, "Int32", int_body(ps));
      ++made;
    }
    if (made < 2) return false;
    define(fresh(), VT::Int, true, rhs + ")");
    return true;
  }

  bool add_choice() {
    for (int attempt = 0; attempt < 8; ++attempt) {
      const auto a = any_node();
      const auto b = any_node();
      if (a.name == b.name || a.type != b.type) continue;
      define(fresh(), a.type, false, a.name + " || " + b.name);
      return true;
    }
    return false;
  }

  bool add_snapshot() {
    std::vector<GenNode> folds;
    for (const auto& n : nodes_) {
      if (n.stateful) folds.push_back(n);
    }
    if (folds.empty()) return false;
    const auto sampled = folds[static_cast<std::size_t>(pick(0, static_cast<int>(folds.size()) - 1))];
    const auto trigger = any_node();
    define(fresh(), sampled.type, false, trigger.name + ".snapshot(" + sampled.name + ")");
    return true;
  }

  bool add_change() {
    std::vector<GenNode> ints;
    for (const auto& n : nodes_) {
      if (n.type == VT::Int) ints.push_back(n);
    }
    if (ints.empty()) return false;
    const auto n = ints[static_cast<std::size_t>(pick(0, static_cast<int>(ints.size()) - 1))];
    define(fresh(), VT::Pair, true, n.name + ".change(" + std::to_string(pick(0, 9)) + ")");
    return true;
  }

  bool add_observe(bool force_last = false) {
    const auto n = force_last ? nodes_.back() : any_node();
    const char* effect = (n.type == VT::Int && chance(30)) ? "SetTxPower" : "SendToOS";
    src_ << n.name << ".observe(" << effect << ")\n";
    return true;
  }

  interp::Trace make_trace() {
    interp::Trace trace;
    const int batches = pick(0, opts_.max_batches);
    std::int32_t t = pick(0, 3);
    for (int i = 0; i < batches; ++i) {
      interp::EventBatch b;
      b.t_ms = t;
      if (chance(50)) {
        b.firings.push_back({{SourceKind::TxPower, 0}, Value::int32(pick(-100, 100))});
      }
      if (chance(60)) {
        b.firings.push_back({{SourceKind::Monitor, 0}, random_frame()});
      }
      trace.push_back(std::move(b));
      t += pick(1, 15);
    }
    return trace;
  }

  Value random_frame() {
    frame::Frame f;
    f.fc_type = pick(0, 2);
    f.sub_type = pick(0, 15);
    const int ds = pick(0, 2);
    f.to_ds = ds == 1;
    f.from_ds = ds == 2;
    f.retry = chance(20);
    f.duration = pick(0, 400);
    f.seq_ctl = pick(0, 65535);
    f.src = MacAddr::from_u64(0x020000000000ULL + static_cast<std::uint64_t>(pick(1, 4)));
    f.dst = MacAddr::from_u64(0x020000000000ULL + static_cast<std::uint64_t>(pick(1, 4)));
    f.bssid = MacAddr::from_u64(0x0200000000FEULL);
    const auto raw = frame::serialize_frame(f);
    frame::RxInfo rx{pick(-90, -20), pick(-100, -85)};
    auto decoded = frame::decode_frame(raw, rx);
    if (!decoded) throw std::logic_error("random frame failed to decode");
    return frame::to_value(*decoded);
  }

  std::mt19937_64 rng_;
  RandomProgramOptions opts_;
  std::ostringstream src_;
  std::vector<GenNode> nodes_;
  int next_ = 1;
};

}  // namespace

RandomProgram random_program(std::uint64_t seed, const RandomProgramOptions& options) {
  return Generator(seed, options).run();
}

// ---------------------------------------------------------------------------
// Emitted C

bool have_c_compiler() { return std::string(REFI_C_COMPILER).size() > 0; }

std::optional<std::string> c_syntax_errors(const std::string& c_source) {
  if (!have_c_compiler()) throw std::runtime_error("no C compiler configured");
  static std::atomic<int> counter{0};
  const auto dir = fs::temp_directory_path();
  const auto stem = "refi_check_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const auto c_file = dir / (stem + ".c");
  const auto log_file = dir / (stem + ".log");
  {
    std::ofstream out(c_file, std::ios::binary);
    out << c_source;
  }
  const std::string cmd = std::string(REFI_C_COMPILER) + " -fsyntax-only -Wall -Wextra -Werror -std=gnu11 -I" +
                          REFI_RUNTIME_INCLUDE + " " + c_file.string() + " > " + log_file.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  std::string log = fs::exists(log_file) ? read_file(log_file.string()) : "";
  fs::remove(c_file);
  fs::remove(log_file);
  if (rc == 0) return std::nullopt;
  return log.empty() ? "compiler exited with status " + std::to_string(rc) : log;
}

namespace {

std::vector<std::string> update_body(const std::string& c_source) {
  std::istringstream in(c_source);
  std::vector<std::string> lines;
  std::string line;
  bool inside = false;
  while (std::getline(in, line)) {
    if (!inside) {
      if (line.rfind("void update(void)", 0) == 0) inside = true;
      continue;
    }
    if (line == "}") break;
    lines.push_back(line);
  }
  return lines;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  return s.substr(b);
}

bool mentions(const std::string& line, const std::string& ident) {
  std::size_t at = 0;
  while ((at = line.find(ident, at)) != std::string::npos) {
    const bool left_ok = at == 0 || !(std::isalnum(static_cast<unsigned char>(line[at - 1])) || line[at - 1] == '_');
    const auto end = at + ident.size();
    const bool right_ok =
        end >= line.size() || !(std::isalnum(static_cast<unsigned char>(line[end])) || line[end] == '_');
    if (left_ok && right_ok) return true;
    at = end;
  }
  return false;
}

/// Variable assigned by a statement line (`x = ...;` or `x.f = ...;`).
std::string assigned(const std::string& stmt) {
  static const std::regex re(R"(^([A-Za-z_][A-Za-z0-9_]*)(\.[a-z]+)? = )");
  std::smatch m;
  if (std::regex_search(stmt, m, re)) return m[1];
  return "";
}

}  // namespace

std::vector<std::string> deallocation_violations(const std::string& c_source, const CompiledProgram& cp) {
  std::vector<std::string> out;
  const auto body = update_body(c_source);
  if (body.empty()) {
    out.push_back("no update() function");
    return out;
  }
  for (const auto& n : cp.graph.nodes) {
    if (n.persistent() || n.kind == surface::ReactiveKind::Observe) continue;
    // Mangled names are not recomputed here; the declaration line tells us
    // which identifier the emitter chose for this node.
    std::string var;
    for (const auto& line : body) {
      const auto s = trim(line);
      static const std::regex decl(R"(^[A-Za-z_][A-Za-z0-9_]* ([A-Za-z_][A-Za-z0-9_]*_value);$)");
      std::smatch m;
      if (std::regex_match(s, m, decl)) {
        const std::string v = m[1];
        const auto suffix = n.name + "_value";
        if (v.size() >= suffix.size() && v.compare(v.size() - suffix.size(), std::string::npos, suffix) == 0) {
          var = v;
          break;
        }
      }
    }
    if (var.empty()) {
      out.push_back(n.name + ": no declaration in update()");
      continue;
    }
    const std::string dealloc = "deallocate(" + var + ");";
    std::vector<std::size_t> deallocs;
    std::size_t last_mention = 0;
    bool seen = false;
    bool declared = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
      const auto s = trim(body[i]);
      if (s == dealloc) {
        deallocs.push_back(i);
        continue;
      }
      if (!mentions(s, var)) continue;
      if (!declared) {
        declared = true;  // the declaration
        continue;
      }
      last_mention = i;
      seen = true;
    }
    if (deallocs.size() != 1) {
      out.push_back(var + ": " + std::to_string(deallocs.size()) + " deallocations");
      continue;
    }
    const auto d = deallocs[0];
    if (!seen) {
      out.push_back(var + ": never assigned");
      continue;
    }
    if (last_mention > d) {
      out.push_back(var + ": used after deallocation at line " + std::to_string(last_mention));
      continue;
    }
    const auto consumer = assigned(trim(body[last_mention]));
    for (std::size_t i = last_mention + 1; i < d; ++i) {
      const auto s = trim(body[i]);
      if (s.empty() || s == "}" || s.rfind("deallocate(", 0) == 0) continue;
      if (s.rfind("} else if (", 0) == 0 || s == "} else {") continue;
      if (s.rfind("if (", 0) == 0 && s.back() == '{') continue;
      if (!consumer.empty() && assigned(s) == consumer) continue;
      out.push_back(var + ": '" + s + "' between last use and deallocation");
      break;
    }
  }
  return out;
}

int group_guard_count(const std::string& c_source, const CompiledProgram& cp) {
  int ifs = 0;
  for (const auto& line : update_body(c_source)) {
    const auto s = trim(line);
    if (s.rfind("if (", 0) == 0) ++ifs;
  }
  for (const auto& n : cp.graph.nodes) {
    if (n.kind == surface::ReactiveKind::FoldAll) ifs -= static_cast<int>(n.inputs.size());
    if (n.kind == surface::ReactiveKind::Choice) ifs -= 1;
  }
  return ifs;
}

std::vector<HeaderVector> header_vectors() {
  std::vector<HeaderVector> out;
  const std::uint8_t patterns[4][2] = {{0x0, 0x00}, {0x4, 0x08}, {0x8, 0x5c}, {0xf, 0xfc}};
  std::mt19937 rng(42);
  for (int type = 0; type < 4; ++type) {
    for (int ds = 0; ds < 4; ++ds) {
      for (const auto& p : patterns) {
        HeaderVector v;
        v.fc0 = static_cast<std::uint8_t>((p[0] << 4) | (type << 2) | (out.size() % 4));
        v.fc1 = static_cast<std::uint8_t>(p[1] | ds);
        v.raw.resize(frame::kMinLength);
        for (auto& b : v.raw) b = static_cast<std::uint8_t>(rng());
        v.raw[6] = v.fc0;
        v.raw[7] = v.fc1;
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

std::vector<std::string> header_vector_mismatches(const std::vector<HeaderVector>& vectors) {
  std::vector<std::string> out;
  const frame::RxInfo rx{-40, -95};
  for (const auto& v : vectors) {
    std::ostringstream tag;
    tag << "fc0=0x" << std::hex << int(v.fc0) << " fc1=0x" << int(v.fc1) << ": ";
    auto miss = [&](const std::string& what) { out.push_back(tag.str() + what); };
    const auto f = frame::decode_frame(v.raw, rx);
    const bool to_ds = v.fc1 & 1;
    const bool from_ds = (v.fc1 >> 1) & 1;
    const int type = (v.fc0 >> 2) & 3;
    const int sub_type = v.fc0 >> 4;
    if (to_ds && from_ds) {
      if (f) miss("four-address frame was accepted");
      if (frame::parse_frame(v.raw, rx)) miss("parse_frame accepted a four-address frame");
      continue;
    }
    if (!f) {
      miss("not decoded");
      continue;
    }
    if (f->version != (v.fc0 & 3)) miss("version");
    if (f->fc_type != type) miss("type");
    if (f->sub_type != sub_type) miss("sub_type");
    if (f->to_ds != to_ds || f->from_ds != from_ds) miss("ds bits");
    const bool flags[6] = {f->more_frags, f->retry, f->pwr_mngmt, f->more_data, f->protected_, f->order};
    for (int bit = 2; bit < 8; ++bit) {
      if (flags[bit - 2] != bool((v.fc1 >> bit) & 1)) miss("flag bit " + std::to_string(bit));
    }
    if (f->duration != (v.raw[8] | (v.raw[9] << 8))) miss("duration");
    if (f->seq_ctl != (v.raw[28] | (v.raw[29] << 8))) miss("seq_ctl");
    if (f->signal != rx.signal || f->noise != rx.noise || f->snr != rx.signal - rx.noise) miss("snr");

    const auto a1 = MacAddr::from_u64(mac_at(v.raw, 10)), a2 = MacAddr::from_u64(mac_at(v.raw, 16)),
               a3 = MacAddr::from_u64(mac_at(v.raw, 22));
    std::int32_t ds_type = 0;
    MacAddr dst, src, bssid;
    if (from_ds) {
      ds_type = frame::kFromAp;
      dst = a1, bssid = a2, src = a3;
    } else if (to_ds) {
      ds_type = frame::kToAp;
      bssid = a1, src = a2, dst = a3;
    } else {
      ds_type = frame::kFromTdls;
      dst = a1, src = a2, bssid = a3;
    }
    if (f->ds_type != ds_type) miss("ds_type");
    if (f->dst != dst || f->src != src || f->bssid != bssid) miss("addresses");

    int cls = frame::kOther;
    if (type == 0) cls = frame::kManagement;
    if (type == 1) cls = frame::kControl;
    if (type == 2) cls = from_ds ? frame::kFromApToDst : (to_ds ? frame::kFromSrcToAp : frame::kFromSrcToDst);
    if (f->type != cls) miss("class");

    const bool plain_data = type == 2 && sub_type == 0;
    if (frame::parse_frame(v.raw, rx).has_value() != plain_data) miss("parse_frame acceptance");
  }
  return out;
}

std::string cli_path() { return REFI_CLI_PATH; }

}  // namespace refi::testing
