#include "refi/interp.hpp"

#include <algorithm>
#include <set>

#include "refi/minic.hpp"

namespace refi::interp {

using surface::ReactiveKind;

Trace schedule_timers(const Trace& external, const std::vector<int>& timer_periods) {
  std::map<std::int32_t, EventBatch> merged;
  std::int32_t last = INT32_MIN;
  for (const auto& b : external) {
    if (b.t_ms < last) {
      throw TraceError("trace timestamps must be nondecreasing (" + std::to_string(b.t_ms) + " after " +
                       std::to_string(last) + ")");
    }
    last = b.t_ms;
    EventBatch& m = merged[b.t_ms];
    m.t_ms = b.t_ms;
    for (const auto& f : b.firings) {
      if (f.source.kind == SourceKind::Timer) {
        throw TraceError("t=" + std::to_string(b.t_ms) + ": timer firings are generated by the runtime");
      }
      for (const auto& g : m.firings) {
        if (g.source == f.source) {
          throw TraceError("t=" + std::to_string(b.t_ms) + ": source " + to_string(f.source) + " fires twice");
        }
      }
      m.firings.push_back(f);
    }
  }
  if (!merged.empty()) {
    const std::int64_t horizon = merged.rbegin()->first;
    for (int p : timer_periods) {
      for (std::int64_t t = p; t <= horizon; t += p) {
        EventBatch& m = merged[static_cast<std::int32_t>(t)];
        m.t_ms = static_cast<std::int32_t>(t);
        m.firings.push_back({SourceSpec{SourceKind::Timer, p}, Value::time_ms(static_cast<std::int32_t>(t))});
      }
    }
  }
  Trace out;
  out.reserve(merged.size());
  for (auto& [t, b] : merged) out.push_back(std::move(b));
  return out;
}

std::vector<int> timer_periods(const typer::TypedProgram& tp) {
  std::set<int> periods;
  for (const auto& d : tp.core.defs) {
    if (d.kind == ReactiveKind::Source && d.source.kind == SourceKind::Timer) periods.insert(d.source.period_ms);
  }
  return {periods.begin(), periods.end()};
}

Json to_json(const EffectRecord& r) {
  Json j = Json::object();
  j["t_ms"] = r.t_ms;
  j["effect"] = std::string(effect_name(r.effect));
  j["value"] = to_json(r.value, r.type);
  return j;
}

namespace {

const Value* find_payload(const EventBatch& batch, const SourceSpec& spec) {
  for (const auto& f : batch.firings) {
    if (f.source == spec) return &f.payload;
  }
  return nullptr;
}

Value initial_state(const typer::TypedProgram& tp, std::size_t def) {
  const auto& d = tp.core.defs[def];
  Value v = minic::eval_fn(*tp.inits[def], {}, tp.constants);
  return d.kind == ReactiveKind::Change ? Value::pair(v, v) : v;
}

Value call_checked(const typer::TypedProgram& tp, const std::string& fn, const std::vector<Value>& args,
                   RunStats& stats) {
  const minic::FnIR& ir = tp.function(fn);
  ++stats.function_calls;
  Value out = minic::eval_fn(ir, args, tp.constants);
  if (!conforms(out, ir.signature.result)) {
    throw InternalError("function '" + fn + "' returned " + debug_string(out) + ", which is not a " +
                        to_string(ir.signature.result));
  }
  return out;
}

void finish_cycle(RunStats& stats, std::uint64_t checks) {
  ++stats.cycles;
  stats.max_checks_per_cycle = std::max(stats.max_checks_per_cycle, checks);
}

}  // namespace

// ---------------------------------------------------------------------------
// Grouped runtime

Runtime::Runtime(const CompiledProgram& program) : program_(program), state_(program.graph.nodes.size()) {
  for (const auto& n : program_.graph.nodes) {
    if (n.persistent()) state_[static_cast<std::size_t>(n.id)] = initial_state(*program_.typed, static_cast<std::size_t>(n.def));
  }
}

std::optional<Value> Runtime::state(const std::string& node) const {
  int id = program_.graph.find(node);
  if (id < 0) return std::nullopt;
  return state_[static_cast<std::size_t>(id)];
}

EffectLog Runtime::step(const EventBatch& batch) {
  const auto& g = program_.graph;
  const auto& tp = *program_.typed;
  const std::size_t n = g.nodes.size();
  const auto saved = state_;
  std::vector<bool> triggered(n, false);
  std::vector<bool> passed(n, false);
  std::vector<std::optional<Value>> values(n);
  EffectLog effects;
  std::uint64_t checks = 0;

  auto atom_value = [&](const graph::Atom& a) {
    const graph::Node& node = g.nodes[static_cast<std::size_t>(a.node)];
    if (a.kind == graph::Atom::Kind::FilterPassed) return static_cast<bool>(passed[static_cast<std::size_t>(a.node)]);
    return find_payload(batch, program_.def(node).source) != nullptr;
  };
  auto value_of = [&](int id) -> const Value& {
    const auto idx = static_cast<std::size_t>(id);
    if (g.nodes[idx].persistent()) return *state_[idx];
    if (!values[idx]) throw InternalError("value of '" + g.nodes[idx].name + "' read in a cycle where it did not trigger");
    return *values[idx];
  };

  try {
    for (const auto& group : program_.schedule.groups) {
      const graph::Node& head = g.nodes[static_cast<std::size_t>(group.nodes.front())];
      ++checks;
      if (head.kind == ReactiveKind::Filter) {
        // The guard is cond(input) && predicate, evaluated lazily.
        const int in = head.inputs[0];
        if (!program_.conditions[static_cast<std::size_t>(in)].eval(atom_value)) continue;
        const auto& d = program_.def(head);
        bool ok = call_checked(tp, d.fns[0], {value_of(in)}, stats_).as_bool();
        passed[static_cast<std::size_t>(head.id)] = ok;
        if (!ok) continue;
      } else if (!group.condition.eval(atom_value)) {
        continue;
      }

      for (int id : group.nodes) {
        const auto idx = static_cast<std::size_t>(id);
        const graph::Node& node = g.nodes[idx];
        const auto& d = program_.def(node);
        triggered[idx] = true;
        switch (node.kind) {
          case ReactiveKind::Source:
            values[idx] = *find_payload(batch, d.source);
            break;
          case ReactiveKind::Filter:
            values[idx] = value_of(node.inputs[0]);
            break;
          case ReactiveKind::Map: {
            std::vector<Value> args;
            for (int in : node.inputs) args.push_back(value_of(in));
            values[idx] = call_checked(tp, d.fns[0], args, stats_);
            break;
          }
          case ReactiveKind::Fold: {
            std::vector<Value> args{*state_[idx]};
            for (int in : node.inputs) args.push_back(value_of(in));
            state_[idx] = call_checked(tp, d.fns[0], args, stats_);
            break;
          }
          case ReactiveKind::FoldAll:
            for (std::size_t arm = 0; arm < node.inputs.size(); ++arm) {
              ++stats_.inner_checks;
              ++checks;
              const int in = node.inputs[arm];
              if (!triggered[static_cast<std::size_t>(in)]) continue;
              state_[idx] = call_checked(tp, d.fns[arm], {*state_[idx], value_of(in)}, stats_);
            }
            break;
          case ReactiveKind::Choice:
            ++stats_.inner_checks;
            ++checks;
            values[idx] = triggered[static_cast<std::size_t>(node.inputs[0])] ? value_of(node.inputs[0])
                                                                              : value_of(node.inputs[1]);
            break;
          case ReactiveKind::Snapshot:
            values[idx] = *state_[static_cast<std::size_t>(node.inputs[1])];
            break;
          case ReactiveKind::Change:
            state_[idx] = Value::pair(value_of(node.inputs[0]), state_[idx]->as_pair().fst);
            break;
          case ReactiveKind::Observe:
            effects.push_back({batch.t_ms, d.effect, value_of(node.inputs[0]),
                               g.nodes[static_cast<std::size_t>(node.inputs[0])].type.inner});
            break;
        }
      }
    }
  } catch (const minic::EflError& e) {
    state_ = saved;
    stats_.errors.push_back({batch.t_ms, e.what()});
    effects.clear();
  }
  stats_.guard_checks += program_.schedule.groups.size();
  finish_cycle(stats_, checks);
  return effects;
}

EffectLog run_trace(const CompiledProgram& program, const Trace& trace, RunStats* stats) {
  Runtime rt(program);
  EffectLog log;
  for (const auto& batch : schedule_timers(trace, timer_periods(*program.typed))) {
    auto effects = rt.step(batch);
    log.insert(log.end(), effects.begin(), effects.end());
  }
  if (stats) *stats = rt.stats();
  return log;
}

// ---------------------------------------------------------------------------
// Oracle

EffectLog oracle_run(const typer::TypedProgram& tp, const Trace& trace, RunStats* stats, const Probe& probe) {
  const auto& defs = tp.core.defs;
  const std::size_t n = defs.size();
  std::vector<std::vector<std::size_t>> inputs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& in : defs[i].inputs) inputs[i].push_back(static_cast<std::size_t>(tp.index_of(in)));
  }
  auto is_fold = [&](std::size_t i) {
    auto k = defs[i].kind;
    return k == ReactiveKind::Fold || k == ReactiveKind::FoldAll || k == ReactiveKind::Change;
  };

  std::vector<std::optional<Value>> state(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_fold(i)) state[i] = initial_state(tp, i);
  }

  RunStats local;
  EffectLog log;
  for (const auto& batch : schedule_timers(trace, timer_periods(tp))) {
    const auto saved = state;
    std::vector<bool> t(n, false);
    std::vector<std::optional<Value>> val(n);
    EffectLog effects;
    std::uint64_t checks = 0;
    auto v = [&](std::size_t i) -> const Value& {
      if (is_fold(i)) return *state[i];
      if (!val[i]) throw InternalError("oracle: '" + defs[i].name + "' read while undefined");
      return *val[i];
    };
    auto all_in = [&](std::size_t i) {
      return std::all_of(inputs[i].begin(), inputs[i].end(), [&](std::size_t j) { return static_cast<bool>(t[j]); });
    };
    auto any_in = [&](std::size_t i) {
      return std::any_of(inputs[i].begin(), inputs[i].end(), [&](std::size_t j) { return static_cast<bool>(t[j]); });
    };

    try {
      for (std::size_t i = 0; i < n; ++i) {
        const auto& d = defs[i];
        ++checks;
        ++local.guard_checks;
        switch (d.kind) {
          case ReactiveKind::Source: {
            const Value* p = find_payload(batch, d.source);
            if (p) {
              t[i] = true;
              val[i] = *p;
            }
            break;
          }
          case ReactiveKind::Filter:
            if (t[inputs[i][0]] && call_checked(tp, d.fns[0], {v(inputs[i][0])}, local).as_bool()) {
              t[i] = true;
              val[i] = v(inputs[i][0]);
            }
            break;
          case ReactiveKind::Map:
            if (all_in(i)) {
              std::vector<Value> args;
              for (auto j : inputs[i]) args.push_back(v(j));
              t[i] = true;
              val[i] = call_checked(tp, d.fns[0], args, local);
            }
            break;
          case ReactiveKind::Fold:
            if (all_in(i)) {
              std::vector<Value> args{*state[i]};
              for (auto j : inputs[i]) args.push_back(v(j));
              t[i] = true;
              state[i] = call_checked(tp, d.fns[0], args, local);
            }
            break;
          case ReactiveKind::FoldAll:
            if (any_in(i)) {
              t[i] = true;
              for (std::size_t arm = 0; arm < inputs[i].size(); ++arm) {
                ++checks;
                ++local.inner_checks;
                if (t[inputs[i][arm]]) state[i] = call_checked(tp, d.fns[arm], {*state[i], v(inputs[i][arm])}, local);
              }
            }
            break;
          case ReactiveKind::Choice:
            if (any_in(i)) {
              ++checks;
              ++local.inner_checks;
              t[i] = true;
              val[i] = t[inputs[i][0]] ? v(inputs[i][0]) : v(inputs[i][1]);
            }
            break;
          case ReactiveKind::Snapshot:
            if (t[inputs[i][0]]) {
              t[i] = true;
              val[i] = *state[inputs[i][1]];
            }
            break;
          case ReactiveKind::Change:
            if (all_in(i)) {
              t[i] = true;
              state[i] = Value::pair(v(inputs[i][0]), state[i]->as_pair().fst);
            }
            break;
          case ReactiveKind::Observe:
            if (all_in(i)) {
              t[i] = true;
              effects.push_back({batch.t_ms, d.effect, v(inputs[i][0]), tp.types[inputs[i][0]].inner});
            }
            break;
        }
        if (probe) probe(local.cycles, static_cast<int>(i), t[i]);
      }
    } catch (const minic::EflError& e) {
      state = saved;
      local.errors.push_back({batch.t_ms, e.what()});
      effects.clear();
    }
    finish_cycle(local, checks);
    log.insert(log.end(), effects.begin(), effects.end());
  }
  if (stats) *stats = local;
  return log;
}

}  // namespace refi::interp
