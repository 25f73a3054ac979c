/*
 * Copyright (c) 2026, The cfmg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// cfmg command-line frontend.
//
// Exit codes: 0 success/accepted, 1 rejected/refuted, 2 input error,
// 3 search budget exhausted.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cfmg/cfmg.hpp"

using namespace cfmg;

namespace {

enum Exit { kOk = 0, kReject = 1, kInput = 2, kBudget = 3 };

struct Globals {
  bool json = false;
  std::uint64_t budget = 10'000'000;
  std::uint64_t seed = 1;
};

// Prints either the JSON report or the human-readable lines.
class Report {
 public:
  explicit Report(const Globals& g) : g_(g) {}
  json& data() { return data_; }
  std::ostringstream& text() { return text_; }
  void flush() {
    if (g_.json)
      std::cout << data_.dump(2) << "\n";
    else
      std::cout << text_.str();
  }

 private:
  const Globals& g_;
  json data_ = json::object();
  std::ostringstream text_;
};

std::string ext_name(const Msc& m, ExtEvent x) {
  if (x.is_bottom()) return std::string(kBottomName);
  if (x.is_top()) return std::string(kTopName);
  return m.id(x.event());
}

Msc load_msc(const std::string& path) { return msc_from_json(read_json_file(path)); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

json run_stats(const SearchContext& ctx, double ms) {
  json s;
  s["nodes"] = ctx.stats.nodes;
  s["searches"] = ctx.stats.searches;
  s["cache_hits"] = ctx.stats.cache_hits;
  s["wall_ms"] = ms;
  if (ctx.collect_states) {
    json per = json::array();
    for (const auto& v : ctx.seen_states) per.push_back(v.size());
    s["states_per_process"] = per;
  }
  return s;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int outcome_exit(Outcome o) {
  return o == Outcome::Found ? kOk : o == Outcome::NoRun ? kReject : kBudget;
}

// ---- msc ----

int msc_validate(const Globals& g, const std::string& file) {
  Report r(g);
  auto raw = raw_msc_from_json(read_json_file(file));
  auto rep = validate_msc(raw);
  r.data()["valid"] = rep.ok();
  json v = json::array();
  for (const auto& x : rep.violations) v.push_back({{"axiom", x.axiom}, {"events", x.events}, {"detail", x.detail}});
  r.data()["violations"] = v;
  if (rep.ok())
    r.text() << "valid: " << raw.events.size() << " events, " << raw.messages.size() << " messages\n";
  else
    for (const auto& x : rep.violations) r.text() << "violation " << x.axiom << ": " << x.detail << "\n";
  r.flush();
  return rep.ok() ? kOk : kReject;
}

int msc_dot(const Globals& g, const std::string& file, const std::string& out) {
  json j = read_json_file(file);
  bool annotated = false;
  if (j.contains("events") && j["events"].is_array())
    for (const auto& ev : j["events"]) annotated = annotated || ev.contains("annot");
  std::string dot = annotated ? export_dot(extended_from_json(j)) : export_dot(msc_from_json(j));
  if (!out.empty()) {
    write_text(out, dot);
    Report r(g);
    r.data()["written"] = out;
    r.text() << "wrote " << out << "\n";
    r.flush();
  } else if (g.json) {
    std::cout << json{{"dot", dot}}.dump(2) << "\n";
  } else {
    std::cout << dot;
  }
  return kOk;
}

// ---- path ----

struct PathArgs {
  std::string file, path, path2, event;
  std::vector<std::string> paths;
};

int path_cmd(const Globals& g, const std::string& what, const PathArgs& a) {
  Msc m = load_msc(a.file);
  const auto& sig = m.signature();
  Report r(g);
  auto need = [&](const std::string& s, const char* flag) {
    if (s.empty()) throw InputError(std::string("missing ") + flag);
    return s;
  };
  if (what == "eval") {
    PathExpr x = parse_path(sig, need(a.path, "--path"));
    BitMatrix rel = eval_path(m, x);
    json pairs = json::array();
    for (EventId e = 0; e < m.size(); ++e)
      for (EventId f = 0; f < m.size(); ++f)
        if (rel.get(e, f)) {
          pairs.push_back({m.id(e), m.id(f)});
          r.text() << m.id(e) << " " << m.id(f) << "\n";
        }
    r.data()["path"] = print_path(sig, x);
    r.data()["pairs"] = pairs;
    json cp = json::array();
    for (auto [p, q] : comp(sig, x)) cp.push_back({sig.process_name(p), sig.process_name(q)});
    r.data()["comp"] = cp;
  } else if (what == "last" || what == "first") {
    PathExpr x = parse_path(sig, need(a.path, "--path"));
    auto one = [&](EventId e) {
      ExtEvent v = what == "last" ? last(m, x, e) : first(m, x, e);
      r.data()[m.id(e)] = ext_name(m, v);
      r.text() << m.id(e) << " " << ext_name(m, v) << "\n";
    };
    if (!a.event.empty())
      one(m.event(a.event));
    else
      for (EventId e = 0; e < m.size(); ++e) one(e);
  } else if (what == "fpair") {
    PathExpr x = parse_path(sig, need(a.path, "--path"));
    PathExpr y = parse_path(sig, need(a.path2, "--path2"));
    const bool all = a.event.empty();
    auto one = [&](EventId e) {
      ExtEvent v = ExtEvent::bottom();
      try {
        v = f_pair(m, x, y, e);
      } catch (const InputError&) {
        if (!all) throw;
        return;  // the paths do not end on this event's process
      }
      r.data()[m.id(e)] = ext_name(m, v);
      r.text() << m.id(e) << " " << ext_name(m, v) << "\n";
    };
    if (!a.event.empty())
      one(m.event(a.event));
    else
      for (EventId e = 0; e < m.size(); ++e) one(e);
  } else {  // compare
    if (a.paths.size() < 2) throw InputError("compare needs at least two --paths");
    std::vector<PathExpr> xs;
    for (const auto& s : a.paths) xs.push_back(parse_path(sig, s));
    EventId e = m.event(need(a.event, "--event"));
    auto po = preorder_at(m, xs, e);
    r.data()["event"] = m.id(e);
    r.data()["leq"] = preorder_to_json(po);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (i != j && po.leq[i][j])
          r.text() << print_path(sig, xs[i]) << (po.leq[j][i] ? "  ~  " : "  <  ") << print_path(sig, xs[j]) << "\n";
  }
  r.flush();
  return kOk;
}

// ---- cfm ----

int cfm_run(const Globals& g, const std::string& cfile, const std::string& mfile, bool show_run) {
  Cfm c = cfm_from_json(read_json_file(cfile));
  Msc m = load_msc(mfile);
  if (!(c.signature() == m.signature())) throw InputError("machine and MSC use different signatures");
  SearchContext ctx;
  ctx.budget = g.budget;
  ctx.collect_states = true;
  auto t0 = std::chrono::steady_clock::now();
  auto res = find_accepting_run(c, m, SlotTable(m.size(), 0), ctx);
  Report r(g);
  r.data()["outcome"] = outcome_name(res.outcome);
  r.data()["stats"] = run_stats(ctx, elapsed_ms(t0));
  r.text() << outcome_name(res.outcome) << "\n";
  if (show_run && res.outcome == Outcome::Found) {
    CfmRun run = to_cfm_run(res.run);
    r.data()["run"] = cfm_run_to_json(c, m, run);
    for (EventId e : m.linearization()) {
      const auto& t = c.automaton(m.loc(e)).transitions[run[e]];
      const auto& states = c.automaton(m.loc(e)).states;
      r.text() << "  " << m.id(e) << ": " << states[t.src] << " -> " << states[t.dst] << "\n";
    }
  }
  r.flush();
  return outcome_exit(res.outcome);
}

int cfm_det(const Globals& g, const std::string& cfile) {
  Cfm c = cfm_from_json(read_json_file(cfile));
  const bool det = is_deterministic(c);
  Report r(g);
  r.data()["deterministic"] = det;
  r.text() << (det ? "deterministic" : "not deterministic") << "\n";
  r.flush();
  return det ? kOk : kReject;
}

int emit_cfm(const Globals& g, const Cfm& c, const std::string& out) {
  json j = cfm_to_json(c);
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  write_json_file(out, j);
  Report r(g);
  r.data()["written"] = out;
  r.text() << "wrote " << out << "\n";
  r.flush();
  return kOk;
}

// ---- gossip ----

int gossip_annotate(const Globals& g, const std::string& file, const std::string& out) {
  Msc m = load_msc(file);
  json j = extended_to_json(oracle_gossip_annotation(m));
  if (!out.empty()) {
    write_json_file(out, j);
    Report r(g);
    r.data()["written"] = out;
    r.text() << "wrote " << out << "\n";
    r.flush();
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return kOk;
}

int gossip_check(const Globals& g, const std::string& file) {
  ExtendedMsc x = extended_from_json(read_json_file(file));
  SlotTable t = gossip_table_from_extended(x);
  auto machine = build_gossip_cfm(x.base.signature());
  SearchContext ctx;
  ctx.budget = g.budget;
  ctx.cache = std::make_shared<StageCache>();
  auto t0 = std::chrono::steady_clock::now();
  Outcome o = accepts(*machine, x.base, t, ctx);
  const SlotTable truth = oracle_gossip_table(x.base);
  Report r(g);
  r.data()["outcome"] = outcome_name(o);
  r.data()["oracle_agrees"] = (t == truth) == (o == Outcome::Found);
  r.data()["stats"] = run_stats(ctx, elapsed_ms(t0));
  r.text() << outcome_name(o) << "\n";
  if (!(t == truth))
    for (EventId e = 0; e < x.base.size(); ++e)
      for (ProcId p = 0; p < x.base.signature().process_count(); ++p)
        if (t.get(e, p) != truth.get(e, p))
          r.text() << "  " << x.base.id(e) << "[" << x.base.signature().process_name(p) << "] differs from the true latest label\n";
  r.flush();
  return outcome_exit(o);
}

int gossip_build(const Globals& g, int processes, int labels, bool report_states, const std::string& msc_file) {
  SystemSignature sig = msc_file.empty() ? SystemSignature(default_process_names(processes), default_alphabet(labels))
                                         : load_msc(msc_file).signature();
  auto machine = build_gossip_cfm(sig);
  Report r(g);
  r.data()["processes"] = sig.process_count();
  r.data()["labels"] = sig.label_count();
  r.data()["stages"] = machine->stages().size();
  r.data()["slots"] = machine->slot_count();
  std::size_t paths = 0;
  for (ProcId p = 0; p < sig.process_count(); ++p)
    for (ProcId q = 0; q < sig.process_count(); ++q)
      if (p != q) paths += path_size(gossip_paths_between(sig, p, q));
  r.data()["path_size"] = paths;
  r.text() << "gossip machine: " << machine->stages().size() << " stages, " << machine->slot_count()
           << " annotation slots, path size " << paths << "\n";
  if (report_states) {
    // Count the structured states a run actually visits on some inputs.
    std::vector<Msc> inputs;
    if (!msc_file.empty()) {
      inputs.push_back(load_msc(msc_file));
    } else {
      CorpusSpec cs;
      cs.seed = g.seed;
      cs.count = 10;
      cs.processes = processes;
      cs.alphabet = labels;
      inputs = generate_corpus(cs);
    }
    SearchContext ctx;
    ctx.budget = g.budget;
    ctx.collect_states = true;
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& m : inputs) {
      // Per-stage searches see stage-local states; the combined run is
      // replayed with state collection for an honest count.
      SearchContext inner;
      inner.budget = g.budget;
      inner.cache = std::make_shared<StageCache>();
      auto res = find_accepting_run(*machine, m, oracle_gossip_table(m), inner);
      if (res.outcome == Outcome::Budget) throw BudgetError();
      ctx.stats.nodes += inner.stats.nodes;
      if (ctx.seen_states.size() < static_cast<std::size_t>(sig.process_count()))
        ctx.seen_states.resize(sig.process_count());
      for (EventId e = 0; e < m.size(); ++e)
        ctx.seen_states[m.loc(e)].insert(detail::hash_state(res.run.steps[e].target));
    }
    r.data()["inputs"] = inputs.size();
    r.data()["stats"] = run_stats(ctx, elapsed_ms(t0));
    r.text() << "visited structured states per process:";
    for (const auto& v : ctx.seen_states) r.text() << " " << v.size();
    r.text() << " (over " << inputs.size() << " inputs)\n";
  }
  r.flush();
  return kOk;
}

// ---- impossible ----

int impossible_family(const Globals& g, int n, int k, const std::string& out) {
  Msc m = build_family_msc({n, k});
  json j = msc_to_json(m);
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  write_json_file(out, j);
  Report r(g);
  r.data()["written"] = out;
  r.data()["events"] = m.size();
  r.text() << "wrote " << out << " (" << m.size() << " events)\n";
  r.flush();
  return kOk;
}

int impossible_refute(const Globals& g, const std::string& file, const std::string& claimant,
                      const std::string& out) {
  Cfm c = universal_cfm(demo_signature());
  std::string name = file;
  if (!claimant.empty()) {
    bool found = false;
    if (claimant == "naive") {
      c = naive_gossip_cfm();
      found = true;
    }
    for (const auto& x : demo_claimants())
      if (x.name == claimant) {
        c = x.machine;
        found = true;
      }
    if (!found) throw InputError("unknown claimant '" + claimant + "'");
    name = claimant;
  } else {
    if (file.empty()) throw InputError("give a machine file or --claimant");
    c = cfm_from_json(read_json_file(file));
  }
  Refutation ref = refute_deterministic(c, g.budget);
  Report r(g);
  r.data() = refutation_to_json(ref);
  r.data()["machine"] = name;
  r.text() << name << ": " << verdict_name(ref.verdict);
  if (ref.verdict == RefutationVerdict::Counterexample) {
    r.text() << " (" << ref.method << ", n=" << ref.n << ", k=" << ref.k;
    if (ref.k2 >= 0) r.text() << ", k'=" << ref.k2;
    r.text() << ")\n  accepted by the machine: " << (ref.accepted ? "yes" : "no") << "\n  wrong q-events:";
    for (EventId e : ref.violations) r.text() << " " << ref.msc->id(e);
    r.text() << "\n";
    if (!out.empty()) write_json_file(out, msc_to_json(*ref.msc));
  } else {
    r.text() << "\n";
  }
  r.flush();
  return ref.verdict == RefutationVerdict::Counterexample ? kReject : kInput;
}

// ---- tl ----

SystemSignature tl_signature(const std::string& msc_file, const std::vector<std::string>& procs,
                             const std::vector<std::string>& labels) {
  if (!msc_file.empty()) return load_msc(msc_file).signature();
  if (procs.empty() || labels.empty()) throw InputError("give --msc or both --processes and --alphabet");
  return SystemSignature(procs, labels);
}

int tl_eval(const Globals& g, const std::string& formula, const std::string& file) {
  Msc m = load_msc(file);
  TlPtr f = parse_tl(formula, &m.signature());
  auto v = eval_tl(m, *f);
  Report r(g);
  r.data()["formula"] = print_tl(*f);
  json vals = json::object();
  for (EventId e = 0; e < m.size(); ++e) {
    vals[m.id(e)] = static_cast<bool>(v[e]);
    r.text() << m.id(e) << " " << (v[e] ? "true" : "false") << "\n";
  }
  r.data()["values"] = vals;
  r.flush();
  return kOk;
}

int tl_expand(const Globals& g, const std::string& formula) {
  TlPtr f = parse_tl(formula);
  TlPtr x = expand_derived(f);
  Report r(g);
  r.data()["formula"] = print_tl(*f);
  r.data()["expanded"] = print_tl(*x);
  r.text() << print_tl(*x) << "\n";
  r.flush();
  return kOk;
}

int tl_compile(const Globals& g, const std::string& formula, const SystemSignature& sig, const std::string& out) {
  TlPtr f = parse_tl(formula, &sig);
  CompiledTl c = compile_tl(sig, f);
  json d;
  d["formula"] = print_tl(*f);
  d["expanded"] = print_tl(*expand_derived(f));
  d["processes"] = sig.processes();
  d["alphabet"] = sig.alphabet();
  d["slots"] = c.machine->slot_count();
  d["nodes"] = c.nodes;
  d["temporal"] = c.temporal;
  json stages = json::array();
  for (const auto& st : c.machine->stages()) {
    json o;
    o["name"] = st.name;
    o["kind"] = st.machine->describe();
    json outs = json::array();
    for (const auto& gs : st.outputs) outs.push_back(gs.slot);
    o["outputs"] = outs;
    o["reads"] = st.machine->read_slots();
    if (auto inner = std::dynamic_pointer_cast<const Pipeline>(st.machine))
      o["inner_stages"] = inner->stages().size();
    stages.push_back(o);
  }
  d["stages"] = stages;
  if (!out.empty()) write_json_file(out, d);
  Report r(g);
  r.data() = d;
  r.text() << "compiled " << print_tl(*f) << ": " << c.machine->stages().size() << " stages, " << c.temporal
           << " temporal\n";
  if (!out.empty()) r.text() << "wrote " << out << "\n";
  r.flush();
  return kOk;
}

int tl_check(const Globals& g, const std::string& formula, const std::string& file) {
  Msc m = load_msc(file);
  TlPtr f = parse_tl(formula, &m.signature());
  CompiledTl c = compile_tl(m.signature(), f);
  auto t0 = std::chrono::steady_clock::now();
  TranslationCheck tc = check_translation(c, m, *f, g.budget);
  Report r(g);
  r.data()["formula"] = print_tl(*f);
  r.data()["accepted"] = tc.accepted;
  r.data()["budget_exhausted"] = tc.budget;
  json muts = json::array();
  for (EventId e : tc.accepted_mutations) muts.push_back(m.id(e));
  r.data()["accepted_mutations"] = muts;
  r.data()["nodes"] = tc.nodes;
  r.data()["wall_ms"] = elapsed_ms(t0);
  r.data()["ok"] = tc.ok;
  if (tc.budget)
    r.text() << "budget exhausted\n";
  else
    r.text() << (tc.ok ? "translation agrees" : "translation disagrees") << ": true annotation "
             << (tc.accepted ? "accepted" : "rejected") << ", " << tc.accepted_mutations.size()
             << " mutations accepted\n";
  r.flush();
  if (tc.budget) return kBudget;
  return tc.ok ? kOk : kReject;
}

// ---- corpus ----

int corpus_gen(const Globals& g, CorpusSpec spec, const std::string& out_dir) {
  spec.seed = g.seed;
  auto ms = generate_corpus(spec);
  if (out_dir.empty()) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back(msc_to_json(m));
    std::cout << arr.dump(2) << "\n";
    return kOk;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create '" + out_dir + "': " + ec.message());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    std::ostringstream name;
    name << out_dir << "/msc_" << i << ".json";
    write_json_file(name.str(), msc_to_json(ms[i]));
  }
  Report r(g);
  r.data()["written"] = ms.size();
  r.text() << "wrote " << ms.size() << " MSCs to " << out_dir << "\n";
  r.flush();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfmg: message sequence charts, communicating automata, gossip and temporal logic"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Print a JSON report");
  app.add_option("--budget", g.budget, "Search node budget")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();

  std::function<int()> action;
  auto on = [&](CLI::App* sub, std::function<int()> f) { sub->callback([&action, f] { action = f; }); };

  // msc
  auto* msc = app.add_subcommand("msc", "MSC validation and rendering");
  msc->require_subcommand(1);
  std::string file, file2, out;
  {
    auto* v = msc->add_subcommand("validate", "Check the MSC axioms");
    v->add_option("file", file, "MSC JSON")->required();
    on(v, [&] { return msc_validate(g, file); });
    auto* d = msc->add_subcommand("dot", "Render as Graphviz DOT");
    d->add_option("file", file, "MSC or annotated MSC JSON")->required();
    d->add_option("--out", out, "Output file");
    on(d, [&] { return msc_dot(g, file, out); });
  }

  // path
  auto* path = app.add_subcommand("path", "Path expression semantics");
  path->require_subcommand(1);
  PathArgs pa;
  for (const char* what : {"eval", "last", "first", "fpair", "compare"}) {
    auto* s = path->add_subcommand(what, std::string("path ") + what);
    s->add_option("file", pa.file, "MSC JSON")->required();
    const std::string w = what;
    if (w == "compare") {
      s->add_option("--paths", pa.paths, "Path expression to compare (repeat the flag)")->required();
      s->add_option("--event", pa.event, "Event id")->required();
    } else {
      s->add_option("--path", pa.path, "Path expression")->required();
      if (w == "fpair") s->add_option("--path2", pa.path2, "Second path expression")->required();
      if (w != "eval") s->add_option("--event", pa.event, "Event id (default: all)");
    }
    on(s, [&, w] { return path_cmd(g, w, pa); });
  }

  // cfm
  auto* cfm = app.add_subcommand("cfm", "Communicating finite-state machines");
  cfm->require_subcommand(1);
  {
    auto* run = cfm->add_subcommand("run", "Search an accepting run and print it");
    run->add_option("cfm", file, "CFM JSON")->required();
    run->add_option("msc", file2, "MSC JSON")->required();
    on(run, [&] { return cfm_run(g, file, file2, true); });
    auto* acc = cfm->add_subcommand("accepts", "Decide membership");
    acc->add_option("cfm", file, "CFM JSON")->required();
    acc->add_option("msc", file2, "MSC JSON")->required();
    on(acc, [&] { return cfm_run(g, file, file2, false); });
    auto* det = cfm->add_subcommand("det", "Check determinism");
    det->add_option("cfm", file, "CFM JSON")->required();
    on(det, [&] { return cfm_det(g, file); });
    auto* mir = cfm->add_subcommand("mirror", "Mirror machine");
    mir->add_option("cfm", file, "CFM JSON")->required();
    mir->add_option("--out", out, "Output file");
    on(mir, [&] { return emit_cfm(g, mirror_cfm(cfm_from_json(read_json_file(file)), true), out); });
    auto* prod = cfm->add_subcommand("product", "Intersection product");
    prod->add_option("cfm1", file, "CFM JSON")->required();
    prod->add_option("cfm2", file2, "CFM JSON")->required();
    prod->add_option("--out", out, "Output file");
    on(prod, [&] {
      return emit_cfm(g, product(cfm_from_json(read_json_file(file)), cfm_from_json(read_json_file(file2))), out);
    });
  }

  // gossip
  auto* gossip = app.add_subcommand("gossip", "Latest-information tracking");
  gossip->require_subcommand(1);
  int processes = 3, labels = 2;
  bool report_states = false;
  std::string msc_file;
  {
    auto* an = gossip->add_subcommand("annotate", "Annotate with the true latest labels");
    an->add_option("file", file, "MSC JSON")->required();
    an->add_option("--out", out, "Output file");
    on(an, [&] { return gossip_annotate(g, file, out); });
    auto* ch = gossip->add_subcommand("check", "Run the gossip machine on an annotated MSC");
    ch->add_option("file", file, "Annotated MSC JSON")->required();
    on(ch, [&] { return gossip_check(g, file); });
    auto* b = gossip->add_subcommand("build", "Build the gossip machine and report its size");
    b->add_option("--processes", processes, "Process count")->capture_default_str();
    b->add_option("--labels", labels, "Alphabet size")->capture_default_str();
    b->add_option("--msc", msc_file, "Take the signature (and input) from this MSC");
    b->add_flag("--report-states", report_states, "Count visited structured states");
    on(b, [&] { return gossip_build(g, processes, labels, report_states, msc_file); });
  }

  // impossible
  auto* imp = app.add_subcommand("impossible", "Deterministic impossibility");
  imp->require_subcommand(1);
  int fam_n = 5, fam_k = 2;
  std::string claimant;
  {
    auto* fam = imp->add_subcommand("family", "Build a member of the MSC family");
    fam->add_option("--n", fam_n, "n")->required();
    fam->add_option("--k", fam_k, "k")->required();
    fam->add_option("--out", out, "Output file");
    on(fam, [&] { return impossible_family(g, fam_n, fam_k, out); });
    auto* ref = imp->add_subcommand("refute", "Find an MSC on which a deterministic machine is wrong");
    ref->add_option("cfm", file, "CFM JSON");
    ref->add_option("--claimant", claimant, "Built-in machine: naive, echo, p-memory, toggle, r-trusting");
    ref->add_option("--out", out, "Write the counterexample MSC here");
    on(ref, [&] { return impossible_refute(g, file, claimant, out); });
  }

  // tl
  auto* tl = app.add_subcommand("tl", "Temporal logic");
  tl->require_subcommand(1);
  std::string formula;
  std::vector<std::string> tl_procs, tl_labels;
  {
    auto* ev = tl->add_subcommand("eval", "Evaluate at every event");
    ev->add_option("--formula", formula, "Formula")->required();
    ev->add_option("file", file, "MSC JSON")->required();
    on(ev, [&] { return tl_eval(g, formula, file); });
    auto* ex = tl->add_subcommand("expand", "Expand derived modalities");
    ex->add_option("--formula", formula, "Formula")->required();
    on(ex, [&] { return tl_expand(g, formula); });
    auto* co = tl->add_subcommand("compile", "Compile to a machine description");
    co->add_option("--formula", formula, "Formula")->required();
    co->add_option("--out", out, "Output file");
    co->add_option("--msc", msc_file, "Take the signature from this MSC");
    co->add_option("--processes", tl_procs, "Process names");
    co->add_option("--alphabet", tl_labels, "Label names");
    on(co, [&] { return tl_compile(g, formula, tl_signature(msc_file, tl_procs, tl_labels), out); });
    auto* ch = tl->add_subcommand("check", "Compare the compiled machine with direct evaluation");
    ch->add_option("--formula", formula, "Formula")->required();
    ch->add_option("file", file, "MSC JSON")->required();
    on(ch, [&] { return tl_check(g, formula, file); });
  }

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Random MSC corpora");
  corpus->require_subcommand(1);
  CorpusSpec spec;
  std::string out_dir;
  {
    auto* gen = corpus->add_subcommand("gen", "Generate MSCs");
    gen->add_option("--count", spec.count, "Number of MSCs")->capture_default_str();
    gen->add_option("--max-events", spec.max_events, "Events per process")->capture_default_str();
    gen->add_option("--processes", spec.processes, "Process count")->capture_default_str();
    gen->add_option("--alphabet", spec.alphabet, "Alphabet size")->capture_default_str();
    gen->add_flag("!--no-local", spec.local_events, "Only send and receive events");
    gen->add_option("--out-dir", out_dir, "Write one file per MSC");
    on(gen, [&] { return corpus_gen(g, spec, out_dir); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }
  try {
    return action ? action() : kInput;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const Unsupported& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return kInput;
  }
}
