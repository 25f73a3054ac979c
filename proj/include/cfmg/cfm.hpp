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

#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cfmg/machine.hpp"
#include "cfmg/msc_json.hpp"

namespace cfmg {

struct Transition {
  int src = 0;
  EventKind kind = EventKind::Local;
  LabelId label = 0;
  int msg = -1;     // message index for sends and receives
  ProcId peer = -1; // receiver of a send, sender of a receive
  int dst = 0;

  auto operator<=>(const Transition&) const = default;
};

struct ProcessAutomaton {
  std::vector<std::string> states;
  int initial = 0;
  std::vector<Transition> transitions;
};

// Explicit communicating finite-state machine.  States and messages are
// indices; runs refer to transitions by their index within the process.
class Cfm : public Machine {
 public:
  Cfm(SystemSignature sig, std::vector<std::string> messages,
      std::vector<ProcessAutomaton> procs, std::vector<std::vector<int>> accepting,
      std::optional<std::vector<std::vector<int>>> generalized_initial = std::nullopt)
      : sig_(std::move(sig)),
        messages_(std::move(messages)),
        procs_(std::move(procs)),
        accepting_(std::move(accepting)),
        generalized_initial_(std::move(generalized_initial)) {
    const int np = sig_.process_count();
    if (static_cast<int>(procs_.size()) != np)
      throw InputError("CFM: one automaton per process required");
    for (ProcId p = 0; p < np; ++p) {
      const auto& a = procs_[p];
      const int ns = static_cast<int>(a.states.size());
      if (ns == 0) throw InputError("CFM: process without states");
      if (a.initial < 0 || a.initial >= ns) throw InputError("CFM: bad initial state");
      for (const auto& t : a.transitions) {
        if (t.src < 0 || t.src >= ns || t.dst < 0 || t.dst >= ns)
          throw InputError("CFM: transition references a missing state");
        if (t.label < 0 || t.label >= sig_.label_count())
          throw InputError("CFM: transition label outside the alphabet");
        if (t.kind != EventKind::Local) {
          if (t.peer < 0 || t.peer >= np || t.peer == p)
            throw InputError("CFM: bad peer process");
          if (t.msg < 0 || t.msg >= static_cast<int>(messages_.size()))
            throw InputError("CFM: unknown message");
        }
      }
    }
    auto check_tuples = [&](const std::vector<std::vector<int>>& ts) {
      for (const auto& t : ts) {
        if (static_cast<int>(t.size()) != np) throw InputError("CFM: tuple arity mismatch");
        for (ProcId p = 0; p < np; ++p)
          if (t[p] < 0 || t[p] >= static_cast<int>(procs_[p].states.size()))
            throw InputError("CFM: tuple references a missing state");
      }
    };
    check_tuples(accepting_);
    if (generalized_initial_) check_tuples(*generalized_initial_);
    acc_set_ = {accepting_.begin(), accepting_.end()};
    out_.resize(np);
    for (ProcId p = 0; p < np; ++p) {
      out_[p].resize(procs_[p].states.size());
      for (std::size_t i = 0; i < procs_[p].transitions.size(); ++i)
        out_[p][procs_[p].transitions[i].src].push_back(static_cast<int>(i));
    }
  }

  const SystemSignature& signature() const override { return sig_; }
  const std::vector<std::string>& messages() const { return messages_; }
  const std::vector<ProcessAutomaton>& automata() const { return procs_; }
  const ProcessAutomaton& automaton(ProcId p) const { return procs_.at(p); }
  const std::vector<std::vector<int>>& accepting_tuples() const { return accepting_; }
  const std::optional<std::vector<std::vector<int>>>& generalized_initial() const {
    return generalized_initial_;
  }
  bool is_accepting_tuple(const std::vector<int>& t) const { return acc_set_.count(t) > 0; }

  std::vector<std::vector<int>> initial_index_tuples() const {
    if (generalized_initial_) return *generalized_initial_;
    std::vector<int> t;
    for (const auto& a : procs_) t.push_back(a.initial);
    return {t};
  }

  State initial_state(ProcId p) const override { return {procs_.at(p).initial}; }
  std::vector<std::vector<State>> initial_tuples() const override {
    std::vector<std::vector<State>> out;
    for (const auto& t : initial_index_tuples()) {
      std::vector<State> s;
      for (int x : t) s.push_back({x});
      out.push_back(std::move(s));
    }
    return out;
  }

  void successors(const EventView& ev, const State& s, const Message* in,
                  std::vector<Step>& out) const override {
    for (int ti : out_[ev.proc][s[0]]) {
      const auto& t = procs_[ev.proc].transitions[ti];
      if (t.kind != ev.kind || t.label != ev.label) continue;
      if (t.kind != EventKind::Local && t.peer != ev.peer) continue;
      if (t.kind == EventKind::Recv && (!in || (*in)[0] != t.msg)) continue;
      Step st;
      if (t.kind == EventKind::Send) st.msg = {t.msg};
      st.target = {t.dst};
      st.tag = ti;
      out.push_back(std::move(st));
    }
  }

  bool accepting(const std::vector<State>& finals) const override {
    std::vector<int> t;
    for (const auto& s : finals) t.push_back(s[0]);
    return acc_set_.count(t) > 0;
  }

  std::string describe() const override { return "explicit CFM"; }

  std::size_t state_count() const {
    std::size_t n = 0;
    for (const auto& a : procs_) n += a.states.size();
    return n;
  }

 private:
  SystemSignature sig_;
  std::vector<std::string> messages_;
  std::vector<ProcessAutomaton> procs_;
  std::vector<std::vector<int>> accepting_;
  std::optional<std::vector<std::vector<int>>> generalized_initial_;
  std::set<std::vector<int>> acc_set_;
  std::vector<std::vector<std::vector<int>>> out_;
};

using CfmPtr = std::shared_ptr<const Cfm>;

// Transition chosen per event (index into the process's transition list).
using CfmRun = std::vector<int>;

inline CfmRun to_cfm_run(const Run& run) {
  CfmRun out;
  for (const auto& st : run.steps) out.push_back(st.tag);
  return out;
}

inline std::optional<CfmRun> find_cfm_run(const Cfm& c, const Msc& m, SearchContext& ctx) {
  auto r = find_accepting_run(c, m, SlotTable(m.size(), 0), ctx);
  if (r.outcome == Outcome::Budget) throw BudgetError();
  if (r.outcome != Outcome::Found) return std::nullopt;
  return to_cfm_run(r.run);
}

struct RunCheck {
  bool ok = true;
  std::vector<std::string> violations;
};

// The run conditions: label and kind match, initial start, state chaining,
// message matching, and an accepting final tuple.
inline RunCheck validate_run(const Cfm& c, const Msc& m, const CfmRun& run) {
  RunCheck rc;
  auto bad = [&](std::string s) {
    rc.ok = false;
    rc.violations.push_back(std::move(s));
  };
  if (!(c.signature() == m.signature())) {
    bad("signature mismatch");
    return rc;
  }
  if (static_cast<int>(run.size()) != m.size()) {
    bad("assignment is not total");
    return rc;
  }
  const int np = m.signature().process_count();
  auto tr = [&](EventId e) -> const Transition* {
    int i = run[e];
    const auto& ts = c.automaton(m.loc(e)).transitions;
    if (i < 0 || i >= static_cast<int>(ts.size())) return nullptr;
    return &ts[i];
  };
  for (EventId e = 0; e < m.size(); ++e) {
    const Transition* t = tr(e);
    if (!t) {
      bad("event " + m.id(e) + " has no transition");
      continue;
    }
    if (t->label != m.label(e)) bad("label mismatch at " + m.id(e));
    if (t->kind != m.kind(e)) bad("kind mismatch at " + m.id(e));
    if (t->kind != EventKind::Local && t->peer != m.peer(e)) bad("peer mismatch at " + m.id(e));
    if (EventId f = m.next(e); f >= 0 && tr(f) && tr(f)->src != t->dst)
      bad("state chaining broken between " + m.id(e) + " and " + m.id(f));
    if (m.kind(e) == EventKind::Send && tr(m.partner(e)) && tr(m.partner(e))->msg != t->msg)
      bad("message mismatch on " + m.id(e) + "->" + m.id(m.partner(e)));
  }
  if (!rc.ok) return rc;
  // Initial condition against some initial tuple, then acceptance.
  bool started = false;
  for (const auto& init : c.initial_index_tuples()) {
    bool match = true;
    for (ProcId p = 0; p < np && match; ++p) {
      const auto& evs = m.events_on(p);
      if (!evs.empty() && tr(evs.front())->src != init[p]) match = false;
    }
    if (!match) continue;
    started = true;
    std::vector<int> fin(np);
    for (ProcId p = 0; p < np; ++p) {
      const auto& evs = m.events_on(p);
      fin[p] = evs.empty() ? init[p] : tr(evs.back())->dst;
    }
    if (c.is_accepting_tuple(fin)) return rc;
  }
  bad(started ? "final tuple not accepting" : "run does not start in an initial state");
  return rc;
}

// The three determinism clauses for local, send and receive transitions.
inline bool is_deterministic(const Cfm& c) {
  if (c.generalized_initial() && c.generalized_initial()->size() != 1) return false;
  for (const auto& a : c.automata()) {
    const auto& ts = a.transitions;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        const auto& t1 = ts[i];
        const auto& t2 = ts[j];
        if (t1.src != t2.src || t1.kind != t2.kind || t1.label != t2.label) continue;
        switch (t1.kind) {
          case EventKind::Local:
            if (t1.dst != t2.dst) return false;
            break;
          case EventKind::Send:
            if (t1.peer == t2.peer && (t1.dst != t2.dst || t1.msg != t2.msg)) return false;
            break;
          case EventKind::Recv:
            if (t1.peer == t2.peer && t1.msg == t2.msg && t1.dst != t2.dst) return false;
            break;
        }
      }
    }
  }
  return true;
}

inline Cfm universal_cfm(const SystemSignature& sig) {
  std::vector<ProcessAutomaton> procs;
  for (ProcId p = 0; p < sig.process_count(); ++p) {
    ProcessAutomaton a;
    a.states = {"s"};
    for (LabelId x = 0; x < sig.label_count(); ++x) {
      a.transitions.push_back({0, EventKind::Local, x, -1, -1, 0});
      for (ProcId q = 0; q < sig.process_count(); ++q) {
        if (q == p) continue;
        a.transitions.push_back({0, EventKind::Send, x, 0, q, 0});
        a.transitions.push_back({0, EventKind::Recv, x, 0, q, 0});
      }
    }
    procs.push_back(std::move(a));
  }
  return Cfm(sig, {"m"}, std::move(procs), {std::vector<int>(sig.process_count(), 0)});
}

namespace detail {

inline std::vector<std::vector<int>> tuple_product(const std::vector<std::vector<int>>& xs,
                                                   const std::vector<std::vector<int>>& ys,
                                                   const std::vector<int>& width2) {
  std::vector<std::vector<int>> out;
  for (const auto& x : xs)
    for (const auto& y : ys) {
      std::vector<int> t;
      for (std::size_t p = 0; p < x.size(); ++p) t.push_back(x[p] * width2[p] + y[p]);
      out.push_back(std::move(t));
    }
  return out;
}

}  // namespace detail

// Synchronized intersection.  State (s1,s2) has index s1*|S2|+s2.
inline Cfm product(const Cfm& c1, const Cfm& c2) {
  if (!(c1.signature() == c2.signature())) throw InputError("product: signature mismatch");
  const auto& sig = c1.signature();
  const int nm2 = static_cast<int>(c2.messages().size());
  std::vector<std::string> msgs;
  for (const auto& a : c1.messages())
    for (const auto& b : c2.messages()) msgs.push_back("(" + a + "," + b + ")");
  std::vector<ProcessAutomaton> procs;
  std::vector<int> w2;
  for (ProcId p = 0; p < sig.process_count(); ++p) {
    const auto& a1 = c1.automaton(p);
    const auto& a2 = c2.automaton(p);
    const int n2 = static_cast<int>(a2.states.size());
    w2.push_back(n2);
    ProcessAutomaton a;
    for (const auto& s1 : a1.states)
      for (const auto& s2 : a2.states) a.states.push_back("(" + s1 + "," + s2 + ")");
    a.initial = a1.initial * n2 + a2.initial;
    for (const auto& t1 : a1.transitions)
      for (const auto& t2 : a2.transitions) {
        if (t1.kind != t2.kind || t1.label != t2.label || t1.peer != t2.peer) continue;
        Transition t;
        t.src = t1.src * n2 + t2.src;
        t.dst = t1.dst * n2 + t2.dst;
        t.kind = t1.kind;
        t.label = t1.label;
        t.peer = t1.peer;
        t.msg = t1.kind == EventKind::Local ? -1 : t1.msg * nm2 + t2.msg;
        a.transitions.push_back(t);
      }
    procs.push_back(std::move(a));
  }
  auto acc = detail::tuple_product(c1.accepting_tuples(), c2.accepting_tuples(), w2);
  std::optional<std::vector<std::vector<int>>> gi;
  if (c1.generalized_initial() || c2.generalized_initial())
    gi = detail::tuple_product(c1.initial_index_tuples(), c2.initial_index_tuples(), w2);
  return Cfm(sig, std::move(msgs), std::move(procs), std::move(acc), std::move(gi));
}

// Renames labels by a total morphism into a target signature with the same
// processes.  h[a] is the image of label a.
inline Cfm relabel(const Cfm& c, const SystemSignature& target, const std::vector<LabelId>& h) {
  if (static_cast<int>(h.size()) != c.signature().label_count())
    throw InputError("relabel: morphism must be total");
  if (target.processes() != c.signature().processes())
    throw InputError("relabel: process sets differ");
  for (LabelId x : h)
    if (x < 0 || x >= target.label_count()) throw InputError("relabel: image outside alphabet");
  auto procs = c.automata();
  for (auto& a : procs)
    for (auto& t : a.transitions) t.label = h[t.label];
  return Cfm(target, c.messages(), std::move(procs), c.accepting_tuples(),
             c.generalized_initial());
}

// Relabeling given by label names.
inline Cfm relabel(const Cfm& c, const SystemSignature& target,
                   const std::map<std::string, std::string>& h) {
  std::vector<LabelId> v;
  for (const auto& a : c.signature().alphabet()) {
    auto it = h.find(a);
    if (it == h.end()) throw InputError("relabel: morphism undefined on '" + a + "'");
    v.push_back(target.label(it->second));
  }
  return relabel(c, target, v);
}

// Replaces a generalized initial tuple set by single initial states: each
// process guesses the tuple index at its first event and keeps it.
inline Cfm lower_generalized_initial(const Cfm& c) {
  if (!c.generalized_initial()) return Cfm(c.signature(), c.messages(), c.automata(),
                                           c.accepting_tuples());
  const auto& inits = *c.generalized_initial();
  const auto& sig = c.signature();
  const int np = sig.process_count();
  const int k = static_cast<int>(inits.size());
  std::vector<ProcessAutomaton> procs;
  std::vector<int> nstates;
  for (ProcId p = 0; p < np; ++p) {
    const auto& a = c.automaton(p);
    const int ns = static_cast<int>(a.states.size());
    nstates.push_back(ns);
    ProcessAutomaton b;
    b.states.push_back("^");
    for (int i = 0; i < k; ++i)
      for (const auto& s : a.states) b.states.push_back(std::to_string(i) + ":" + s);
    b.initial = 0;
    auto idx = [&](int i, int s) { return 1 + i * ns + s; };
    for (int i = 0; i < k; ++i)
      for (const auto& t : a.transitions) {
        Transition u = t;
        u.src = idx(i, t.src);
        u.dst = idx(i, t.dst);
        b.transitions.push_back(u);
        if (t.src == inits[i][p]) {
          u.src = 0;
          b.transitions.push_back(u);
        }
      }
    procs.push_back(std::move(b));
  }
  std::set<std::vector<int>> acc;
  for (int i = 0; i < k; ++i)
    for (const auto& t : c.accepting_tuples()) {
      std::vector<std::vector<int>> options(np);
      for (ProcId p = 0; p < np; ++p) {
        options[p].push_back(1 + i * nstates[p] + t[p]);
        if (t[p] == inits[i][p]) options[p].push_back(0);
      }
      std::vector<int> choice(np, 0);
      for (;;) {
        std::vector<int> tup(np);
        for (ProcId p = 0; p < np; ++p) tup[p] = options[p][choice[p]];
        acc.insert(tup);
        ProcId p = 0;
        for (; p < np; ++p) {
          if (++choice[p] < static_cast<int>(options[p].size())) break;
          choice[p] = 0;
        }
        if (p == np) break;
      }
    }
  return Cfm(sig, c.messages(), std::move(procs), {acc.begin(), acc.end()});
}

// Time reversal: transitions flipped with sends and receives exchanged,
// initial tuples and accepting tuples swapped.  With `lower` set the result
// uses single initial states.
inline Cfm mirror_cfm(const Cfm& c, bool lower = false) {
  auto procs = c.automata();
  for (auto& a : procs)
    for (auto& t : a.transitions) {
      std::swap(t.src, t.dst);
      if (t.kind == EventKind::Send)
        t.kind = EventKind::Recv;
      else if (t.kind == EventKind::Recv)
        t.kind = EventKind::Send;
    }
  auto new_init = c.accepting_tuples();
  auto new_acc = c.initial_index_tuples();
  if (!new_init.empty())
    for (std::size_t p = 0; p < procs.size(); ++p) procs[p].initial = new_init.front()[p];
  Cfm m(c.signature(), c.messages(), std::move(procs), std::move(new_acc), std::move(new_init));
  return lower ? lower_generalized_initial(m) : m;
}

// ---- JSON ----

inline const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::Local: return "local";
    case EventKind::Send: return "send";
    case EventKind::Recv: return "recv";
  }
  return "?";
}

inline Cfm cfm_from_json(const json& j) {
  try {
    SystemSignature sig(detail::string_list(j, "processes"), detail::string_list(j, "alphabet"));
    std::vector<std::string> msgs;
    if (j.contains("messages")) msgs = detail::string_list(j, "messages");
    auto msg_index = [&](const std::string& m) {
      for (std::size_t i = 0; i < msgs.size(); ++i)
        if (msgs[i] == m) return static_cast<int>(i);
      throw InputError("unknown message '" + m + "'");
    };
    const json& machines = j.at("machines");
    std::vector<ProcessAutomaton> procs(sig.process_count());
    for (ProcId p = 0; p < sig.process_count(); ++p) {
      const auto& name = sig.process_name(p);
      if (!machines.contains(name)) throw InputError("no machine for process '" + name + "'");
      const json& mj = machines.at(name);
      auto& a = procs[p];
      a.states = detail::string_list(mj, "states");
      auto state_index = [&](const std::string& s) {
        for (std::size_t i = 0; i < a.states.size(); ++i)
          if (a.states[i] == s) return static_cast<int>(i);
        throw InputError("unknown state '" + s + "' of process '" + name + "'");
      };
      a.initial = state_index(detail::string_field(mj, "initial"));
      for (const auto& tj : mj.at("transitions")) {
        Transition t;
        t.src = state_index(detail::string_field(tj, "src"));
        t.dst = state_index(detail::string_field(tj, "dst"));
        t.label = sig.label(detail::string_field(tj, "label"));
        std::string kind = detail::string_field(tj, "kind");
        if (kind == "local") {
          t.kind = EventKind::Local;
        } else if (kind == "send" || kind == "recv") {
          t.kind = kind == "send" ? EventKind::Send : EventKind::Recv;
          t.msg = msg_index(detail::string_field(tj, "msg"));
          t.peer = sig.process(detail::string_field(tj, "peer"));
        } else {
          throw InputError("unknown transition kind '" + kind + "'");
        }
        a.transitions.push_back(t);
      }
    }
    auto tuples = [&](const json& tj) {
      std::vector<std::vector<int>> out;
      for (const auto& t : tj) {
        if (!t.is_array() || static_cast<int>(t.size()) != sig.process_count())
          throw InputError("state tuple arity mismatch");
        std::vector<int> v;
        for (ProcId p = 0; p < sig.process_count(); ++p) {
          const auto& states = procs[p].states;
          auto s = t[p].get<std::string>();
          auto it = std::find(states.begin(), states.end(), s);
          if (it == states.end()) throw InputError("unknown state '" + s + "' in tuple");
          v.push_back(static_cast<int>(it - states.begin()));
        }
        out.push_back(std::move(v));
      }
      return out;
    };
    auto acc = tuples(j.at("accepting"));
    std::optional<std::vector<std::vector<int>>> gi;
    if (j.contains("generalizedInitial")) gi = tuples(j.at("generalizedInitial"));
    return Cfm(sig, std::move(msgs), std::move(procs), std::move(acc), std::move(gi));
  } catch (const json::exception& e) {
    throw InputError(std::string("CFM document: ") + e.what());
  }
}

inline json cfm_to_json(const Cfm& c) {
  const auto& sig = c.signature();
  json j;
  j["processes"] = sig.processes();
  j["alphabet"] = sig.alphabet();
  j["messages"] = c.messages();
  j["machines"] = json::object();
  for (ProcId p = 0; p < sig.process_count(); ++p) {
    const auto& a = c.automaton(p);
    json mj;
    mj["states"] = a.states;
    mj["initial"] = a.states[a.initial];
    mj["transitions"] = json::array();
    for (const auto& t : a.transitions) {
      json tj{{"src", a.states[t.src]}, {"kind", kind_name(t.kind)},
              {"label", sig.label_name(t.label)}, {"dst", a.states[t.dst]}};
      if (t.kind != EventKind::Local) {
        tj["msg"] = c.messages()[t.msg];
        tj["peer"] = sig.process_name(t.peer);
      }
      mj["transitions"].push_back(tj);
    }
    j["machines"][sig.process_name(p)] = mj;
  }
  auto tuples = [&](const std::vector<std::vector<int>>& ts) {
    json arr = json::array();
    for (const auto& t : ts) {
      json row = json::array();
      for (ProcId p = 0; p < sig.process_count(); ++p)
        row.push_back(c.automaton(p).states[t[p]]);
      arr.push_back(row);
    }
    return arr;
  };
  j["accepting"] = tuples(c.accepting_tuples());
  if (c.generalized_initial()) j["generalizedInitial"] = tuples(*c.generalized_initial());
  return j;
}

inline json cfm_run_to_json(const Cfm& c, const Msc& m, const CfmRun& run) {
  json out = json::array();
  const auto& sig = c.signature();
  for (EventId e : m.linearization()) {
    const auto& a = c.automaton(m.loc(e));
    const auto& t = a.transitions.at(run[e]);
    json s{{"event", m.id(e)}, {"src", a.states[t.src]}, {"kind", kind_name(t.kind)},
           {"label", sig.label_name(t.label)}, {"dst", a.states[t.dst]}};
    if (t.kind != EventKind::Local) {
      s["msg"] = c.messages()[t.msg];
      s["peer"] = sig.process_name(t.peer);
    }
    out.push_back(s);
  }
  return out;
}

// Explores the states of a lazy machine reachable on some event and builds
// the equivalent explicit machine.  Labels of the result are the base
// labels; `slot_domains` lists the value range of every slot, and the
// annotation is folded into the label name "a:v1,v2".  Throws when more
// than `cap` states are reachable.
inline Cfm materialize(const Machine& m, const std::vector<int>& slot_domains,
                       std::size_t cap = 100000) {
  const auto& sig = m.signature();
  const int np = sig.process_count();
  const int width = static_cast<int>(slot_domains.size());
  // Annotated alphabet.
  std::vector<std::vector<int>> rows{{}};
  for (int d : slot_domains) {
    std::vector<std::vector<int>> next;
    for (const auto& r : rows)
      for (int v = 0; v < d; ++v) {
        auto x = r;
        x.push_back(v);
        next.push_back(std::move(x));
      }
    rows = std::move(next);
  }
  std::vector<std::string> alphabet;
  for (LabelId a = 0; a < sig.label_count(); ++a)
    for (const auto& r : rows) {
      std::string name = sig.label_name(a);
      if (width > 0) {
        name += ":";
        for (int i = 0; i < width; ++i) name += (i ? "," : "") + std::to_string(r[i]);
      }
      alphabet.push_back(name);
    }
  SystemSignature out_sig(sig.processes(), alphabet);

  std::vector<std::map<State, int>> ids(np);
  std::vector<std::vector<State>> states(np);
  std::map<Message, int> msg_ids;
  std::vector<Message> msgs;
  std::vector<ProcessAutomaton> procs(np);
  std::size_t total = 0;
  auto intern = [&](ProcId p, const State& s) {
    auto [it, fresh] = ids[p].emplace(s, static_cast<int>(states[p].size()));
    if (fresh) {
      states[p].push_back(s);
      if (++total > cap) throw Unsupported("materialize: reachable state count exceeds cap");
    }
    return it->second;
  };
  auto msg_id = [&](const Message& x) {
    auto [it, fresh] = msg_ids.emplace(x, static_cast<int>(msgs.size()));
    if (fresh) msgs.push_back(x);
    return it->second;
  };
  for (ProcId p = 0; p < np; ++p) procs[p].initial = intern(p, m.initial_state(p));

  // Saturate: receives may use any message some process can send, so a
  // state's receive moves are revisited whenever new messages appear.
  std::vector<std::size_t> expanded(np, 0);
  std::vector<std::vector<std::size_t>> recv_seen(np);
  auto expand = [&](ProcId p, std::size_t si, bool fresh) {
    const State s = states[p][si];
    const std::size_t from = recv_seen[p][si];
    const std::size_t upto = msgs.size();
    for (LabelId a = 0; a < sig.label_count(); ++a)
      for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        std::vector<int> row = rows[ri];
        row.resize(std::max(width, m.slot_count()), 0);
        EventView ev{-1, p, EventKind::Local, a, -1, row.data()};
        const LabelId out_label = a * static_cast<int>(rows.size()) + static_cast<int>(ri);
        std::vector<Step> out;
        auto add = [&](EventKind k, ProcId q, bool is_send, int msg) {
          for (const auto& st : out) {
            const int d = intern(p, st.target);
            procs[p].transitions.push_back({static_cast<int>(si), k, out_label, is_send ? msg_id(st.msg) : msg, q, d});
          }
          out.clear();
        };
        if (fresh) {
          m.successors(ev, s, nullptr, out);
          add(EventKind::Local, -1, false, -1);
          ev.kind = EventKind::Send;
          for (ProcId q = 0; q < np; ++q) {
            if (q == p) continue;
            ev.peer = q;
            m.successors(ev, s, nullptr, out);
            add(EventKind::Send, q, true, -1);
          }
        }
        ev.kind = EventKind::Recv;
        for (ProcId q = 0; q < np; ++q) {
          if (q == p) continue;
          ev.peer = q;
          for (std::size_t mi = from; mi < upto; ++mi) {
            const Message in = msgs[mi];
            m.successors(ev, s, &in, out);
            add(EventKind::Recv, q, false, static_cast<int>(mi));
          }
        }
      }
    recv_seen[p][si] = upto;
  };
  for (bool again = true; again;) {
    again = false;
    for (ProcId p = 0; p < np; ++p)
      for (std::size_t si = 0; si < states[p].size(); ++si) {
        recv_seen[p].resize(states[p].size(), 0);
        const bool fresh = si >= expanded[p];
        if (!fresh && recv_seen[p][si] == msgs.size()) continue;
        expand(p, si, fresh);
        expanded[p] = std::max(expanded[p], si + 1);
        again = true;
      }
  }
  for (ProcId p = 0; p < np; ++p) {
    auto& ts = procs[p].transitions;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (std::size_t i = 0; i < states[p].size(); ++i)
      procs[p].states.push_back("s" + std::to_string(i));
  }
  std::vector<std::string> msg_names;
  for (std::size_t i = 0; i < msgs.size(); ++i) msg_names.push_back("m" + std::to_string(i));
  // Accepting tuples: all combinations accepted by the predicate.
  std::vector<std::vector<int>> acc;
  std::vector<int> choice(np, 0);
  for (;;) {
    std::vector<State> fin;
    for (ProcId p = 0; p < np; ++p) fin.push_back(states[p][choice[p]]);
    if (m.accepting(fin)) acc.push_back(choice);
    ProcId p = 0;
    for (; p < np; ++p) {
      if (++choice[p] < static_cast<int>(states[p].size())) break;
      choice[p] = 0;
    }
    if (p == np) break;
  }
  return Cfm(out_sig, msg_names.empty() ? std::vector<std::string>{"m0"} : msg_names,
             std::move(procs), std::move(acc));
}

}  // namespace cfmg
