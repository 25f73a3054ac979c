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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfmg/cfm.hpp"
#include "cfmg/gossip.hpp"

namespace cfmg {

// Processes p, q, r over the alphabet {b, a, diamond}.
inline SystemSignature demo_signature() { return SystemSignature({"p", "q", "r"}, {"b", "a", "diamond"}); }

struct FamilyParams {
  int n = 1;
  int k = 0;
};

inline void check_family(const FamilyParams& fp) {
  if (fp.n < 1) throw InputError("family: n must be positive");
  if (fp.k < 0 || fp.k >= fp.n) throw InputError("family: k must lie in [0, n)");
}

// Label of f_i in M^k: b for i < 2k-1, a afterwards.
inline std::string family_q_label(int k, int i) { return i < 2 * k - 1 ? "b" : "a"; }

// The MSC M^k: p sends to q and r alternately, r relays to q, and q gets
// the first k p-messages before the relayed ones.  Events are listed p, r, q.
inline Msc build_family_msc(const FamilyParams& fp, const SystemSignature& sig = demo_signature(),
                            const std::vector<std::string>* q_labels = nullptr) {
  check_family(fp);
  const int n = fp.n, k = fp.k;
  for (const char* x : {"p", "q", "r"})
    if (!sig.find_process(x)) throw InputError(std::string("family: signature lacks process ") + x);
  for (const char* x : {"b", "a", "diamond"})
    if (!sig.find_label(x)) throw InputError(std::string("family: signature lacks label ") + x);
  if (q_labels && static_cast<int>(q_labels->size()) != 2 * n)
    throw InputError("family: wrong number of q labels");
  MscBuilder b(sig.processes(), sig.alphabet());
  auto idx = [](char c, int i) { return std::string(1, c) + std::to_string(i); };
  for (int i = 0; i < 2 * n; ++i) b.event(idx('e', i), "p", i % 2 == 0 ? "b" : "a");
  for (int i = 0; i < 2 * n; ++i) b.event(idx('g', i), "r", "diamond");
  for (int i = 0; i < 2 * n; ++i) b.event(idx('f', i), "q", q_labels ? (*q_labels)[i] : family_q_label(k, i));
  for (int i = 0; i < k; ++i) b.message(idx('e', 2 * i), idx('f', i));
  for (int i = k; i < n; ++i) b.message(idx('e', 2 * i), idx('f', n + i));
  for (int i = 0; i < n; ++i) {
    b.message(idx('e', 2 * i + 1), idx('g', 2 * i));
    b.message(idx('g', 2 * i + 1), idx('f', k + i));
  }
  return b.build();
}

// Events of q whose label differs from the label of their latest p-event.
inline std::vector<EventId> gossip_violations(const Msc& m, ProcId p, ProcId q) {
  std::vector<EventId> out;
  for (EventId f : m.events_on(q)) {
    ExtEvent g = last_on_process(m, p, f);
    if (!g.is_event() || m.label(g.event()) != m.label(f)) out.push_back(f);
  }
  return out;
}

namespace detail {

inline std::vector<std::vector<int>> all_state_tuples(const std::vector<ProcessAutomaton>& procs) {
  std::vector<std::vector<int>> out{{}};
  for (const auto& a : procs) {
    std::vector<std::vector<int>> next;
    for (const auto& t : out)
      for (int s = 0; s < static_cast<int>(a.states.size()); ++s) {
        next.push_back(t);
        next.back().push_back(s);
      }
    out = std::move(next);
  }
  return out;
}

// Small helper for writing machines over the demo signature by name.
struct CfmSketch {
  SystemSignature sig = demo_signature();
  std::vector<std::string> messages{"b", "a"};
  std::vector<ProcessAutomaton> procs;

  CfmSketch() {
    procs.resize(sig.process_count());
    for (auto& a : procs) a.states = {"s0"};
  }
  ProcessAutomaton& at(const char* p) { return procs[sig.process(p)]; }
  int msg(const std::string& m) const {
    for (std::size_t i = 0; i < messages.size(); ++i)
      if (messages[i] == m) return static_cast<int>(i);
    throw std::logic_error("unknown message " + m);
  }
  void send(const char* p, int src, const char* label, const std::string& m, const char* to, int dst) {
    at(p).transitions.push_back({src, EventKind::Send, sig.label(label), msg(m), sig.process(to), dst});
  }
  void recv(const char* p, int src, const char* label, const std::string& m, const char* from, int dst) {
    at(p).transitions.push_back({src, EventKind::Recv, sig.label(label), msg(m), sig.process(from), dst});
  }
  Cfm build(std::optional<std::vector<std::vector<int>>> acc = std::nullopt) const {
    return Cfm(sig, messages, procs, acc ? *acc : all_state_tuples(procs));
  }
  // p announces its color to q and r.
  void colored_sender() {
    for (const char* c : {"b", "a"})
      for (const char* to : {"q", "r"}) send("p", 0, c, c, to, 0);
  }
  // r forwards the color it receives, remembering it in its state.
  void forwarding_relay() {
    at("r").states = {"s0", "s1", "s2"};
    recv("r", 0, "diamond", "b", "p", 1);
    send("r", 1, "diamond", "b", "q", 0);
    recv("r", 0, "diamond", "a", "p", 2);
    send("r", 2, "diamond", "a", "q", 0);
  }
  // r swallows whatever p sends and pings q with b.
  void blind_relay() {
    for (const char* m : {"b", "a"}) recv("r", 0, "diamond", m, "p", 0);
    send("r", 0, "diamond", "b", "q", 0);
  }
};

}  // namespace detail

// The naive machine: q outputs the color it receives, from p directly or
// forwarded by r.
inline Cfm naive_gossip_cfm() {
  detail::CfmSketch s;
  s.colored_sender();
  s.forwarding_relay();
  for (const char* c : {"b", "a"})
    for (const char* from : {"p", "r"}) s.recv("q", 0, c, c, from, 0);
  return s.build(std::vector<std::vector<int>>{{0, 0, 0}});
}

struct Claimant {
  std::string name;
  Cfm machine;
};

// Deterministic gossip attempts with at most three q-states.
inline std::vector<Claimant> demo_claimants() {
  std::vector<Claimant> out;
  {
    // q trusts p and lets relayed events carry anything.
    detail::CfmSketch s;
    s.colored_sender();
    s.blind_relay();
    for (const char* c : {"b", "a"}) {
      s.recv("q", 0, c, c, "p", 0);
      s.recv("q", 0, c, "b", "r", 0);
    }
    out.push_back({"echo", s.build()});
  }
  {
    // q remembers the last color heard from p and repeats it on relays.
    detail::CfmSketch s;
    s.colored_sender();
    s.blind_relay();
    s.at("q").states = {"none", "saw-b", "saw-a"};
    for (int st = 0; st < 3; ++st) {
      s.recv("q", st, "b", "b", "p", 1);
      s.recv("q", st, "a", "a", "p", 2);
    }
    s.recv("q", 0, "b", "b", "r", 0);
    s.recv("q", 1, "b", "b", "r", 1);
    s.recv("q", 2, "a", "b", "r", 2);
    out.push_back({"p-memory", s.build()});
  }
  {
    // q alternates between two states and announces anything.
    detail::CfmSketch s;
    s.colored_sender();
    s.blind_relay();
    s.at("q").states = {"even", "odd"};
    for (int st = 0; st < 2; ++st)
      for (const char* c : {"b", "a"})
        for (const char* m : {"b", "a"})
          for (const char* from : {"p", "r"}) s.recv("q", st, c, m, from, 1 - st);
    out.push_back({"toggle", s.build()});
  }
  {
    // q trusts r's forwarded color and lets direct messages carry anything.
    detail::CfmSketch s;
    s.colored_sender();
    s.forwarding_relay();
    for (const char* c : {"b", "a"})
      for (const char* m : {"b", "a"}) {
        s.recv("q", 0, c, m, "p", 0);
        if (std::string(c) == m) s.recv("q", 0, c, m, "r", 0);
      }
    out.push_back({"r-trusting", s.build()});
  }
  return out;
}

enum class RefutationVerdict { Counterexample, NotDeterministic, NoCollision };

inline const char* verdict_name(RefutationVerdict v) {
  switch (v) {
    case RefutationVerdict::Counterexample: return "counterexample";
    case RefutationVerdict::NotDeterministic: return "not-deterministic";
    case RefutationVerdict::NoCollision: return "no-collision";
  }
  return "?";
}

struct Refutation {
  RefutationVerdict verdict = RefutationVerdict::NoCollision;
  // "splice": accepted run glued from two family members; "completion":
  // the machine rejects M^k but accepts its shape with other q-labels;
  // "rejected": the machine rejects the correct M^k.
  std::string method;
  std::optional<Msc> msc;
  bool accepted = false;             // accepts(C, msc), machine-checked
  std::vector<EventId> violations;   // q-events with a wrong label
  int n = 0, k = -1, k2 = -1;
  std::vector<std::pair<int, int>> q_states;  // (s_k, t_k) per simulated k
};

namespace detail {

// Same machine with every q-transition relabeled to `label`, so a run on
// a shape with uniform q-labels reveals which labels the machine picks.
inline Cfm erase_q_labels(const Cfm& c, ProcId q, LabelId label) {
  auto procs = c.automata();
  for (auto& t : procs[q].transitions) t.label = label;
  return Cfm(c.signature(), c.messages(), procs, c.accepting_tuples(), c.generalized_initial());
}

inline std::vector<std::string> q_labels_of(const Msc& m, ProcId q) {
  std::vector<std::string> out;
  for (EventId f : m.events_on(q)) out.push_back(m.signature().label_name(m.label(f)));
  return out;
}

}  // namespace detail

// Pumps a deterministic gossip claimant over the family M^k and returns a
// verified MSC on which it is wrong.
inline Refutation refute_deterministic(const Cfm& c, std::uint64_t budget = 10'000'000) {
  Refutation res;
  if (!is_deterministic(c)) {
    res.verdict = RefutationVerdict::NotDeterministic;
    return res;
  }
  const auto& sig = c.signature();
  const ProcId p = sig.process("p"), q = sig.process("q");
  SearchContext ctx;
  ctx.budget = budget;
  auto run_of = [&](const Msc& m) {
    auto r = find_accepting_run(c, m, SlotTable(m.size(), 0), ctx);
    if (r.outcome == Outcome::Budget) throw BudgetError();
    return r;
  };
  auto finish = [&](Msc m, std::string method, int n, int k, int k2) {
    res.verdict = RefutationVerdict::Counterexample;
    res.method = std::move(method);
    res.n = n;
    res.k = k;
    res.k2 = k2;
    res.accepted = run_of(m).outcome == Outcome::Found;
    res.violations = gossip_violations(m, p, q);
    res.msc = std::move(m);
    return res;
  };

  const int sq = static_cast<int>(c.automaton(q).states.size());
  const int n0 = sq * sq + 1;
  // The pair (0, 1) can collide without changing any label, so one more
  // family member may be needed before pigeonhole yields a proper pair.
  for (int n = n0; n <= n0 + 1; ++n) {
    res.q_states.clear();
    std::vector<Msc> family;
    for (int k = 0; k < n; ++k) {
      Msc mk = build_family_msc({n, k}, sig);
      auto r = run_of(mk);
      if (r.outcome != Outcome::Found) {
        // Let the machine choose q's labels on the same shape.
        Cfm loose = detail::erase_q_labels(c, q, sig.label("b"));
        std::vector<std::string> uniform(2 * n, "b");
        Msc shape = build_family_msc({n, k}, sig, &uniform);
        auto lr = find_accepting_run(loose, shape, SlotTable(shape.size(), 0), ctx);
        if (lr.outcome == Outcome::Budget) throw BudgetError();
        if (lr.outcome == Outcome::Found) {
          std::vector<std::string> chosen;
          for (EventId f : shape.events_on(q))
            chosen.push_back(sig.label_name(c.automaton(q).transitions[lr.run.steps[f].tag].label));
          return finish(build_family_msc({n, k}, sig, &chosen), "completion", n, k, -1);
        }
        return finish(std::move(mk), "rejected", n, k, -1);
      }
      const auto& fs = mk.events_on(q);
      const int s = k == 0 ? c.automaton(q).initial : r.run.steps[fs[k - 1]].target[0];
      const int t = r.run.steps[fs[k + n - 1]].target[0];
      res.q_states.push_back({s, t});
      family.push_back(std::move(mk));
    }
    for (int k = 0; k < n; ++k)
      for (int k2 = k + 1; k2 < n; ++k2) {
        if (res.q_states[k] != res.q_states[k2]) continue;
        // q behaves as in M^k2 in the middle part, as in M^k elsewhere.
        auto labels = detail::q_labels_of(family[k], q);
        auto other = detail::q_labels_of(family[k2], q);
        for (int i = 0; i < n; ++i) labels[k + i] = other[k2 + i];
        Msc m = build_family_msc({n, k}, sig, &labels);
        if (gossip_violations(m, p, q).empty()) continue;
        return finish(std::move(m), "splice", n, k, k2);
      }
  }
  res.verdict = RefutationVerdict::NoCollision;
  return res;
}

inline json refutation_to_json(const Refutation& r) {
  json o;
  o["verdict"] = verdict_name(r.verdict);
  if (r.verdict != RefutationVerdict::Counterexample) return o;
  o["method"] = r.method;
  o["n"] = r.n;
  o["k"] = r.k;
  if (r.k2 >= 0) o["k2"] = r.k2;
  o["accepted"] = r.accepted;
  json v = json::array();
  for (EventId e : r.violations) v.push_back(r.msc->id(e));
  o["violations"] = v;
  o["msc"] = msc_to_json(*r.msc);
  return o;
}

}  // namespace cfmg
