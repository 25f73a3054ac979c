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

// Property checks shared by the unit tests (small counts) and the
// acceptance runner (full counts).  Every check compares library results
// with the brute-force helpers of test_util.hpp.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "test_util.hpp"

namespace cfmg::testing {

struct Tally {
  long trials = 0;
  long failures = 0;
  long witnesses = 0;  // trials where the interesting side was hit
  std::vector<std::string> notes;

  template <typename F>
  void check(bool ok, F&& what) {
    ++trials;
    if (ok) return;
    ++failures;
    if (notes.size() < 6) notes.push_back(what());
  }
  void check(bool ok, const char* what) {
    check(ok, [&] { return std::string(what); });
  }
  void merge(const Tally& o) {
    trials += o.trials;
    failures += o.failures;
    witnesses += o.witnesses;
    for (const auto& n : o.notes)
      if (notes.size() < 6) notes.push_back(n);
  }
  bool ok() const { return failures == 0 && trials > 0; }
};

// Extended events as ints: -1 bottom, -2 top.
inline constexpr int kBot = -1;
inline constexpr int kTop = -2;

inline int lib_code(ExtEvent x) { return x.is_bottom() ? kBot : x.is_top() ? kTop : x.event(); }

inline bool ext_leq(const Msc& m, int a, int b) {
  if (a == kBot || b == kTop) return true;
  if (a == kTop || b == kBot) return false;
  return reaches(m, a, b);
}

inline int naive_fa(const Msc& m, const PathExpr& x, const PathExpr& y, EventId e) {
  int g = naive_last(m, x, e);
  if (g < 0) return kBot;
  int h = naive_first(m, y, g);
  return h < 0 ? kTop : h;
}

inline PathExpr then_star(const PathExpr& x) { return normalize(concat(x, star_path())); }
inline PathExpr star_then(const PathExpr& x) { return normalize(concat(star_path(), x)); }
inline PathExpr plus_then(const PathExpr& x) { return normalize(concat(plus_path(), x)); }

inline std::string describe(const Msc& m) { return msc_to_json(m).dump(); }

inline Msc with_labels(const Msc& m, const std::function<LabelId(EventId)>& label) {
  std::vector<LabelId> v(m.size());
  for (EventId e = 0; e < m.size(); ++e) v[e] = label(e);
  return m.relabeled(v);
}

// ---- Sample MSCs ----

inline Tally check_fig3(const Msc& m) {
  Tally t;
  const auto& sig = m.signature();
  const PathExpr pi = parse_path(sig, "->* msg(p,q) ->*");
  const PathExpr pi2 = parse_path(sig, "->* msg(p,r) ->* msg(r,q) ->*");
  // true where pi' is strictly below pi, false where pi is below pi'.
  const bool second_below[8] = {true, true, true, false, false, false, true, false};
  for (int i = 0; i < 8; ++i) {
    const std::string id = "f" + std::to_string(i);
    auto po = preorder_at(m, {pi, pi2}, m.event(id));
    bool ok = second_below[i] ? (po.leq[1][0] && !po.leq[0][1]) : po.leq[0][1];
    t.check(ok, [&] { return "preorder at " + id; });
  }
  struct Image {
    const PathExpr* x;
    PathExpr y;
    const char* from;
    const char* to;
  };
  const std::vector<Image> images = {
      {&pi, star_then(pi2), "f1", "f3"}, {&pi, star_then(pi2), "f2", "f3"},
      {&pi, star_then(pi2), "f3", "f3"}, {&pi2, plus_then(pi), "f4", "f6"},
      {&pi2, plus_then(pi), "f5", "f6"}, {&pi2, plus_then(pi), "f6", "f6"},
      {&pi, star_then(pi2), "f7", "f7"},
  };
  for (const auto& im : images) {
    ExtEvent got = f_pair(m, *im.x, im.y, m.event(im.from));
    t.check(got == ExtEvent::of(m.event(im.to)), [&] {
      return std::string("image of ") + im.from + " under " + print_path(sig, *im.x) + " / " +
             print_path(sig, im.y);
    });
  }
  return t;
}

inline Tally check_fig2(const Msc& m) {
  Tally t;
  const auto& sig = m.signature();
  auto rel = eval_path(m, parse_path(sig, "msg(p,q) ->*"));
  t.check(rel.get(m.event("e4"), m.event("f5")), "(e4,f5) missing from msg(p,q) ->*");
  auto rel2 = eval_path(m, parse_path(sig, "[b] -> [b] msg(p,q)"));
  std::set<std::pair<EventId, EventId>> pairs;
  for (EventId e = 0; e < m.size(); ++e)
    for (EventId f = 0; f < m.size(); ++f)
      if (rel2.get(e, f)) pairs.insert({e, f});
  t.check(pairs == std::set<std::pair<EventId, EventId>>{{m.event("e3"), m.event("f5")}},
          "[b] -> [b] msg(p,q) is not {(e3,f5)}");
  const ProcId p = sig.process("p"), q = sig.process("q"), r = sig.process("r");
  t.check(last_on_process(m, p, m.event("f5")) == ExtEvent::of(m.event("e5")), "last_p(f5) != e5");
  t.check(last_on_process(m, p, m.event("f2")) == ExtEvent::of(m.event("e2")), "last_p(f2) != e2");
  using PairSet = std::set<std::pair<ProcId, ProcId>>;
  auto comp_of = [&](const char* x) { return comp(sig, parse_path(sig, x)); };
  t.check(comp_of("msg(p,r) ->* msg(r,q) ->*") == PairSet{{p, q}}, "Comp of msg(p,r) ->* msg(r,q) ->*");
  t.check(comp_of("msg(p,q) ->* msg(q,p)") == PairSet{{p, p}}, "Comp of msg(p,q) ->* msg(q,p)");
  t.check(comp_of("[b] -> [b] msg(p,q)") == PairSet{{p, q}}, "Comp of [b] -> [b] msg(p,q)");
  t.check(comp_of("msg(p,q) ->* msg(r,p)").empty(), "Comp of msg(p,q) ->* msg(r,p)");
  (void)r;
  return t;
}

// ---- Gossip ----

inline SlotTable naive_gossip_table(const Msc& m) {
  const auto& sig = m.signature();
  SlotTable t(m.size(), sig.process_count());
  for (EventId e = 0; e < m.size(); ++e)
    for (ProcId p = 0; p < sig.process_count(); ++p) {
      int g = naive_last_on(m, p, e);
      t.set(e, p, g < 0 ? sig.label_count() : m.label(g));
    }
  return t;
}

// The machine accepts the oracle annotation and rejects every annotation
// differing in one entry.
inline void gossip_equivalence(const Machine& g, const Msc& m, Tally& t,
                               std::uint64_t budget = 10'000'000) {
  auto cache = std::make_shared<StageCache>();
  auto run = [&](const SlotTable& a) {
    SearchContext ctx;
    ctx.budget = budget;
    ctx.cache = cache;
    return accepts(g, m, a, ctx);
  };
  const SlotTable ann = naive_gossip_table(m);
  const int np = m.signature().process_count();
  const int values = m.signature().label_count() + 1;
  Outcome o = run(ann);
  t.check(o == Outcome::Found, [&] { return std::string("oracle ") + outcome_name(o) + " on " + describe(m); });
  for (EventId e = 0; e < m.size(); ++e)
    for (ProcId p = 0; p < np; ++p)
      for (int v = 0; v < values; ++v) {
        if (v == ann.get(e, p)) continue;
        SlotTable mut = ann;
        mut.set(e, p, v);
        Outcome mo = run(mut);
        t.check(mo == Outcome::NoRun, [&] {
          return "mutation " + m.id(e) + "[" + std::to_string(p) + "]=" + std::to_string(v) + " " +
                 outcome_name(mo) + " on " + describe(m);
        });
      }
}

// All shapes with at most three messages and four events per process, each
// with a constant and an alternating labeling.
inline std::vector<Msc> gossip_structured_corpus() {
  std::vector<Msc> out;
  for (const Msc& s : enumerate_msc_shapes(pqr(2), 3, 4)) {
    out.push_back(s);
    out.push_back(with_labels(s, [&](EventId e) { return (s.position(e) + s.loc(e)) % 2; }));
  }
  return out;
}

// ---- Path properties ----

struct PathInstance {
  Msc m;
  ProcId p = 0, q = 0;
  PathExpr x, y;
};

inline PathInstance random_path_instance(std::mt19937_64& rng, int max_events, int max_len) {
  PathInstance in;
  in.m = small_msc(rng, max_events);
  const auto& sig = in.m.signature();
  in.p = detail::uniform(rng, 0, 2);
  in.q = detail::uniform(rng, 0, 2);
  in.x = random_path(rng, sig, in.p, in.q, max_len - 1);
  in.y = random_path(rng, sig, in.p, in.q, max_len - 1);
  return in;
}

inline std::pair<EventId, EventId> ordered_pair_on(std::mt19937_64& rng, const Msc& m, ProcId r) {
  const auto& evs = m.events_on(r);
  const int n = static_cast<int>(evs.size());
  int i = detail::uniform(rng, 0, n - 1);
  int j = detail::uniform(rng, i, n - 1);
  return {evs[i], evs[j]};
}

// Monotonicity of last and first, and absorption of a trailing or leading
// ->*.  Library values are compared with the brute-force ones as well.
inline Tally monotonicity_trials(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  Tally t;
  for (int i = 0; i < trials; ++i) {
    auto in = random_path_instance(rng, 5, 4);
    const Msc& m = in.m;
    auto [e, f] = ordered_pair_on(rng, m, in.q);
    const int le = naive_last(m, in.x, e), lf = naive_last(m, in.x, f);
    bool ok = lib_code(last(m, in.x, e)) == le && lib_code(last(m, in.x, f)) == lf;
    if (le >= 0 && lf >= 0) {
      ++t.witnesses;
      ok = ok && reaches(m, le, lf);
    }
    if (lf >= 0) ok = ok && naive_last(m, then_star(in.x), f) == lf && lib_code(last(m, then_star(in.x), f)) == lf;

    auto [e2, f2] = ordered_pair_on(rng, m, in.p);
    const int fe = naive_first(m, in.x, e2), ff = naive_first(m, in.x, f2);
    ok = ok && lib_code(first(m, in.x, e2)) == (fe < 0 ? kTop : fe) &&
         lib_code(first(m, in.x, f2)) == (ff < 0 ? kTop : ff);
    if (fe >= 0 && ff >= 0) ok = ok && reaches(m, fe, ff);
    if (fe >= 0)
      ok = ok && naive_first(m, star_then(in.x), e2) == fe && lib_code(first(m, star_then(in.x), e2)) == fe;
    t.check(ok, [&] { return "trial " + std::to_string(i) + " path " + print_path(m.signature(), in.x) + " on " + describe(m); });
  }
  return t;
}

// Monotonicity of f^{pi,pi'} along the process order.
inline Tally pair_monotonicity_trials(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  Tally t;
  for (int i = 0; i < trials; ++i) {
    auto in = random_path_instance(rng, 5, 4);
    const Msc& m = in.m;
    auto [e, f] = ordered_pair_on(rng, m, in.q);
    const int a = naive_fa(m, in.x, in.y, e), b = naive_fa(m, in.x, in.y, f);
    bool ok = true;
    if (a >= 0 && b >= 0) {
      ++t.witnesses;
      ok = reaches(m, a, b);
    }
    try {
      ok = ok && lib_code(f_pair(m, in.x, in.y, e)) == a && lib_code(f_pair(m, in.x, in.y, f)) == b;
    } catch (const InputError&) {
      // No unique source process: only the brute-force side applies.
    }
    t.check(ok, [&] { return "trial " + std::to_string(i) + " on " + describe(m); });
  }
  return t;
}

// The three-case characterization of the preorder at q-events.
inline Tally pair_characterization_trials(std::uint64_t seed, int trials, long* case_counts = nullptr) {
  std::mt19937_64 rng(seed);
  Tally t;
  for (int i = 0; i < trials; ++i) {
    auto in = random_path_instance(rng, 5, 4);
    const Msc& m = in.m;
    const auto& evs = m.events_on(in.q);
    const EventId f = evs[detail::uniform(rng, 0, static_cast<int>(evs.size()) - 1)];
    auto below = [&](const PathExpr& a, const PathExpr& b, EventId g) {
      return ext_leq(m, naive_last(m, a, g), naive_last(m, b, g));
    };
    const PathExpr xs = then_star(in.x), ys = then_star(in.y);
    const EventId e = m.prev(f);
    int which;
    bool lhs, rhs;
    if (e < 0 || (below(ys, xs, e) && !below(xs, ys, e))) {
      which = e < 0 ? 0 : 1;
      lhs = below(in.x, in.y, f);
      rhs = naive_last(m, in.x, f) < 0 || naive_fa(m, in.x, star_then(in.y), f) == f;
    } else {
      which = 2;
      lhs = below(in.y, in.x, f) && !below(in.x, in.y, f);
      rhs = (naive_last(m, in.y, f) < 0 && naive_last(m, in.x, f) >= 0) ||
            naive_fa(m, in.y, plus_then(in.x), f) == f;
    }
    if (case_counts) ++case_counts[which];
    if (lhs) ++t.witnesses;
    t.check(lhs == rhs, [&] {
      return "case " + std::to_string(which + 1) + " at " + m.id(f) + " paths " +
             print_path(m.signature(), in.x) + " / " + print_path(m.signature(), in.y) + " on " + describe(m);
    });
  }
  return t;
}

// ---- Label machines ----

// Accepts the annotation and rejects every change of one listed slot on one
// listed event.
inline void annotation_equivalence(const Machine& mach, const Msc& m, const SlotTable& annot,
                                   const std::vector<EventId>& events, const std::vector<int>& slots,
                                   int domain, Tally& t, const std::string& what) {
  Outcome o = accepts(mach, m, annot);
  t.check(o == Outcome::Found, [&] { return what + ": correct annotation " + outcome_name(o) + " on " + describe(m); });
  for (EventId e : events)
    for (int s : slots)
      for (int v = 0; v < domain; ++v) {
        if (v == annot.get(e, s)) continue;
        SlotTable mut = annot;
        mut.set(e, s, v);
        Outcome mo = accepts(mach, m, mut);
        t.check(mo == Outcome::NoRun, [&] {
          return what + ": mutation at " + m.id(e) + " " + outcome_name(mo) + " on " + describe(m);
        });
      }
}

inline std::vector<EventId> all_events(const Msc& m) {
  std::vector<EventId> out(m.size());
  for (EventId e = 0; e < m.size(); ++e) out[e] = e;
  return out;
}

enum class LabelMachine { Last, First, Fa, Fixpoint, Preorder };

inline const char* machine_name(LabelMachine l) {
  switch (l) {
    case LabelMachine::Last: return "last-label";
    case LabelMachine::First: return "first-label";
    case LabelMachine::Fa: return "f-label";
    case LabelMachine::Fixpoint: return "fixpoint";
    case LabelMachine::Preorder: return "preorder";
  }
  return "?";
}

inline Tally label_machine_trials(LabelMachine which, std::uint64_t seed, int instances, int max_events = 4) {
  std::mt19937_64 rng(seed);
  Tally t;
  const std::string name = machine_name(which);
  for (int i = 0; i < instances; ++i) {
    auto in = random_path_instance(rng, max_events, 4);
    while (which == LabelMachine::Preorder && in.x == in.y)
      in.y = random_path(rng, in.m.signature(), in.p, in.q, 3);
    const Msc& m = in.m;
    const auto& sig = m.signature();
    const int L = sig.label_count();
    const std::string what = name + " #" + std::to_string(i);
    const auto& qev = m.events_on(in.q);
    switch (which) {
      case LabelMachine::Last: {
        LastLabelMachine mach(sig, in.x, L, kInputLabel, 0);
        SlotTable a(m.size(), 1);
        for (EventId e = 0; e < m.size(); ++e) {
          int g = naive_last(m, in.x, e);
          a.set(e, 0, g < 0 ? L : m.label(g));
        }
        annotation_equivalence(mach, m, a, all_events(m), {0}, L + 1, t, what);
        break;
      }
      case LabelMachine::First: {
        FirstLabelMachine mach(sig, in.x, L, kInputLabel, 0);
        SlotTable a(m.size(), 1);
        for (EventId e = 0; e < m.size(); ++e) {
          int g = naive_first(m, in.x, e);
          a.set(e, 0, g < 0 ? L : m.label(g));
        }
        annotation_equivalence(mach, m, a, all_events(m), {0}, L + 1, t, what);
        break;
      }
      case LabelMachine::Fa: {
        FaLabelMachine mach(sig, in.p, in.q, in.x, in.y, L, kInputLabel, 0);
        SlotTable a(m.size(), 1);
        for (EventId e : qev) {
          int g = naive_fa(m, in.x, in.y, e);
          a.set(e, 0, g == kBot ? L : g == kTop ? L + 1 : m.label(g));
        }
        annotation_equivalence(mach, m, a, qev, {0}, L + 2, t, what);
        break;
      }
      case LabelMachine::Fixpoint: {
        FixpointMachine mach(sig, in.p, in.q, in.x, in.y, 0);
        SlotTable a(m.size(), 1);
        for (EventId e : qev) {
          a.set(e, 0, naive_fa(m, in.x, in.y, e) == e ? 1 : 0);
          t.witnesses += a.get(e, 0);
        }
        annotation_equivalence(mach, m, a, qev, {0}, 2, t, what);
        break;
      }
      case LabelMachine::Preorder: {
        auto pc = build_preorder_cfm(sig, in.p, in.q, {in.x, in.y});
        SlotTable a(m.size(), pc.machine->slot_count());
        for (EventId e : qev) {
          a.set(e, pc.slot(0, 1), ext_leq(m, naive_last(m, in.x, e), naive_last(m, in.y, e)) ? 1 : 0);
          a.set(e, pc.slot(1, 0), ext_leq(m, naive_last(m, in.y, e), naive_last(m, in.x, e)) ? 1 : 0);
        }
        annotation_equivalence(*pc.machine, m, a, qev, {pc.slot(0, 1), pc.slot(1, 0)}, 2, t, what);
        break;
      }
    }
  }
  return t;
}

// ---- Impossibility ----

inline std::vector<std::string> naive_gossip_violations(const Msc& m) {
  const auto& sig = m.signature();
  const ProcId p = sig.process("p"), q = sig.process("q");
  std::vector<std::string> out;
  for (EventId f : m.events_on(q)) {
    int g = naive_last_on(m, p, f);
    if (g < 0 || m.label(g) != m.label(f)) out.push_back(m.id(f));
  }
  return out;
}

inline std::set<std::pair<std::string, std::string>> message_ids(const Msc& m) {
  std::set<std::pair<std::string, std::string>> out;
  for (EventId e = 0; e < m.size(); ++e)
    if (m.kind(e) == EventKind::Send) out.insert({m.id(e), m.id(m.partner(e))});
  return out;
}

// A refutation is sound when the returned MSC is accepted and its
// q-labels disagree with the gossip oracle somewhere.
inline void check_refutation(const Cfm& c, const std::string& name, Tally& t) {
  Refutation r = refute_deterministic(c);
  bool ok = r.verdict == RefutationVerdict::Counterexample && r.msc && r.accepted &&
            accepts(c, *r.msc) == Outcome::Found && !naive_gossip_violations(*r.msc).empty();
  t.check(ok, [&] { return name + ": no verified counterexample (" + verdict_name(r.verdict) + ")"; });
}

inline Tally impossibility_checks(const Msc& fig2, const Cfm& fig1) {
  Tally t;
  t.check(accepts(fig1, fig2) == Outcome::Found, "naive machine rejects fig2");
  t.check(naive_gossip_violations(fig2) == std::vector<std::string>{"f2", "f5"},
          "fig2 violations are not exactly f2, f5");
  check_refutation(fig1, "naive", t);
  int claimants = 0;
  for (const auto& cl : demo_claimants()) {
    const int sq = static_cast<int>(cl.machine.automaton(cl.machine.signature().process("q")).states.size());
    t.check(is_deterministic(cl.machine) && sq <= 3, [&] { return cl.name + " is not a small deterministic claimant"; });
    check_refutation(cl.machine, cl.name, t);
    ++claimants;
  }
  t.check(claimants >= 3, "fewer than three claimants");

  const int n = 5, k = 2;
  Msc fam = build_family_msc({n, k});
  t.check(fam.size() == 30, "family (5,2) does not have 30 events");
  std::set<std::pair<std::string, std::string>> want;
  auto id = [](char c, int i) { return std::string(1, c) + std::to_string(i); };
  for (int i = 0; i < n; ++i) {
    want.insert({id('e', 2 * i), i < k ? id('f', i) : id('f', n + i)});
    want.insert({id('e', 2 * i + 1), id('g', 2 * i)});
    want.insert({id('g', 2 * i + 1), id('f', k + i)});
  }
  t.check(message_ids(fam) == want, "family (5,2) message pattern differs");
  for (int i = 0; i < 2 * n; ++i) {
    t.check(fam.label(fam.event(id('e', i))) == fam.signature().label(i % 2 == 0 ? "b" : "a"), "p labels");
    t.check(fam.label(fam.event(id('g', i))) == fam.signature().label("diamond"), "r labels");
  }
  t.check(naive_gossip_violations(fam).empty(), "family (5,2) violates the gossip property");
  return t;
}

// ---- Temporal logic ----

inline SystemSignature tl_signature(int processes) {
  return SystemSignature(default_process_names(processes), default_alphabet(2));
}

inline Tally tl_translation_trials(std::uint64_t seed, int formulas, int mscs, int processes,
                                   int max_events, std::uint64_t budget = 50'000'000) {
  std::mt19937_64 rng(seed);
  const auto sig = tl_signature(processes);
  std::vector<Msc> corpus;
  for (int i = 0; i < mscs; ++i) corpus.push_back(random_msc(rng, sig, max_events));
  Tally t;
  for (int i = 0; i < formulas; ++i) {
    TlPtr f = random_tl(rng, sig, 3);
    CompiledTl c = compile_tl(sig, f);
    for (const auto& m : corpus) {
      auto r = check_translation(c, m, *f, budget);
      t.check(r.ok, [&] {
        return print_tl(*f) + (r.budget ? " budget" : r.accepted ? " accepted a mutation" : " rejected truth") +
               " on " + describe(m);
      });
    }
  }
  return t;
}

// Derived modalities against their expansions; keys X, Y, U, O.
inline std::map<std::string, Tally> tl_sugar_trials(std::uint64_t seed, int formulas, int mscs,
                                                    int processes, int max_events) {
  std::mt19937_64 rng(seed);
  const auto sig = tl_signature(processes);
  std::vector<Msc> corpus;
  for (int i = 0; i < mscs; ++i) corpus.push_back(random_msc(rng, sig, max_events));
  std::map<std::string, Tally> out;
  for (int i = 0; i < formulas; ++i) {
    TlPtr a = random_tl(rng, sig, 2), b = random_tl(rng, sig, 2);
    for (ProcId p = 0; p < sig.process_count(); ++p) {
      const auto& pn = sig.process_name(p);
      const std::vector<std::pair<std::string, TlPtr>> forms = {
          {"X", tl::next(pn, a)}, {"Y", tl::yest(pn, a)}, {"U", tl::proc_until(pn, a, b)}, {"O", tl::first(pn, a)}};
      for (const auto& [key, f] : forms) {
        TlPtr g = expand_derived(f);
        for (const auto& m : corpus)
          out[key].check(eval_tl(m, *f) == eval_tl(m, *g), [&] { return print_tl(*f) + " on " + describe(m); });
      }
    }
  }
  return out;
}

inline TlPtr swap_temporal(const TlPtr& f) {
  using K = TlFormula::Kind;
  TlPtr l = f->left ? swap_temporal(f->left) : nullptr;
  TlPtr r = f->right ? swap_temporal(f->right) : nullptr;
  K k = f->kind == K::Until ? K::Since : f->kind == K::Since ? K::Until : f->kind;
  return tl::make(k, f->name, l, r);
}

// A formula holds at e iff its past/future swap holds at e in the mirror.
inline Tally tl_duality_trials(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  const auto sig = tl_signature(3);
  Tally t;
  for (int i = 0; i < trials; ++i) {
    Msc m = random_msc(rng, sig, 4);
    TlPtr f = tl::until(random_tl(rng, sig, 2), random_tl(rng, sig, 2));
    Msc r = mirror_msc(m);
    auto a = eval_tl(m, *f);
    auto b = eval_tl(r, *swap_temporal(f));
    bool ok = true;
    for (EventId e = 0; e < m.size(); ++e) {
      ok = ok && a[e] == b[r.event(m.id(e))];
      t.witnesses += a[e];
    }
    t.check(ok, [&] { return print_tl(*f) + " on " + describe(m); });
  }
  return t;
}

// ---- CFM infrastructure ----

// Transitions a run may use at e, by kind, label and peer.
inline std::vector<int> matching_transitions(const Cfm& c, const Msc& m, EventId e) {
  std::vector<int> out;
  const auto& ts = c.automaton(m.loc(e)).transitions;
  for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
    const auto& tr = ts[i];
    if (tr.kind == m.kind(e) && tr.label == m.label(e) && (tr.kind == EventKind::Local || tr.peer == m.peer(e)))
      out.push_back(i);
  }
  return out;
}

// Tries every assignment of transitions to events.
inline bool exists_run_bruteforce(const Cfm& c, const Msc& m) {
  std::vector<std::vector<int>> opts;
  for (EventId e = 0; e < m.size(); ++e) {
    opts.push_back(matching_transitions(c, m, e));
    if (opts.back().empty()) return false;
  }
  std::vector<std::size_t> idx(m.size(), 0);
  CfmRun run(m.size());
  for (;;) {
    for (EventId e = 0; e < m.size(); ++e) run[e] = opts[e][idx[e]];
    if (validate_run(c, m, run).ok) return true;
    EventId e = 0;
    for (; e < m.size(); ++e) {
      if (++idx[e] < opts[e].size()) break;
      idx[e] = 0;
    }
    if (e == m.size()) return false;
  }
}

inline Tally cfm_completeness_trials(std::uint64_t seed, int cfms_per_shape) {
  std::mt19937_64 rng(seed);
  const auto sig = pqr(2);
  Tally t;
  for (const Msc& shape : enumerate_msc_shapes(sig, 3, 6)) {
    if (shape.size() > 6) continue;
    for (int k = 0; k < cfms_per_shape; ++k) {
      Msc m = with_labels(shape, [&](EventId) { return detail::uniform(rng, 0, 1); });
      Cfm c = random_cfm(rng, sig, 2, 2, 0.45);
      SearchContext ctx;
      auto r = find_accepting_run(c, m, SlotTable(m.size(), 0), ctx);
      const bool brute = exists_run_bruteforce(c, m);
      bool ok = (r.outcome == Outcome::Found) == brute && r.outcome != Outcome::Budget;
      if (r.outcome == Outcome::Found) ok = ok && validate_run(c, m, to_cfm_run(r.run)).ok;
      t.witnesses += brute;
      t.check(ok, [&] { return "search " + std::string(outcome_name(r.outcome)) + " vs brute force on " + describe(m); });
    }
  }
  return t;
}

inline bool accepted(const Machine& c, const Msc& m) { return accepts(c, m) == Outcome::Found; }

// L(mirror C) = mirror L(C), L(C1 x C2) = L(C1) n L(C2), L(h(C)) = h(L(C)).
inline Tally cfm_equation_trials(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  const auto sig = pqr(2);
  const SystemSignature target(sig.processes(), {"b"});
  const std::vector<LabelId> h{0, 0};
  Tally t;
  for (int i = 0; i < trials; ++i) {
    Msc m = small_msc(rng, 3);
    Cfm c1 = random_cfm(rng, sig, 2, 2, 0.5);
    Cfm c2 = random_cfm(rng, sig, 2, 2, 0.5);
    const bool a1 = accepted(c1, m), a2 = accepted(c2, m);
    t.witnesses += a1;
    const Msc r = mirror_msc(m);
    t.check(accepted(mirror_cfm(c1), r) == a1, [&] { return "mirror on " + describe(m); });
    t.check(accepted(mirror_cfm(c1, true), r) == a1, [&] { return "lowered mirror on " + describe(m); });
    t.check(accepted(product(c1, c2), m) == (a1 && a2), [&] { return "product on " + describe(m); });

    const Msc mi = m.relabeled(std::vector<LabelId>(m.size(), 0), &target);
    bool pre = false;
    const int n = m.size();
    for (long bits = 0; bits < (1L << n) && !pre; ++bits) {
      Msc cand = with_labels(m, [&](EventId e) { return static_cast<LabelId>((bits >> e) & 1); });
      pre = accepted(c1, cand);
    }
    t.check(accepted(relabel(c1, target, h), mi) == pre, [&] { return "relabel on " + describe(m); });
  }
  return t;
}

}  // namespace cfmg::testing
