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

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cfmg/labels.hpp"
#include "cfmg/pipeline.hpp"

namespace cfmg {

// Four colors: two computed ones alternating along the 1-events of q and
// two guessed ones for the 0-events.
enum Color : int { kColorOne = 0, kColorTwo = 1, kColorHatOne = 2, kColorHatTwo = 3 };

// Recognizes (M, gamma) with gamma(e) = 1 iff f^{pi1,pi2}(e) = e for all
// events e of q.  Colors are guessed internally and projected away.
class FixpointMachine : public Machine {
 public:
  FixpointMachine(SystemSignature sig, ProcId p, ProcId q, PathExpr pi1, PathExpr pi2,
                  int slot_gamma)
      : sig_(std::move(sig)), q_(q), slot_(slot_gamma) {
    if (!in_paths(sig_, pi1, p, q) || !in_paths(sig_, pi2, p, q))
      throw InputError("path expressions are not compatible with the process pair");
    core_ = detail::FaCore(sig_, pi1, pi2, 4);
  }

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return slot_ + 1; }
  std::vector<int> read_slots() const override { return {slot_}; }
  // [parity of 1-events so far | fa-core state]
  State initial_state(ProcId) const override { return {0}; }

  void successors(const EventView& ev, const State& s, const Message* in,
                  std::vector<Step>& out) const override {
    const int parity = s[0];
    const State inner(s.begin() + 1, s.end());
    auto push = [&](int color, int next_parity, bool check, int gamma) {
      core_.successors(ev, inner, in, color, [&](State t, int image_color) {
        if (check && (gamma == 1) != (image_color == color)) return;
        Step st;
        if (ev.kind == EventKind::Send) st.msg = t;
        st.target.reserve(t.size() + 1);
        st.target.push_back(next_parity);
        st.target.insert(st.target.end(), t.begin(), t.end());
        out.push_back(std::move(st));
      });
    };
    if (ev.proc != q_) {
      push(kColorOne, parity, false, 0);
      return;
    }
    const int gamma = ev.slots[slot_];
    if (gamma == 1) {
      push(parity == 0 ? kColorOne : kColorTwo, 1 - parity, true, 1);
    } else {
      push(kColorHatOne, parity, true, 0);
      push(kColorHatTwo, parity, true, 0);
    }
  }

  bool accepting(const std::vector<State>& finals) const override {
    for (const auto& f : finals)
      if (!core_.final_ok(State(f.begin() + 1, f.end()))) return false;
    return true;
  }
  std::string describe() const override { return "fixpoint"; }

  // Everything but the colors of q-events is deterministic (the suffix
  // part when read backwards), so the search only assigns gamma and colors
  // along q, pruning with the structural images f(e).  The run it returns
  // is replayed through successors() before being reported.
  SearchResult search(const SearchRequest& req, SearchContext& ctx) const override {
    for (const auto& g : req.guesses)
      if (g.slot != slot_) return dfs_search(*this, req, ctx);
    ++ctx.stats.searches;
    const Msc& m = *req.msc;
    const bool guessed = !req.guesses.empty();
    const auto& qs = m.events_on(q_);
    const int k = static_cast<int>(qs.size());
    const auto image = core_.targets(m);
    std::vector<int> color(m.size(), kColorOne), gamma(m.size(), 0);
    std::vector<char> assigned(m.size(), 0);
    for (EventId e = 0; e < m.size(); ++e)
      if (m.loc(e) != q_) assigned[e] = 1;
    // Constraint of e: gamma(e) = 1 iff f(e) is an event of the same color.
    auto holds = [&](EventId e) {
      if (!assigned[e]) return true;
      const int f = image[e];
      if (f >= m.size()) return gamma[e] == 0;
      if (!assigned[f]) return true;
      return (gamma[e] == 1) == (color[f] == color[e]);
    };
    std::vector<std::vector<EventId>> watchers(m.size());
    for (EventId e : qs)
      if (image[e] < m.size()) watchers[image[e]].push_back(e);
    auto excluded = [&]() {
      for (const auto& x : req.exclusions) {
        bool same = true;
        for (int i = 0; i < k && same; ++i) same = x.values[static_cast<std::size_t>(qs[i])] == gamma[qs[i]];
        if (same) return true;
      }
      return false;
    };
    bool budget = false;
    auto rec = [&](auto&& self, int i, int parity) -> bool {
      if (++ctx.stats.nodes > ctx.budget) {
        budget = true;
        return false;
      }
      if (i == k) return !excluded();
      const EventId e = qs[i];
      const int given = req.annot->get(e, slot_);
      struct Option {
        int gamma, color;
      };
      std::vector<Option> opts;
      if (guessed || given == 1) opts.push_back({1, parity == 0 ? kColorOne : kColorTwo});
      if (guessed || given == 0) {
        opts.push_back({0, kColorHatOne});
        opts.push_back({0, kColorHatTwo});
      }
      for (auto o : opts) {
        gamma[e] = o.gamma;
        color[e] = o.color;
        assigned[e] = 1;
        bool ok = holds(e);
        for (EventId w : watchers[e]) ok = ok && holds(w);
        if (ok && self(self, i + 1, o.gamma == 1 ? 1 - parity : parity)) return true;
        assigned[e] = 0;
        if (budget) return false;
      }
      return false;
    };
    SearchResult res;
    const bool found = rec(rec, 0, 0);
    if (budget) {
      res.outcome = Outcome::Budget;
      return res;
    }
    if (!found) {
      res.outcome = Outcome::NoRun;
      return res;
    }
    // Build the run from the chosen colors.
    std::vector<int> value;
    auto inner = core_.states(m, color, &value);
    std::vector<int> parity_after(m.size(), 0);
    int parity = 0;
    for (EventId g : qs) parity_after[g] = parity ^= gamma[g];
    res.run.steps.resize(m.size());
    for (EventId e : m.linearization()) {
      auto& st = res.run.steps[e];
      const EventId p = m.prev(e);
      st.source = p >= 0 ? res.run.steps[p].target : initial_state(m.loc(e));
      st.target.push_back(parity_after[e]);
      st.target.insert(st.target.end(), inner[e].begin(), inner[e].end());
      if (m.kind(e) == EventKind::Send) st.msg = inner[e];
    }
    for (EventId e = 0; e < m.size(); ++e)
      if (m.kind(e) == EventKind::Recv) res.run.steps[e].msg = res.run.steps[m.partner(e)].msg;
    res.layer.assign(static_cast<std::size_t>(m.size()) * req.guesses.size(), 0);
    if (guessed)
      for (EventId e : qs) res.layer[e] = gamma[e];
    SlotTable full = req.annot->widened(slot_count());
    for (EventId e : qs) full.set(e, slot_, gamma[e]);
    std::vector<std::string> why;
    if (!validate_generic_run(*this, m, full, res.run, &why))
      throw std::logic_error("fixpoint search built an invalid run: " + why.front());
    res.outcome = Outcome::Found;
    return res;
  }

 private:
  SystemSignature sig_;
  ProcId q_;
  int slot_;
  detail::FaCore core_;
};

// Allocates annotation slots in a growing layout.
class SlotAllocator {
 public:
  explicit SlotAllocator(int first = 0) : next_(first) {}
  int take() { return next_++; }
  int used() const { return next_; }

 private:
  int next_;
};

// The preorders computed by a preorder pipeline: bit[i][j] is the slot of
// "paths[i] below-or-equal paths[j]" (i != j) on events of q.
struct PreorderLayout {
  ProcId p = -1, q = -1;
  std::vector<PathExpr> paths;
  std::vector<std::vector<int>> bit;
  std::vector<int> bottom;  // slot: last_{paths[i]} is bottom
};

namespace detail {

// Checks the three characterization rules along the process order of q.
// State: the previous q-event's bits for all pairs.
class PreorderWiring : public Machine {
 public:
  struct Pair {
    int out;         // slot of the pair's bit
    int bot_first;   // bottom slot of the left path
    int bot_second;  // bottom slot of the right path
    int fp_star;     // fixpoint slot of f^{pi, ->* pi'}
    int fp_plus;     // fixpoint slot of f^{pi', ->+ pi}
    int starred;     // index of the starred pair, -1 if it is diagonal
  };

  PreorderWiring(SystemSignature sig, ProcId q, std::vector<Pair> pairs)
      : sig_(std::move(sig)), q_(q), pairs_(std::move(pairs)) {
    std::set<int> s;
    for (const auto& pr : pairs_)
      s.insert({pr.out, pr.bot_first, pr.bot_second, pr.fp_star, pr.fp_plus});
    reads_.assign(s.begin(), s.end());
  }

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return reads_.empty() ? 0 : reads_.back() + 1; }
  std::vector<int> read_slots() const override { return reads_; }
  State initial_state(ProcId) const override { return {}; }

  void successors(const EventView& ev, const State& s, const Message*,
                  std::vector<Step>& out) const override {
    Step st;
    if (ev.proc != q_) {
      st.target = s;
      out.push_back(std::move(st));
      return;
    }
    const int* v = ev.slots;
    for (const auto& pr : pairs_) {
      const bool bot = v[pr.bot_first] == 1;
      bool want;
      const bool prev_leq = !s.empty() && (pr.starred < 0 || s[pr.starred] == 1);
      if (!prev_leq)
        want = bot || v[pr.fp_star] == 1;
      else
        want = v[pr.fp_plus] == 0 && (bot || v[pr.bot_second] == 0);
      if ((v[pr.out] == 1) != want) return;
    }
    st.target.reserve(pairs_.size());
    for (const auto& pr : pairs_) st.target.push_back(v[pr.out]);
    out.push_back(std::move(st));
  }
  bool accepting(const std::vector<State>&) const override { return true; }
  std::string describe() const override { return "preorder-wiring"; }

  // The bits are a function of the inputs, so one forward pass along q
  // settles them; guessing them jointly would branch 2^pairs per event.
  SearchResult search(const SearchRequest& req, SearchContext& ctx) const override {
    std::map<int, int> guess_of;
    for (std::size_t k = 0; k < req.guesses.size(); ++k) guess_of[req.guesses[k].slot] = static_cast<int>(k);
    for (const auto& g : req.guesses) {
      bool is_out = g.active == q_ || g.active < 0;
      is_out = is_out && std::any_of(pairs_.begin(), pairs_.end(), [&](const Pair& pr) { return pr.out == g.slot; });
      if (!is_out) return dfs_search(*this, req, ctx);
    }
    ++ctx.stats.searches;
    const Msc& m = *req.msc;
    const std::size_t ng = req.guesses.size();
    SearchResult res;
    res.layer.assign(static_cast<std::size_t>(m.size()) * ng, 0);
    SlotTable full = req.annot->widened(slot_count());
    State s;
    for (EventId e : m.events_on(q_)) {
      if (++ctx.stats.nodes > ctx.budget) {
        res.outcome = Outcome::Budget;
        return res;
      }
      State next;
      for (const auto& pr : pairs_) {
        const bool bot = full.get(e, pr.bot_first) == 1;
        const bool prev_leq = !s.empty() && (pr.starred < 0 || s[pr.starred] == 1);
        const bool want = !prev_leq ? bot || full.get(e, pr.fp_star) == 1
                                    : full.get(e, pr.fp_plus) == 0 && (bot || full.get(e, pr.bot_second) == 0);
        if (auto it = guess_of.find(pr.out); it != guess_of.end()) {
          full.set(e, pr.out, want);
          res.layer[static_cast<std::size_t>(e) * ng + it->second] = want;
        } else if ((full.get(e, pr.out) == 1) != want) {
          res.outcome = Outcome::NoRun;
          return res;
        }
        next.push_back(want);
      }
      s = std::move(next);
    }
    for (const auto& x : req.exclusions) {
      const std::size_t w = x.indices.size();
      bool same = true;
      for (EventId e = 0; e < m.size() && same; ++e)
        for (std::size_t k = 0; k < w && same; ++k)
          same = res.layer[static_cast<std::size_t>(e) * ng + x.indices[k]] == x.values[static_cast<std::size_t>(e) * w + k];
      if (same) {
        res.outcome = Outcome::NoRun;
        return res;
      }
    }
    res.run.steps.resize(m.size());
    for (EventId e : m.linearization()) {
      auto& st = res.run.steps[e];
      const EventId p = m.prev(e);
      st.source = p >= 0 ? res.run.steps[p].target : initial_state(m.loc(e));
      if (m.loc(e) != q_) {
        st.target = st.source;
        continue;
      }
      for (const auto& pr : pairs_) st.target.push_back(full.get(e, pr.out));
    }
    std::vector<std::string> why;
    if (!validate_generic_run(*this, m, full, res.run, &why))
      throw std::logic_error("preorder wiring built an invalid run: " + why.front());
    res.outcome = Outcome::Found;
    return res;
  }

 private:
  SystemSignature sig_;
  ProcId q_;
  std::vector<Pair> pairs_;
  std::vector<int> reads_;
};

inline PathExpr starred(const PathExpr& x) { return normalize(concat(x, star_path())); }

}  // namespace detail

// Adds the stages deciding the preorders over `paths` (all in
// Paths_{p,q}) to a pipeline; returns where the bits live.  With
// `pairs_of_interest` set only those ordered pairs (plus what they depend
// on) are computed.  With `visible` set the bits of the requested pairs are
// read from the annotation instead of being guessed.
inline PreorderLayout add_preorder_stages(Pipeline& pl, SlotAllocator& slots, ProcId p, ProcId q,
                                          const std::vector<PathExpr>& paths,
                                          const std::vector<std::pair<int, int>>* pairs_of_interest = nullptr,
                                          bool visible = false) {
  const auto& sig = pl.signature();
  for (const auto& x : paths)
    if (!in_paths(sig, x, p, q))
      throw InputError("path '" + print_path(sig, x) + "' is not in Paths_{" +
                       sig.process_name(p) + "," + sig.process_name(q) + "}");
  PreorderLayout layout;
  layout.p = p;
  layout.q = q;
  layout.paths = paths;
  const std::size_t n = paths.size();
  layout.bit.assign(n, std::vector<int>(n, -1));
  layout.bottom.assign(n, -1);

  // Closure under the ->* suffix, with ->*->* identified with ->*.
  std::vector<PathExpr> all;
  auto index_of = [&](const PathExpr& x) {
    auto it = std::find(all.begin(), all.end(), x);
    if (it != all.end()) return static_cast<int>(it - all.begin());
    all.push_back(x);
    return static_cast<int>(all.size() - 1);
  };
  std::vector<int> orig_idx;
  for (const auto& x : paths) orig_idx.push_back(index_of(x));

  // Ordered pairs to track: requested pairs and their starred versions.
  std::vector<std::pair<int, int>> wanted;
  if (pairs_of_interest) {
    for (auto [i, j] : *pairs_of_interest)
      if (i != j) wanted.push_back({orig_idx.at(i), orig_idx.at(j)});
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && orig_idx[i] != orig_idx[j]) wanted.push_back({orig_idx[i], orig_idx[j]});
  }
  std::vector<std::pair<int, int>> tracked;
  auto track = [&](std::pair<int, int> pr) {
    auto it = std::find(tracked.begin(), tracked.end(), pr);
    if (it != tracked.end()) return static_cast<int>(it - tracked.begin());
    tracked.push_back(pr);
    return static_cast<int>(tracked.size() - 1);
  };
  for (auto pr : wanted) track(pr);
  // Starred partners (the closure is idempotent after one step).
  for (std::size_t k = 0; k < tracked.size(); ++k) {
    auto [i, j] = tracked[k];
    int si = index_of(detail::starred(all[i]));
    int sj = index_of(detail::starred(all[j]));
    if (si != sj) track({si, sj});  // coinciding stars: both orders hold
  }

  // Bottom detection for every path involved.
  std::map<int, int> bot_slot;
  auto need_bot = [&](int i) {
    if (bot_slot.count(i)) return bot_slot[i];
    int s = slots.take();
    bot_slot[i] = s;
    pl.add_stage(std::make_shared<LastLabelMachine>(sig, all[i], 1, kInputUnit, s, q),
                 {{s, 2, q}}, "bottom " + print_path(sig, all[i]), true);
    return s;
  };
  std::map<std::pair<int, int>, int> fp_slot;
  auto need_fp = [&](PathExpr a, PathExpr b) {
    int ia = index_of(a), ib = index_of(b);
    auto key = std::make_pair(ia, ib);
    if (fp_slot.count(key)) return fp_slot[key];
    int s = slots.take();
    fp_slot[key] = s;
    pl.add_stage(std::make_shared<FixpointMachine>(sig, p, q, a, b, s), {{s, 2, q}},
                 "fixpoint " + print_path(sig, a) + " / " + print_path(sig, b), true);
    return s;
  };
  std::vector<detail::PreorderWiring::Pair> wiring;
  std::vector<int> out_slot(tracked.size());
  for (std::size_t k = 0; k < tracked.size(); ++k) out_slot[k] = slots.take();
  for (std::size_t k = 0; k < tracked.size(); ++k) {
    auto [i, j] = tracked[k];
    int si = index_of(detail::starred(all[i]));
    int sj = index_of(detail::starred(all[j]));
    int partner = -1;
    if (si != sj) {
      auto it = std::find(tracked.begin(), tracked.end(), std::make_pair(si, sj));
      partner = static_cast<int>(it - tracked.begin());
    }
    detail::PreorderWiring::Pair pr;
    pr.out = out_slot[k];
    pr.bot_first = need_bot(i);
    pr.bot_second = need_bot(j);
    pr.fp_star = need_fp(all[i], normalize(concat(star_path(), all[j])));
    pr.fp_plus = need_fp(all[j], normalize(concat(plus_path(), all[i])));
    pr.starred = partner;
    wiring.push_back(pr);
  }
  std::vector<GuessSlot> outs;
  for (std::size_t k = 0; k < tracked.size(); ++k) {
    bool requested = std::find(wanted.begin(), wanted.end(), tracked[k]) != wanted.end();
    if (!(visible && requested)) outs.push_back({out_slot[k], 2, q});
  }
  pl.add_stage(std::make_shared<detail::PreorderWiring>(sig, q, std::move(wiring)), outs,
               "preorder wiring", true);
  for (std::size_t i = 0; i < n; ++i) {
    layout.bottom[i] = need_bot(orig_idx[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || orig_idx[i] == orig_idx[j]) continue;
      auto it = std::find(tracked.begin(), tracked.end(), std::make_pair(orig_idx[i], orig_idx[j]));
      if (it != tracked.end()) layout.bit[i][j] = out_slot[it - tracked.begin()];
    }
  }
  return layout;
}

}  // namespace cfmg
