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
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cfmg/machine.hpp"

namespace cfmg {

// Memo of stage searches, keyed by machine, MSC structure, the slot values
// the machine reads and the search constraints.  Shared across calls that
// check many annotations of one MSC.
class StageCache {
 public:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const {
      std::uint64_t h = 0xcbf29ce484222325ull;
      for (auto x : k) {
        h ^= static_cast<std::uint64_t>(x);
        h *= 0x100000001b3ull;
        h ^= h >> 31;
      }
      return static_cast<std::size_t>(h);
    }
  };

  const SearchResult* find(const std::vector<std::int64_t>& key) const {
    auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
  }
  void store(std::vector<std::int64_t> key, SearchResult r) {
    if (map_.size() >= max_entries_) map_.clear();
    map_.emplace(std::move(key), std::move(r));
  }
  std::size_t size() const { return map_.size(); }
  void set_max_entries(std::size_t n) { max_entries_ = n; }

 private:
  std::unordered_map<std::vector<std::int64_t>, SearchResult, KeyHash> map_;
  std::size_t max_entries_ = 200000;
};

inline std::vector<std::int64_t> stage_cache_key(const Machine& m, const SearchRequest& req) {
  std::vector<std::int64_t> key;
  key.push_back(static_cast<std::int64_t>(m.serial()));
  const auto& fp = req.msc->fingerprint();
  key.push_back(static_cast<std::int64_t>(fp.size()));
  key.insert(key.end(), fp.begin(), fp.end());
  key.push_back(static_cast<std::int64_t>(req.guesses.size()));
  std::set<int> guessed;
  for (const auto& g : req.guesses) {
    key.push_back(g.slot);
    key.push_back(g.domain);
    key.push_back(g.active);
    guessed.insert(g.slot);
  }
  for (int s : m.read_slots()) {
    if (guessed.count(s)) continue;
    key.push_back(-1000 - s);
    for (EventId e = 0; e < req.msc->size(); ++e)
      key.push_back(s < req.annot->width() ? req.annot->get(e, s) : 0);
  }
  for (const auto& x : req.exclusions) {
    key.push_back(-7);
    key.insert(key.end(), x.indices.begin(), x.indices.end());
    key.push_back(-8);
    key.insert(key.end(), x.values.begin(), x.values.end());
  }
  return key;
}

// Search through the context's cache when one is attached.
inline SearchResult cached_search(const Machine& m, const SearchRequest& req, SearchContext& ctx) {
  if (!ctx.cache) return m.search(req, ctx);
  auto key = stage_cache_key(m, req);
  if (const auto* hit = ctx.cache->find(key)) {
    ++ctx.stats.cache_hits;
    return *hit;
  }
  SearchResult r = m.search(req, ctx);
  if (r.outcome != Outcome::Budget) ctx.cache->store(std::move(key), r);
  return r;
}

// A machine over a shared slot layout composed of stages.  Each stage is a
// machine that may define some internal slots (its outputs); the language
// is the product of all stages with internal slots projected away.
//
// Searching solves the stages one after another: each stage's output layer
// is computed by a search with the outputs guessed, and alternative layers
// are enumerated only when a later stage that depends on them fails.
class Pipeline : public Machine {
 public:
  struct Stage {
    MachinePtr machine;
    std::vector<GuessSlot> outputs;
    std::string name;
    bool functional = false;  // outputs are determined by the inputs
  };

  Pipeline(SystemSignature sig, int width, std::string name = "pipeline")
      : sig_(std::move(sig)), width_(width), name_(std::move(name)) {}

  void set_width(int width) { width_ = std::max(width_, width); }

  int add_stage(MachinePtr m, std::vector<GuessSlot> outputs, std::string name = {},
                bool functional = false) {
    if (!(m->signature() == sig_)) throw InputError("pipeline stage over a different signature");
    std::set<int> reads;
    for (int s : m->read_slots()) reads.insert(s);
    std::set<int> deps;
    for (int s : reads) {
      auto it = producer_.find(s);
      if (it != producer_.end()) deps.insert(it->second);
    }
    const int idx = static_cast<int>(stages_.size());
    for (const auto& g : outputs) {
      if (producer_.count(g.slot)) throw std::logic_error("slot produced twice");
      producer_[g.slot] = idx;
      width_ = std::max(width_, g.slot + 1);
    }
    width_ = std::max(width_, m->slot_count());
    stages_.push_back({std::move(m), std::move(outputs), std::move(name), functional});
    deps_.push_back(std::move(deps));
    return idx;
  }

  const std::vector<Stage>& stages() const { return stages_; }

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return width_; }
  std::vector<int> read_slots() const override {
    std::set<int> s;
    for (const auto& st : stages_)
      for (int x : st.machine->read_slots())
        if (!producer_.count(x)) s.insert(x);
    return {s.begin(), s.end()};
  }

  State initial_state(ProcId p) const override {
    State s;
    for (const auto& st : stages_) detail::append_part(s, st.machine->initial_state(p));
    return s;
  }

  void successors(const EventView& ev, const State& s, const Message* in,
                  std::vector<Step>& out) const override {
    std::vector<GuessSlot> internal;
    for (const auto& st : stages_)
      for (const auto& g : st.outputs)
        if (g.active < 0 || g.active == ev.proc) internal.push_back(g);
    std::vector<int> row(ev.slots, ev.slots + width_);
    for (const auto& st : stages_)
      for (const auto& g : st.outputs) row[g.slot] = 0;
    auto states = detail::split_parts(s, stages_.size());
    std::vector<std::vector<Word>> ins;
    if (in) ins = detail::split_parts(*in, stages_.size());
    std::vector<int> vals(internal.size(), 0);
    for (;;) {
      for (std::size_t k = 0; k < internal.size(); ++k) row[internal[k].slot] = vals[k];
      EventView v = ev;
      v.slots = row.data();
      std::vector<std::vector<Step>> per(stages_.size());
      bool dead = false;
      for (std::size_t k = 0; k < stages_.size() && !dead; ++k) {
        stages_[k].machine->successors(v, states[k], in ? &ins[k] : nullptr, per[k]);
        dead = per[k].empty();
      }
      if (!dead) {
        std::vector<std::size_t> idx(stages_.size(), 0);
        for (;;) {
          Step st;
          for (std::size_t k = 0; k < stages_.size(); ++k) {
            detail::append_part(st.target, per[k][idx[k]].target);
            if (ev.kind == EventKind::Send) detail::append_part(st.msg, per[k][idx[k]].msg);
          }
          out.push_back(std::move(st));
          std::size_t k = 0;
          for (; k < stages_.size(); ++k) {
            if (++idx[k] < per[k].size()) break;
            idx[k] = 0;
          }
          if (k == stages_.size()) break;
        }
      }
      std::size_t i = 0;
      for (; i < internal.size(); ++i) {
        if (++vals[i] < internal[i].domain) break;
        vals[i] = 0;
      }
      if (i == internal.size()) break;
    }
  }

  bool accepting(const std::vector<State>& finals) const override {
    std::vector<std::vector<State>> split(stages_.size());
    for (const auto& f : finals) {
      auto parts = detail::split_parts(f, stages_.size());
      for (std::size_t k = 0; k < stages_.size(); ++k) split[k].push_back(parts[k]);
    }
    for (std::size_t k = 0; k < stages_.size(); ++k)
      if (!stages_[k].machine->accepting(split[k])) return false;
    return true;
  }

  SearchResult search(const SearchRequest& req, SearchContext& ctx) const override {
    const std::size_t n = stages_.size();
    std::vector<std::vector<GuessSlot>> guesses(n);
    std::vector<std::vector<Exclusion>> excl(n);
    for (std::size_t i = 0; i < n; ++i) guesses[i] = stages_[i].outputs;

    // Caller-guessed slots go to the first stage reading them.
    std::vector<std::pair<int, int>> where(req.guesses.size());
    for (std::size_t k = 0; k < req.guesses.size(); ++k) {
      int owner = -1;
      for (std::size_t i = 0; i < n && owner < 0; ++i) {
        auto rs = stages_[i].machine->read_slots();
        if (std::find(rs.begin(), rs.end(), req.guesses[k].slot) != rs.end())
          owner = static_cast<int>(i);
      }
      if (owner < 0) throw std::logic_error("guessed slot is not read by any stage");
      where[k] = {owner, static_cast<int>(guesses[owner].size())};
      guesses[owner].push_back(req.guesses[k]);
    }
    for (const auto& x : req.exclusions) {
      int owner = -1;
      Exclusion mapped;
      mapped.values = x.values;
      for (int k : x.indices) {
        if (owner >= 0 && where[k].first != owner)
          throw Unsupported("exclusion spanning several pipeline stages");
        owner = where[k].first;
        mapped.indices.push_back(where[k].second);
      }
      if (owner >= 0) excl[owner].push_back(std::move(mapped));
    }

    SlotTable annot = req.annot->widened(width_);
    std::vector<SearchResult> chosen(n);
    std::set<int> conflict;
    Outcome o = cascade(0, *req.msc, annot, guesses, excl, chosen, conflict, ctx);
    SearchResult res;
    res.outcome = o;
    if (o != Outcome::Found) return res;
    res.run.steps.resize(req.msc->size());
    for (EventId e = 0; e < req.msc->size(); ++e) {
      auto& st = res.run.steps[e];
      for (std::size_t i = 0; i < n; ++i) {
        const auto& part = chosen[i].run.steps[e];
        detail::append_part(st.source, part.source);
        detail::append_part(st.target, part.target);
        detail::append_part(st.msg, part.msg);
      }
    }
    res.layer.assign(static_cast<std::size_t>(req.msc->size()) * req.guesses.size(), 0);
    for (EventId e = 0; e < req.msc->size(); ++e)
      for (std::size_t k = 0; k < req.guesses.size(); ++k)
        res.layer[static_cast<std::size_t>(e) * req.guesses.size() + k] =
            annot.get(e, req.guesses[k].slot);
    return res;
  }

  std::string describe() const override { return name_; }

 private:
  Outcome cascade(std::size_t i, const Msc& msc, SlotTable& annot,
                  const std::vector<std::vector<GuessSlot>>& guesses,
                  const std::vector<std::vector<Exclusion>>& excl,
                  std::vector<SearchResult>& chosen, std::set<int>& conflict,
                  SearchContext& ctx) const {
    if (i == stages_.size()) return Outcome::Found;
    const auto& gs = guesses[i];
    std::set<int> acc = deps_[i];
    std::vector<Exclusion> known = excl[i];
    std::vector<int> all_idx(gs.size());
    for (std::size_t k = 0; k < gs.size(); ++k) all_idx[k] = static_cast<int>(k);
    for (;;) {
      SearchRequest r;
      r.msc = &msc;
      r.annot = &annot;
      r.guesses = gs;
      r.exclusions = known;
      SearchResult res = cached_search(*stages_[i].machine, r, ctx);
      if (res.outcome == Outcome::Budget) return Outcome::Budget;
      if (res.outcome == Outcome::NoRun) {
        conflict = acc;
        return Outcome::NoRun;
      }
      for (EventId e = 0; e < msc.size(); ++e)
        for (std::size_t k = 0; k < gs.size(); ++k)
          annot.set(e, gs[k].slot, res.layer[static_cast<std::size_t>(e) * gs.size() + k]);
      std::vector<int> layer = res.layer;
      chosen[i] = std::move(res);
      std::set<int> sub;
      Outcome o = cascade(i + 1, msc, annot, guesses, excl, chosen, sub, ctx);
      if (o != Outcome::NoRun) return o;
      const bool no_alternative =
          gs.empty() || (stages_[i].functional && ctx.trust_functional && excl[i].empty() &&
                         gs.size() == stages_[i].outputs.size());
      if (!sub.count(static_cast<int>(i)) || no_alternative) {
        if (!sub.count(static_cast<int>(i))) {
          conflict = std::move(sub);
          return Outcome::NoRun;
        }
        sub.erase(static_cast<int>(i));
        acc.insert(sub.begin(), sub.end());
        conflict = acc;
        return Outcome::NoRun;
      }
      sub.erase(static_cast<int>(i));
      acc.insert(sub.begin(), sub.end());
      known.push_back({all_idx, std::move(layer)});
    }
  }

  SystemSignature sig_;
  int width_;
  std::string name_;
  std::vector<Stage> stages_;
  std::vector<std::set<int>> deps_;
  std::unordered_map<int, int> producer_;
};

}  // namespace cfmg
