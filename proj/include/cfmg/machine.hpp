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

#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cfmg/msc.hpp"

namespace cfmg {

using Word = std::int32_t;
using State = std::vector<Word>;
using Message = std::vector<Word>;

// Annotation values attached to events, one row of `width` slots per event.
class SlotTable {
 public:
  SlotTable() = default;
  SlotTable(int events, int width) : events_(events), width_(width), v_(static_cast<std::size_t>(events) * width, 0) {}

  int events() const { return events_; }
  int width() const { return width_; }
  int get(EventId e, int slot) const { return v_[index(e, slot)]; }
  void set(EventId e, int slot, int value) { v_[index(e, slot)] = value; }
  const int* row(EventId e) const { return v_.data() + static_cast<std::size_t>(e) * width_; }

  // Copy with at least `width` slots, new slots zero.
  SlotTable widened(int width) const {
    if (width <= width_) return *this;
    SlotTable out(events_, width);
    for (int e = 0; e < events_; ++e)
      for (int s = 0; s < width_; ++s) out.set(e, s, get(e, s));
    return out;
  }

  bool operator==(const SlotTable&) const = default;

 private:
  std::size_t index(EventId e, int slot) const {
    return static_cast<std::size_t>(e) * width_ + slot;
  }
  int events_ = 0;
  int width_ = 0;
  std::vector<int> v_;
};

struct EventView {
  EventId event = -1;
  ProcId proc = -1;
  EventKind kind = EventKind::Local;
  LabelId label = -1;
  ProcId peer = -1;
  const int* slots = nullptr;
};

struct Step {
  Message msg;    // message emitted by a send, empty otherwise
  State target;
  int tag = -1;   // transition index for explicit machines
};

struct RunStep {
  State source;
  Message msg;
  State target;
  int tag = -1;
};

struct Run {
  int initial_tuple = 0;
  std::vector<RunStep> steps;  // indexed by event
};

// A slot whose per-event value the search chooses.  Events outside the
// active process (when set) keep value 0.
struct GuessSlot {
  int slot = 0;
  int domain = 2;
  ProcId active = -1;
};

// A previously found assignment that a new solution must differ from,
// restricted to some of the guessed slots.  values[e * indices.size() + k].
struct Exclusion {
  std::vector<int> indices;
  std::vector<int> values;
};

enum class Outcome { Found, NoRun, Budget };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Found: return "accepted";
    case Outcome::NoRun: return "rejected";
    case Outcome::Budget: return "budget-exhausted";
  }
  return "?";
}

struct SearchResult {
  Outcome outcome = Outcome::NoRun;
  Run run;
  std::vector<int> layer;  // guessed values, layer[e * guesses + k]
};

struct SearchRequest {
  const Msc* msc = nullptr;
  const SlotTable* annot = nullptr;
  std::vector<GuessSlot> guesses;
  std::vector<Exclusion> exclusions;
};

class StageCache;

struct SearchStats {
  std::uint64_t nodes = 0;
  std::size_t max_branching = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t searches = 0;
};

struct SearchContext {
  std::uint64_t budget = 10'000'000;
  SearchStats stats;
  std::shared_ptr<StageCache> cache;
  // Pipelines skip the search for alternative layers of stages whose
  // outputs are uniquely determined.
  bool trust_functional = true;
  // When set, distinct structured states seen per process are collected.
  bool collect_states = false;
  std::vector<std::unordered_set<std::uint64_t>> seen_states;
};

class Machine {
 public:
  Machine() : serial_(next_serial()) {}
  // Copies are distinct machines for caching purposes.
  Machine(const Machine&) : serial_(next_serial()) {}
  Machine& operator=(const Machine&) {
    serial_ = next_serial();
    return *this;
  }
  virtual ~Machine() = default;

  virtual const SystemSignature& signature() const = 0;
  // Number of annotation slots the machine expects on every event.
  virtual int slot_count() const { return 0; }
  // Slots whose values influence the machine's behaviour.
  virtual std::vector<int> read_slots() const { return {}; }

  virtual State initial_state(ProcId p) const = 0;
  virtual std::vector<std::vector<State>> initial_tuples() const {
    std::vector<State> t;
    for (ProcId p = 0; p < signature().process_count(); ++p) t.push_back(initial_state(p));
    return {t};
  }
  virtual void successors(const EventView& ev, const State& s, const Message* incoming,
                          std::vector<Step>& out) const = 0;
  virtual bool accepting(const std::vector<State>& finals) const = 0;

  // Accepting-run search; the default is the plain depth-first search.
  virtual SearchResult search(const SearchRequest& req, SearchContext& ctx) const;

  virtual std::string describe() const { return "machine"; }

  std::uint64_t serial() const { return serial_; }

 private:
  static std::uint64_t next_serial() {
    static std::atomic<std::uint64_t> counter{1};
    return counter++;
  }
  std::uint64_t serial_;
};

using MachinePtr = std::shared_ptr<const Machine>;

namespace detail {

struct Hash128 {
  std::uint64_t a = 0x9e3779b97f4a7c15ull;
  std::uint64_t b = 0xc2b2ae3d27d4eb4full;

  void add(std::uint64_t x) {
    a = (a ^ x) * 0x100000001b3ull;
    a ^= a >> 29;
    b = (b + x + 0x632be59bd9b4e019ull) * 0xff51afd7ed558ccdull;
    b ^= b >> 32;
  }
  void add_vec(const std::vector<Word>& v) {
    add(v.size() + 0x51ed27ull);
    for (Word w : v) add(static_cast<std::uint32_t>(w));
  }
  bool operator==(const Hash128&) const = default;
};

struct Hash128Hasher {
  std::size_t operator()(const Hash128& h) const { return h.a ^ (h.b * 31); }
};

inline std::uint64_t hash_state(const State& s) {
  Hash128 h;
  h.add_vec(s);
  return h.a ^ h.b;
}

// Plain depth-first search along a linearization with memoized failures.
class Dfs {
 public:
  Dfs(const Machine& m, const SearchRequest& req, SearchContext& ctx)
      : m_(m), req_(req), ctx_(ctx), msc_(*req.msc), lin_(msc_.search_order()) {
    nproc_ = msc_.signature().process_count();
    width_ = std::max(m.slot_count(), req.annot ? req.annot->width() : 0);
    for (const auto& g : req.guesses) width_ = std::max(width_, g.slot + 1);
    row_.assign(width_, 0);
    steps_.resize(msc_.size());
    layer_.assign(static_cast<std::size_t>(msc_.size()) * req.guesses.size(), 0);
    for (const auto& x : req.exclusions) {
      (void)x;
      flags_.push_back(0);
    }
    if (ctx_.collect_states && ctx_.seen_states.size() < static_cast<std::size_t>(nproc_))
      ctx_.seen_states.resize(nproc_);
  }

  SearchResult run() {
    SearchResult res;
    auto tuples = m_.initial_tuples();
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      tuple_ = static_cast<int>(t);
      states_ = tuples[t];
      queues_.assign(static_cast<std::size_t>(nproc_) * nproc_, {});
      if (ctx_.collect_states)
        for (ProcId p = 0; p < nproc_; ++p) ctx_.seen_states[p].insert(hash_state(states_[p]));
      Outcome o = rec(0);
      if (o == Outcome::Found) {
        res.outcome = Outcome::Found;
        res.run.initial_tuple = tuple_;
        res.run.steps = steps_;
        res.layer = layer_;
        return res;
      }
      if (o == Outcome::Budget) {
        res.outcome = Outcome::Budget;
        return res;
      }
    }
    res.outcome = Outcome::NoRun;
    return res;
  }

 private:
  Hash128 config_key(int pos) const {
    Hash128 h;
    h.add(static_cast<std::uint64_t>(pos));
    h.add(static_cast<std::uint64_t>(tuple_));
    for (const auto& s : states_) h.add_vec(s);
    for (const auto& q : queues_) {
      h.add(q.size() + 0x77ull);
      for (const auto& msg : q) h.add_vec(msg);
    }
    for (char f : flags_) h.add(static_cast<std::uint64_t>(f));
    return h;
  }

  Outcome rec(int pos) {
    if (++ctx_.stats.nodes > ctx_.budget) return Outcome::Budget;
    if (pos == static_cast<int>(lin_.size())) {
      for (const auto& q : queues_)
        if (!q.empty()) return Outcome::NoRun;
      for (char f : flags_)
        if (!f) return Outcome::NoRun;
      return m_.accepting(states_) ? Outcome::Found : Outcome::NoRun;
    }
    Hash128 key = config_key(pos);
    if (failed_.count(key)) return Outcome::NoRun;

    const EventId e = lin_[pos];
    const ProcId p = msc_.loc(e);
    EventView ev;
    ev.event = e;
    ev.proc = p;
    ev.kind = msc_.kind(e);
    ev.label = msc_.label(e);
    ev.peer = msc_.peer(e);
    std::fill(row_.begin(), row_.end(), 0);
    if (req_.annot)
      for (int s = 0; s < req_.annot->width(); ++s) row_[s] = req_.annot->get(e, s);

    std::deque<Message>* inq = nullptr;
    std::deque<Message>* outq = nullptr;
    const Message* incoming = nullptr;
    if (ev.kind == EventKind::Recv) {
      inq = &queues_[static_cast<std::size_t>(ev.peer) * nproc_ + p];
      if (inq->empty()) return Outcome::NoRun;
      incoming = &inq->front();
    } else if (ev.kind == EventKind::Send) {
      outq = &queues_[static_cast<std::size_t>(p) * nproc_ + ev.peer];
    }

    // Enumerate assignments of the guessed slots active on this event.
    const auto& gs = req_.guesses;
    std::vector<int> active;
    for (std::size_t k = 0; k < gs.size(); ++k)
      if (gs[k].active < 0 || gs[k].active == p) active.push_back(static_cast<int>(k));
    std::vector<int> vals(gs.size(), 0);
    std::size_t branches = 0;
    const State saved = states_[p];
    const std::vector<char> saved_flags = flags_;
    Outcome result = Outcome::NoRun;

    for (;;) {
      for (std::size_t k = 0; k < gs.size(); ++k) row_[gs[k].slot] = vals[k];
      for (std::size_t x = 0; x < req_.exclusions.size(); ++x) {
        if (flags_[x]) continue;
        const auto& ex = req_.exclusions[x];
        const std::size_t w = ex.indices.size();
        for (std::size_t k = 0; k < w; ++k)
          if (vals[ex.indices[k]] != ex.values[static_cast<std::size_t>(e) * w + k]) {
            flags_[x] = 1;
            break;
          }
      }
      ev.slots = row_.data();
      std::vector<Step> succ;
      m_.successors(ev, saved, incoming, succ);
      branches += succ.size();
      for (auto& st : succ) {
        Message popped;
        if (inq) {
          popped = std::move(inq->front());
          inq->pop_front();
        }
        if (outq) outq->push_back(st.msg);
        states_[p] = st.target;
        if (ctx_.collect_states) ctx_.seen_states[p].insert(hash_state(st.target));
        Outcome o = rec(pos + 1);
        if (o == Outcome::Found) {
          steps_[e] = {saved, outq ? st.msg : popped, std::move(st.target), st.tag};
          for (std::size_t k = 0; k < gs.size(); ++k)
            layer_[static_cast<std::size_t>(e) * gs.size() + k] = vals[k];
          states_[p] = saved;
          return o;
        }
        states_[p] = saved;
        if (outq) outq->pop_back();
        if (inq) inq->push_front(std::move(popped));
        if (o == Outcome::Budget) return o;
        incoming = inq ? &inq->front() : nullptr;
      }
      flags_ = saved_flags;
      if (++ctx_.stats.nodes > ctx_.budget) return Outcome::Budget;
      // Next assignment.
      std::size_t i = 0;
      for (; i < active.size(); ++i) {
        int k = active[i];
        if (++vals[k] < gs[k].domain) break;
        vals[k] = 0;
      }
      if (i == active.size()) break;
    }
    ctx_.stats.max_branching = std::max(ctx_.stats.max_branching, branches);
    failed_.insert(key);
    return result;
  }

  const Machine& m_;
  const SearchRequest& req_;
  SearchContext& ctx_;
  const Msc& msc_;
  const std::vector<EventId>& lin_;
  int nproc_ = 0;
  int width_ = 0;
  int tuple_ = 0;
  std::vector<State> states_;
  std::vector<std::deque<Message>> queues_;
  std::vector<int> row_;
  std::vector<RunStep> steps_;
  std::vector<int> layer_;
  std::vector<char> flags_;
  std::unordered_set<Hash128, Hash128Hasher> failed_;
};

}  // namespace detail

// Depth-first search ignoring any machine-specific search strategy.
inline SearchResult dfs_search(const Machine& m, const SearchRequest& req, SearchContext& ctx) {
  ++ctx.stats.searches;
  detail::Dfs dfs(m, req, ctx);
  return dfs.run();
}

inline SearchResult Machine::search(const SearchRequest& req, SearchContext& ctx) const {
  return dfs_search(*this, req, ctx);
}

inline SearchResult find_accepting_run(const Machine& m, const Msc& msc, const SlotTable& annot,
                                       SearchContext& ctx) {
  if (!(m.signature() == msc.signature()))
    throw InputError("machine and MSC have different signatures");
  SlotTable full = annot.widened(m.slot_count());
  SearchRequest req;
  req.msc = &msc;
  req.annot = &full;
  return m.search(req, ctx);
}

inline SearchResult find_accepting_run(const Machine& m, const Msc& msc,
                                       const SlotTable& annot = SlotTable()) {
  SearchContext ctx;
  SlotTable a = annot.events() == msc.size() ? annot : SlotTable(msc.size(), 0);
  return find_accepting_run(m, msc, a, ctx);
}

// Tri-state membership; budget exhaustion is reported, never folded into
// rejection.
inline Outcome accepts(const Machine& m, const Msc& msc, const SlotTable& annot,
                       SearchContext& ctx) {
  SlotTable a = annot.events() == msc.size() ? annot : SlotTable(msc.size(), 0);
  return find_accepting_run(m, msc, a, ctx).outcome;
}

inline Outcome accepts(const Machine& m, const Msc& msc, const SlotTable& annot = SlotTable()) {
  SearchContext ctx;
  return accepts(m, msc, annot, ctx);
}

// Checks that a run of a (possibly lazy) machine is consistent: every step
// is offered by the transition generator, states chain, messages match,
// channels end empty and the final tuple is accepting.
inline bool validate_generic_run(const Machine& m, const Msc& msc, const SlotTable& annot,
                                 const Run& run, std::vector<std::string>* why = nullptr) {
  auto fail = [&](std::string s) {
    if (why) why->push_back(std::move(s));
    return false;
  };
  if (static_cast<int>(run.steps.size()) != msc.size()) return fail("run is not total");
  auto tuples = m.initial_tuples();
  if (run.initial_tuple < 0 || run.initial_tuple >= static_cast<int>(tuples.size()))
    return fail("bad initial tuple");
  std::vector<State> cur = tuples[run.initial_tuple];
  SlotTable full = annot.widened(m.slot_count());
  for (EventId e : msc.linearization()) {
    const auto& st = run.steps[e];
    ProcId p = msc.loc(e);
    if (st.source != cur[p]) return fail("state chaining broken at " + msc.id(e));
    if (msc.kind(e) == EventKind::Recv && st.msg != run.steps[msc.partner(e)].msg)
      return fail("message mismatch at " + msc.id(e));
    EventView ev{e, p, msc.kind(e), msc.label(e), msc.peer(e), full.row(e)};
    std::vector<Step> succ;
    const Message* in = msc.kind(e) == EventKind::Recv ? &st.msg : nullptr;
    m.successors(ev, st.source, in, succ);
    bool found = false;
    for (const auto& s : succ)
      if (s.target == st.target && (msc.kind(e) != EventKind::Send || s.msg == st.msg))
        found = true;
    if (!found) return fail("step not offered at " + msc.id(e));
    cur[p] = st.target;
  }
  if (!m.accepting(cur)) return fail("final tuple not accepting");
  return true;
}

// Runs an inner machine on the mirrored MSC and reverses the run.
class MirrorMachine : public Machine {
 public:
  explicit MirrorMachine(MachinePtr inner) : inner_(std::move(inner)) {}

  const SystemSignature& signature() const override { return inner_->signature(); }
  int slot_count() const override { return inner_->slot_count(); }
  std::vector<int> read_slots() const override { return inner_->read_slots(); }
  State initial_state(ProcId) const override {
    throw Unsupported("mirror machines are searched by delegation only");
  }
  std::vector<std::vector<State>> initial_tuples() const override {
    throw Unsupported("mirror machines are searched by delegation only");
  }
  void successors(const EventView&, const State&, const Message*,
                  std::vector<Step>&) const override {
    throw Unsupported("mirror machines are searched by delegation only");
  }
  bool accepting(const std::vector<State>&) const override {
    throw Unsupported("mirror machines are searched by delegation only");
  }

  SearchResult search(const SearchRequest& req, SearchContext& ctx) const override {
    Msc mirrored = req.msc->mirrored();
    SearchRequest inner_req = req;
    inner_req.msc = &mirrored;
    SearchResult r = inner_->search(inner_req, ctx);
    if (r.outcome == Outcome::Found)
      for (auto& st : r.run.steps) std::swap(st.source, st.target);
    return r;
  }

  std::string describe() const override { return "mirror(" + inner_->describe() + ")"; }
  const MachinePtr& inner() const { return inner_; }

 private:
  MachinePtr inner_;
};

namespace detail {

inline void append_part(std::vector<Word>& out, const std::vector<Word>& part) {
  out.push_back(static_cast<Word>(part.size()));
  out.insert(out.end(), part.begin(), part.end());
}

// Splits a length-prefixed concatenation.
inline std::vector<std::vector<Word>> split_parts(const std::vector<Word>& v, std::size_t n) {
  std::vector<std::vector<Word>> out;
  std::size_t i = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t len = static_cast<std::size_t>(v.at(i++));
    out.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(i),
                     v.begin() + static_cast<std::ptrdiff_t>(i + len));
    i += len;
  }
  return out;
}

}  // namespace detail

// Synchronous product of machines over one signature and slot layout.
class ProductMachine : public Machine {
 public:
  explicit ProductMachine(std::vector<MachinePtr> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw InputError("empty product");
    for (const auto& p : parts_)
      if (!(p->signature() == parts_[0]->signature()))
        throw InputError("product of machines over different signatures");
  }

  const SystemSignature& signature() const override { return parts_[0]->signature(); }
  int slot_count() const override {
    int w = 0;
    for (const auto& p : parts_) w = std::max(w, p->slot_count());
    return w;
  }
  std::vector<int> read_slots() const override {
    std::set<int> s;
    for (const auto& p : parts_)
      for (int x : p->read_slots()) s.insert(x);
    return {s.begin(), s.end()};
  }
  State initial_state(ProcId p) const override {
    State s;
    for (const auto& m : parts_) detail::append_part(s, m->initial_state(p));
    return s;
  }
  void successors(const EventView& ev, const State& s, const Message* in,
                  std::vector<Step>& out) const override {
    auto states = detail::split_parts(s, parts_.size());
    std::vector<std::vector<Word>> ins;
    if (in) ins = detail::split_parts(*in, parts_.size());
    std::vector<std::vector<Step>> per(parts_.size());
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      parts_[k]->successors(ev, states[k], in ? &ins[k] : nullptr, per[k]);
      if (per[k].empty()) return;
    }
    std::vector<std::size_t> idx(parts_.size(), 0);
    for (;;) {
      Step st;
      for (std::size_t k = 0; k < parts_.size(); ++k) {
        detail::append_part(st.target, per[k][idx[k]].target);
        if (ev.kind == EventKind::Send) detail::append_part(st.msg, per[k][idx[k]].msg);
      }
      out.push_back(std::move(st));
      std::size_t k = 0;
      for (; k < parts_.size(); ++k) {
        if (++idx[k] < per[k].size()) break;
        idx[k] = 0;
      }
      if (k == parts_.size()) break;
    }
  }
  bool accepting(const std::vector<State>& finals) const override {
    std::vector<std::vector<State>> split(parts_.size());
    for (const auto& f : finals) {
      auto parts = detail::split_parts(f, parts_.size());
      for (std::size_t k = 0; k < parts_.size(); ++k) split[k].push_back(parts[k]);
    }
    for (std::size_t k = 0; k < parts_.size(); ++k)
      if (!parts_[k]->accepting(split[k])) return false;
    return true;
  }
  std::string describe() const override { return "product"; }

 private:
  std::vector<MachinePtr> parts_;
};

}  // namespace cfmg
