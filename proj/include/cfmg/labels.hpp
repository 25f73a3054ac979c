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
#include <functional>
#include <string>
#include <vector>

#include "cfmg/machine.hpp"
#include "cfmg/path.hpp"

namespace cfmg {

// Where a label machine reads its first annotation component from.
inline constexpr int kInputLabel = -1;  // the event's own action label
inline constexpr int kInputUnit = -2;   // the one-point set, value 0

namespace detail {

// theta over prefixes of pi: theta[i] describes the prefix of length i.
// Deterministic given the predecessor's theta and the incoming message.
struct LastCore {
  PathExpr pi;
  int bot = 0;

  std::size_t width() const { return pi.size() + 1; }

  void step(const EventView& ev, const Word* prev, const Word* in, int xi1, Word* out) const {
    out[0] = xi1;
    for (std::size_t i = 1; i <= pi.size(); ++i) {
      const auto& s = pi.symbols[i - 1];
      switch (s.kind) {
        case PathSymbol::Kind::Step:
          out[i] = prev ? prev[i - 1] : bot;
          break;
        case PathSymbol::Kind::StarStep:
          out[i] = out[i - 1] != bot ? out[i - 1] : (prev ? prev[i] : bot);
          break;
        case PathSymbol::Kind::Msg:
          out[i] = (in && ev.kind == EventKind::Recv && ev.proc == s.b && ev.peer == s.a)
                       ? in[i - 1]
                       : bot;
          break;
        case PathSymbol::Kind::Label:
          out[i] = ev.label == s.a ? out[i - 1] : bot;
          break;
      }
    }
  }

  // Runs step over a whole MSC with input xi1[e]; returns theta per event.
  std::vector<std::vector<Word>> sweep(const Msc& m, const std::vector<int>& xi1) const {
    std::vector<std::vector<Word>> theta(m.size(), std::vector<Word>(width()));
    for (EventId e : m.linearization()) {
      EventView ev{e, m.loc(e), m.kind(e), m.label(e), m.peer(e), nullptr};
      const EventId p = m.prev(e);
      const Word* in = m.kind(e) == EventKind::Recv ? theta[m.partner(e)].data() : nullptr;
      step(ev, p >= 0 ? theta[p].data() : nullptr, in, xi1[e], theta[e].data());
    }
    return theta;
  }
};

// theta over suffixes of pi: theta[i] describes the suffix starting at i.
// Entries depending on later events are guessed; the predecessor's theta
// and the sender's theta pin them, and the last event of a process checks
// the maximality rules.
struct FirstCore {
  PathExpr pi;
  int top = 0;
  std::vector<int> values;                 // candidate values, including top
  std::vector<std::vector<char>> may_start;  // [i][proc]: suffix i can start there

  FirstCore() = default;
  FirstCore(const SystemSignature& sig, PathExpr x, int top_code, std::vector<int> vals)
      : pi(std::move(x)), top(top_code), values(std::move(vals)) {
    const int np = sig.process_count();
    may_start.assign(pi.size() + 1, std::vector<char>(np, 0));
    for (std::size_t i = 0; i <= pi.size(); ++i)
      for (const auto& [a, b] : comp(sig, pi.suffix_from(i))) may_start[i][a] = 1;
  }

  std::size_t width() const { return pi.size() + 1; }

  // Calls emit(theta) for every theta consistent with the local rules and
  // the pins.  pin0 >= -1: required value of theta[0] (or no requirement).
  template <typename F>
  void enumerate(const EventView& ev, const Word* prev, const Word* in, int xi1, int pin0,
                 F&& emit) const {
    const std::size_t n = pi.size();
    // pins[i] = required value or kFree.
    constexpr int kFree = std::numeric_limits<int>::min();
    std::vector<int> pins(n + 1, kFree);
    bool clash = false;
    auto pin = [&](std::size_t i, int v) {
      if (pins[i] == kFree)
        pins[i] = v;
      else if (pins[i] != v)
        clash = true;
    };
    if (prev) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = pi.symbols[i];
        if (s.kind == PathSymbol::Kind::Step)
          pin(i + 1, prev[i]);
        else if (s.kind == PathSymbol::Kind::StarStep && prev[i + 1] == top)
          pin(i, prev[i]);
      }
    }
    if (in && ev.kind == EventKind::Recv) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = pi.symbols[i];
        if (s.kind == PathSymbol::Kind::Msg && s.a == ev.peer && s.b == ev.proc)
          pin(i + 1, in[i]);
      }
    }
    if (pin0 >= 0) pin(0, pin0);
    if (clash) return;
    std::vector<Word> theta(n + 1, 0);
    auto rec = [&](auto&& self, std::ptrdiff_t i) -> void {
      if (i < 0) {
        emit(theta);
        return;
      }
      const std::size_t k = static_cast<std::size_t>(i);
      auto try_value = [&](int v) {
        if (pins[k] != kFree && pins[k] != v) return;
        if (!may_start[k][ev.proc] && v != top) return;
        theta[k] = v;
        self(self, i - 1);
      };
      if (k == n) {
        try_value(xi1);
        return;
      }
      const auto& s = pi.symbols[k];
      switch (s.kind) {
        case PathSymbol::Kind::Step:
          if (pins[k] != kFree) {
            try_value(pins[k]);
          } else {
            for (int v : values) try_value(v);
          }
          break;
        case PathSymbol::Kind::StarStep:
          if (theta[k + 1] != top) {
            try_value(theta[k + 1]);
          } else if (pins[k] != kFree) {
            try_value(pins[k]);
          } else {
            for (int v : values) try_value(v);
          }
          break;
        case PathSymbol::Kind::Msg:
          if (ev.kind == EventKind::Send && ev.proc == s.a && ev.peer == s.b) {
            if (pins[k] != kFree) {
              try_value(pins[k]);
            } else {
              for (int v : values) try_value(v);
            }
          } else {
            try_value(top);
          }
          break;
        case PathSymbol::Kind::Label:
          try_value(ev.label == s.a ? theta[k + 1] : top);
          break;
      }
    };
    rec(rec, static_cast<std::ptrdiff_t>(n));
  }

  // Rules for an event without process successor.
  bool final_ok(const Word* theta) const {
    for (std::size_t i = 0; i < pi.size(); ++i) {
      const auto& s = pi.symbols[i];
      if (s.kind == PathSymbol::Kind::Step && theta[i] != top) return false;
      if (s.kind == PathSymbol::Kind::StarStep && theta[i + 1] == top && theta[i] != top)
        return false;
    }
    return true;
  }

  // The rules read backwards determine theta from the future: the unique
  // assignment satisfying every pin, computed from the last events down.
  // `top_code` replaces `top` so other value sets can be threaded through.
  std::vector<std::vector<Word>> solve(const Msc& m, const std::vector<int>& xi1, int top_code) const {
    const std::size_t n = pi.size();
    std::vector<std::vector<Word>> theta(m.size(), std::vector<Word>(n + 1));
    const auto& lin = m.linearization();
    for (auto it = lin.rbegin(); it != lin.rend(); ++it) {
      const EventId e = *it;
      auto& t = theta[e];
      const EventId nx = m.next(e);
      t[n] = may_start[n][m.loc(e)] ? xi1[e] : top_code;
      for (std::size_t i = n; i-- > 0;) {
        const auto& s = pi.symbols[i];
        Word v = top_code;
        switch (s.kind) {
          case PathSymbol::Kind::Step:
            if (nx >= 0) v = theta[nx][i + 1];
            break;
          case PathSymbol::Kind::StarStep:
            v = t[i + 1] != top_code ? t[i + 1] : (nx >= 0 ? theta[nx][i] : top_code);
            break;
          case PathSymbol::Kind::Msg:
            if (m.kind(e) == EventKind::Send && m.loc(e) == s.a && m.peer(e) == s.b)
              v = theta[m.partner(e)][i + 1];
            break;
          case PathSymbol::Kind::Label:
            if (m.label(e) == s.a) v = t[i + 1];
            break;
        }
        t[i] = may_start[i][m.loc(e)] ? v : top_code;
      }
    }
    return theta;
  }
};

inline int read_input(const EventView& ev, int slot) {
  if (slot == kInputLabel) return ev.label;
  if (slot == kInputUnit) return 0;
  return ev.slots[slot];
}

inline int max_slot(std::initializer_list<int> slots) {
  int w = 0;
  for (int s : slots) w = std::max(w, s + 1);
  return w;
}

inline std::vector<int> real_slots(std::initializer_list<int> slots) {
  std::vector<int> out;
  for (int s : slots)
    if (s >= 0) out.push_back(s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// Recognizes (M, xi) with xi2(e) = xi1(last_pi(e)).  xi1 takes values
// 0..theta_size-1 (or comes from kInputLabel/kInputUnit), xi2 additionally
// theta_size for bottom.  check_proc restricts the check to one process.
class LastLabelMachine : public Machine {
 public:
  LastLabelMachine(SystemSignature sig, PathExpr pi, int theta_size, int slot_in, int slot_out,
                   ProcId check_proc = -1)
      : sig_(std::move(sig)),
        core_{std::move(pi), theta_size},
        theta_size_(theta_size),
        slot_in_(slot_in),
        slot_out_(slot_out),
        check_proc_(check_proc) {}

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return detail::max_slot({slot_in_, slot_out_}); }
  std::vector<int> read_slots() const override { return detail::real_slots({slot_in_, slot_out_}); }
  State initial_state(ProcId) const override { return {}; }

  void successors(const EventView& ev, const State& s, const Message* in,
                  std::vector<Step>& out) const override {
    Step st;
    st.target.resize(core_.width());
    core_.step(ev, s.empty() ? nullptr : s.data(), in ? in->data() : nullptr,
               detail::read_input(ev, slot_in_), st.target.data());
    if ((check_proc_ < 0 || check_proc_ == ev.proc) &&
        ev.slots[slot_out_] != st.target.back())
      return;
    if (ev.kind == EventKind::Send) st.msg = st.target;
    out.push_back(std::move(st));
  }
  bool accepting(const std::vector<State>&) const override { return true; }
  std::string describe() const override { return "last-label"; }

  int bottom_code() const { return theta_size_; }

 private:
  SystemSignature sig_;
  detail::LastCore core_;
  int theta_size_;
  int slot_in_, slot_out_;
  ProcId check_proc_;
};

// Recognizes (M, xi) with xi2(e) = xi1(first_pi(e)); top is theta_size.
class FirstLabelMachine : public Machine {
 public:
  FirstLabelMachine(SystemSignature sig, PathExpr pi, int theta_size, int slot_in, int slot_out,
                    ProcId check_proc = -1)
      : sig_(std::move(sig)),
        theta_size_(theta_size),
        slot_in_(slot_in),
        slot_out_(slot_out),
        check_proc_(check_proc) {
    std::vector<int> vals;
    for (int v = 0; v <= theta_size; ++v) vals.push_back(v);
    core_ = detail::FirstCore(sig_, std::move(pi), theta_size, std::move(vals));
  }

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return detail::max_slot({slot_in_, slot_out_}); }
  std::vector<int> read_slots() const override { return detail::real_slots({slot_in_, slot_out_}); }
  State initial_state(ProcId) const override { return {}; }

  void successors(const EventView& ev, const State& s, const Message* in,
                  std::vector<Step>& out) const override {
    const bool check = check_proc_ < 0 || check_proc_ == ev.proc;
    core_.enumerate(ev, s.empty() ? nullptr : s.data(), in ? in->data() : nullptr,
                    detail::read_input(ev, slot_in_), check ? ev.slots[slot_out_] : -1,
                    [&](const std::vector<Word>& theta) {
                      Step st;
                      st.target = theta;
                      if (ev.kind == EventKind::Send) st.msg = theta;
                      out.push_back(std::move(st));
                    });
  }
  bool accepting(const std::vector<State>& finals) const override {
    for (const auto& f : finals)
      if (!f.empty() && !core_.final_ok(f.data())) return false;
    return true;
  }
  std::string describe() const override { return "first-label"; }

  int top_code() const { return theta_size_; }

 private:
  SystemSignature sig_;
  detail::FirstCore core_;
  int theta_size_;
  int slot_in_, slot_out_;
  ProcId check_proc_;
};

namespace detail {

// Chains a first-core for pi2 into a last-core for pi1: the last-core's
// input at g is xi1(first_pi2(g)), so its output at e is
// xi1(first_pi2(last_pi1(e))).  Codes: theta values 0..n-1, bottom n,
// top n+1.
struct FaCore {
  LastCore last;
  FirstCore first;
  int n = 0;

  FaCore() = default;
  FaCore(const SystemSignature& sig, const PathExpr& pi1, const PathExpr& pi2, int theta_size)
      : n(theta_size) {
    last = {pi1, theta_size};
    std::vector<int> vals;
    for (int v = 0; v < theta_size; ++v) vals.push_back(v);
    vals.push_back(theta_size + 1);
    first = FirstCore(sig, pi2, theta_size + 1, std::move(vals));
  }

  int bottom() const { return n; }
  int top() const { return n + 1; }

  // State and message: [first theta | last theta], each length-prefixed.
  template <typename F>
  void successors(const EventView& ev, const State& s, const Message* in, int xi1,
                  F&& emit) const {
    const Word* prev_first = nullptr;
    const Word* prev_last = nullptr;
    std::vector<std::vector<Word>> parts;
    if (!s.empty()) {
      parts = split_parts(s, 2);
      prev_first = parts[0].data();
      prev_last = parts[1].data();
    }
    std::vector<std::vector<Word>> in_parts;
    const Word* in_first = nullptr;
    const Word* in_last = nullptr;
    if (in) {
      in_parts = split_parts(*in, 2);
      in_first = in_parts[0].data();
      in_last = in_parts[1].data();
    }
    first.enumerate(ev, prev_first, in_first, xi1, -1, [&](const std::vector<Word>& tf) {
      std::vector<Word> tl(last.width());
      last.step(ev, prev_last, in_last, tf[0], tl.data());
      State target;
      append_part(target, tf);
      append_part(target, tl);
      emit(std::move(target), tl.back());
    });
  }

  bool final_ok(const State& s) const {
    if (s.empty()) return true;
    auto parts = split_parts(s, 2);
    return first.final_ok(parts[0].data());
  }

  // The image of every event under f, threading event identities through
  // the same rules: an event id, size() for bottom or size()+1 for top.
  std::vector<int> targets(const Msc& m) const {
    const int n_ev = m.size();
    std::vector<int> ids(n_ev);
    for (int e = 0; e < n_ev; ++e) ids[e] = e;
    auto tf = first.solve(m, ids, n_ev + 1);
    std::vector<int> head(n_ev);
    for (int e = 0; e < n_ev; ++e) head[e] = tf[e][0];
    LastCore l{last.pi, n_ev};
    auto tl = l.sweep(m, head);
    std::vector<int> out(n_ev);
    for (int e = 0; e < n_ev; ++e) out[e] = tl[e].back();
    return out;
  }

  // States of the unique run for input xi1 (the same as successors would
  // pick), with the output value per event.
  std::vector<State> states(const Msc& m, const std::vector<int>& xi1, std::vector<int>* value) const {
    auto tf = first.solve(m, xi1, top());
    std::vector<int> head(m.size());
    for (EventId e = 0; e < m.size(); ++e) head[e] = tf[e][0];
    auto tl = last.sweep(m, head);
    std::vector<State> out(m.size());
    if (value) value->assign(m.size(), 0);
    for (EventId e = 0; e < m.size(); ++e) {
      append_part(out[e], tf[e]);
      append_part(out[e], tl[e]);
      if (value) (*value)[e] = tl[e].back();
    }
    return out;
  }
};

}  // namespace detail

// Recognizes (M, xi) with xi2(e) = xi1(f^{pi1,pi2}(e)) on events of q.
// xi2 codes: theta_size for bottom, theta_size+1 for top.
class FaLabelMachine : public Machine {
 public:
  FaLabelMachine(SystemSignature sig, ProcId p, ProcId q, PathExpr pi1, PathExpr pi2,
                 int theta_size, int slot_in, int slot_out)
      : sig_(std::move(sig)), q_(q), slot_in_(slot_in), slot_out_(slot_out) {
    if (!in_paths(sig_, pi1, p, q) || !in_paths(sig_, pi2, p, q))
      throw InputError("path expressions are not compatible with the process pair");
    core_ = detail::FaCore(sig_, pi1, pi2, theta_size);
  }

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return detail::max_slot({slot_in_, slot_out_}); }
  std::vector<int> read_slots() const override { return detail::real_slots({slot_in_, slot_out_}); }
  State initial_state(ProcId) const override { return {}; }

  void successors(const EventView& ev, const State& s, const Message* in,
                  std::vector<Step>& out) const override {
    const bool check = ev.proc == q_;
    const int want = check ? ev.slots[slot_out_] : 0;
    core_.successors(ev, s, in, detail::read_input(ev, slot_in_), [&](State t, int value) {
      if (check && value != want) return;
      Step st;
      if (ev.kind == EventKind::Send) st.msg = t;
      st.target = std::move(t);
      out.push_back(std::move(st));
    });
  }
  bool accepting(const std::vector<State>& finals) const override {
    for (const auto& f : finals)
      if (!core_.final_ok(f)) return false;
    return true;
  }
  std::string describe() const override { return "fa-label"; }

  int bottom_code() const { return core_.bottom(); }
  int top_code() const { return core_.top(); }

 private:
  SystemSignature sig_;
  ProcId q_;
  detail::FaCore core_;
  int slot_in_, slot_out_;
};

}  // namespace cfmg
