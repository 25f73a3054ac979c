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

#include <cctype>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cfmg/gossip.hpp"

namespace cfmg {

// ---- Syntax ----

struct TlFormula;
using TlPtr = std::shared_ptr<const TlFormula>;

struct TlFormula {
  enum class Kind {
    True,
    Atom,   // label test
    Proc,   // process test
    Not,
    Or,
    Co,
    Until,  // strict until
    Since,  // strict since
    // Derived forms.
    And,
    Next,   // X_p
    Yest,   // Y_p
    ProcUntil,  // U_p, non-strict
    First,  // O_p
  };
  Kind kind = Kind::True;
  std::string name;  // label of Atom, process of Proc and of the p-indexed forms
  TlPtr left, right;

  bool operator==(const TlFormula& o) const {
    auto same = [](const TlPtr& x, const TlPtr& y) { return (!x && !y) || (x && y && *x == *y); };
    return kind == o.kind && name == o.name && same(left, o.left) && same(right, o.right);
  }
};

namespace tl {

using K = TlFormula::Kind;

inline TlPtr make(K k, std::string name = {}, TlPtr l = nullptr, TlPtr r = nullptr) {
  auto f = std::make_shared<TlFormula>();
  f->kind = k;
  f->name = std::move(name);
  f->left = std::move(l);
  f->right = std::move(r);
  return f;
}
inline TlPtr truth() { return make(K::True); }
inline TlPtr atom(std::string a) { return make(K::Atom, std::move(a)); }
inline TlPtr proc(std::string p) { return make(K::Proc, std::move(p)); }
inline TlPtr lnot(TlPtr x) { return make(K::Not, {}, std::move(x)); }
inline TlPtr lor(TlPtr x, TlPtr y) { return make(K::Or, {}, std::move(x), std::move(y)); }
inline TlPtr land(TlPtr x, TlPtr y) { return make(K::And, {}, std::move(x), std::move(y)); }
inline TlPtr co(TlPtr x) { return make(K::Co, {}, std::move(x)); }
inline TlPtr until(TlPtr x, TlPtr y) { return make(K::Until, {}, std::move(x), std::move(y)); }
inline TlPtr since(TlPtr x, TlPtr y) { return make(K::Since, {}, std::move(x), std::move(y)); }
inline TlPtr next(std::string p, TlPtr x) { return make(K::Next, std::move(p), std::move(x)); }
inline TlPtr yest(std::string p, TlPtr x) { return make(K::Yest, std::move(p), std::move(x)); }
inline TlPtr proc_until(std::string p, TlPtr x, TlPtr y) {
  return make(K::ProcUntil, std::move(p), std::move(x), std::move(y));
}
inline TlPtr first(std::string p, TlPtr x) { return make(K::First, std::move(p), std::move(x)); }

}  // namespace tl

inline std::string print_tl(const TlFormula& f) {
  using K = TlFormula::Kind;
  switch (f.kind) {
    case K::True: return "true";
    case K::Atom: return f.name;
    case K::Proc: return "@" + f.name;
    case K::Not: return "!" + print_tl(*f.left);
    case K::Co: return "co " + print_tl(*f.left);
    case K::Next: return "X_" + f.name + " " + print_tl(*f.left);
    case K::Yest: return "Y_" + f.name + " " + print_tl(*f.left);
    case K::First: return "O_" + f.name + " " + print_tl(*f.left);
    case K::Or: return "(" + print_tl(*f.left) + " | " + print_tl(*f.right) + ")";
    case K::And: return "(" + print_tl(*f.left) + " & " + print_tl(*f.right) + ")";
    case K::Until: return "(" + print_tl(*f.left) + " U " + print_tl(*f.right) + ")";
    case K::Since: return "(" + print_tl(*f.left) + " S " + print_tl(*f.right) + ")";
    case K::ProcUntil:
      return "(" + print_tl(*f.left) + " Up_" + f.name + " " + print_tl(*f.right) + ")";
  }
  return "?";
}

namespace detail {

// Recursive descent over
//   or    := and ('|' and)*
//   and   := bin ('&' bin)*
//   bin   := unary (('U' | 'S' | 'Up_p') bin)?
//   unary := '!' unary | 'co' unary | ('X_p' | 'Y_p' | 'O_p') unary | prim
//   prim  := 'true' | 'false' | '@' name | name | '(' or ')'
class TlParser {
 public:
  TlParser(std::string text, const SystemSignature* sig) : s_(std::move(text)), sig_(sig) {}

  TlPtr parse() {
    auto f = parse_or();
    skip();
    if (i_ != s_.size()) fail("unexpected input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("formula: " + what + " at column " + std::to_string(i_ + 1));
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }
  std::string peek_word() {
    skip();
    std::size_t j = i_;
    while (j < s_.size() && word_char(s_[j])) ++j;
    return s_.substr(i_, j - i_);
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  std::string check_proc(const std::string& p) {
    if (p.empty()) fail("missing process name");
    if (sig_ && !sig_->find_process(p)) fail("unknown process '" + p + "'");
    return p;
  }
  // "X_p" style keyword: returns p, or empty if `w` is not of that form.
  static std::string indexed(const std::string& w, const std::string& prefix) {
    return w.size() > prefix.size() && w.compare(0, prefix.size(), prefix) == 0
               ? w.substr(prefix.size())
               : std::string();
  }
  bool is_indexed(const std::string& w, const std::string& prefix) const {
    auto p = indexed(w, prefix);
    return !p.empty() && (!sig_ || sig_->find_process(p));
  }

  TlPtr parse_or() {
    auto f = parse_and();
    while (eat('|')) f = tl::lor(f, parse_and());
    return f;
  }
  TlPtr parse_and() {
    auto f = parse_bin();
    while (eat('&')) f = tl::land(f, parse_bin());
    return f;
  }
  TlPtr parse_bin() {
    auto f = parse_unary();
    auto w = peek_word();
    if (w == "U" || w == "S") {
      i_ += w.size();
      auto g = parse_bin();
      return w == "U" ? tl::until(f, g) : tl::since(f, g);
    }
    if (is_indexed(w, "Up_")) {
      i_ += w.size();
      auto g = parse_bin();
      return tl::proc_until(check_proc(indexed(w, "Up_")), f, g);
    }
    return f;
  }
  TlPtr parse_unary() {
    if (eat('!')) return tl::lnot(parse_unary());
    auto w = peek_word();
    if (w == "co") {
      i_ += w.size();
      return tl::co(parse_unary());
    }
    for (const char* pre : {"X_", "Y_", "O_"}) {
      if (!is_indexed(w, pre)) continue;
      i_ += w.size();
      auto p = check_proc(indexed(w, pre));
      auto x = parse_unary();
      if (pre[0] == 'X') return tl::next(p, x);
      if (pre[0] == 'Y') return tl::yest(p, x);
      return tl::first(p, x);
    }
    return parse_prim();
  }
  TlPtr parse_prim() {
    if (eat('(')) {
      auto f = parse_or();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    if (eat('@')) {
      auto w = peek_word();
      i_ += w.size();
      return tl::proc(check_proc(w));
    }
    auto w = peek_word();
    if (w.empty()) fail(i_ < s_.size() ? std::string("unexpected '") + s_[i_] + "'" : "unexpected end");
    if (w == "U" || w == "S" || w == "co") fail("keyword '" + w + "' where a formula was expected");
    i_ += w.size();
    if (w == "true") return tl::truth();
    if (w == "false") return tl::lnot(tl::truth());
    if (sig_ && !sig_->find_label(w)) fail("unknown label '" + w + "'");
    return tl::atom(w);
  }

  std::string s_;
  const SystemSignature* sig_;
  std::size_t i_ = 0;
};

}  // namespace detail

// Parses a formula; with a signature, names are checked against it.
inline TlPtr parse_tl(const std::string& text, const SystemSignature* sig = nullptr) {
  return detail::TlParser(text, sig).parse();
}

inline bool has_co(const TlFormula& f) {
  if (f.kind == TlFormula::Kind::Co) return true;
  return (f.left && has_co(*f.left)) || (f.right && has_co(*f.right));
}

inline bool is_core(const TlFormula& f) {
  using K = TlFormula::Kind;
  if (f.kind == K::And || f.kind == K::Next || f.kind == K::Yest || f.kind == K::ProcUntil ||
      f.kind == K::First)
    return false;
  return (!f.left || is_core(*f.left)) && (!f.right || is_core(*f.right));
}

inline int tl_depth(const TlFormula& f) {
  int d = 0;
  if (f.left) d = std::max(d, tl_depth(*f.left));
  if (f.right) d = std::max(d, tl_depth(*f.right));
  return f.left ? d + 1 : 0;
}

// Rewrites derived modalities into a, p, true, !, |, co, U, S.
inline TlPtr expand_derived(const TlPtr& f) {
  using K = TlFormula::Kind;
  using namespace tl;
  TlPtr l = f->left ? expand_derived(f->left) : nullptr;
  TlPtr r = f->right ? expand_derived(f->right) : nullptr;
  auto conj = [](TlPtr x, TlPtr y) { return lnot(lor(lnot(std::move(x)), lnot(std::move(y)))); };
  auto X = [&](const std::string& p, TlPtr x) { return until(lnot(proc(p)), conj(proc(p), std::move(x))); };
  auto Y = [&](const std::string& p, TlPtr x) { return since(lnot(proc(p)), conj(proc(p), std::move(x))); };
  switch (f->kind) {
    case K::True:
    case K::Atom:
    case K::Proc: return f;
    case K::Not: return lnot(l);
    case K::Or: return lor(l, r);
    case K::Co: return co(l);
    case K::Until: return until(l, r);
    case K::Since: return since(l, r);
    case K::And: return conj(l, r);
    case K::Next: return X(f->name, l);
    case K::Yest: return Y(f->name, l);
    case K::ProcUntil: {
      const auto& p = f->name;
      auto weak = lor(lnot(proc(p)), l);
      return lor(conj(proc(p), r), conj(weak, until(weak, conj(proc(p), r))));
    }
    case K::First: {
      const auto& p = f->name;
      auto initial = lnot(Y(p, truth()));
      return lor(lor(Y(p, X(p, l)), co(conj(conj(proc(p), initial), l))), X(p, conj(initial, l)));
    }
  }
  return f;
}

// ---- Semantics ----

// Truth value at every event, computed bottom-up from the causal order.
// Derived forms are evaluated by their direct meaning, not their expansion.
inline std::vector<bool> eval_tl(const Msc& m, const TlFormula& f) {
  using K = TlFormula::Kind;
  const int n = m.size();
  const auto& sig = m.signature();
  std::vector<bool> out(n, false);
  std::vector<bool> l, r;
  if (f.left) l = eval_tl(m, *f.left);
  if (f.right) r = eval_tl(m, *f.right);
  auto proc_of = [&]() {
    auto p = sig.find_process(f.name);
    if (!p) throw InputError("formula mentions unknown process '" + f.name + "'");
    return *p;
  };
  switch (f.kind) {
    case K::True:
      out.assign(n, true);
      break;
    case K::Atom: {
      auto a = sig.find_label(f.name);
      if (!a) throw InputError("formula mentions unknown label '" + f.name + "'");
      for (EventId e = 0; e < n; ++e) out[e] = m.label(e) == *a;
      break;
    }
    case K::Proc: {
      ProcId p = proc_of();
      for (EventId e = 0; e < n; ++e) out[e] = m.loc(e) == p;
      break;
    }
    case K::Not:
      for (EventId e = 0; e < n; ++e) out[e] = !l[e];
      break;
    case K::Or:
      for (EventId e = 0; e < n; ++e) out[e] = l[e] || r[e];
      break;
    case K::And:
      for (EventId e = 0; e < n; ++e) out[e] = l[e] && r[e];
      break;
    case K::Co:
      for (EventId e = 0; e < n; ++e)
        for (EventId g = 0; g < n && !out[e]; ++g)
          out[e] = l[g] && !m.leq(e, g) && !m.leq(g, e);
      break;
    case K::Until:
    case K::Since: {
      const bool fut = f.kind == K::Until;
      auto below = [&](EventId x, EventId y) { return fut ? m.less(x, y) : m.less(y, x); };
      for (EventId e = 0; e < n; ++e)
        for (EventId g = 0; g < n && !out[e]; ++g) {
          if (!r[g] || !below(e, g)) continue;
          bool ok = true;
          for (EventId h = 0; h < n && ok; ++h)
            if (below(e, h) && below(h, g) && !l[h]) ok = false;
          out[e] = ok;
        }
      break;
    }
    case K::Next:
    case K::Yest: {
      const ProcId p = proc_of();
      const auto& evs = m.events_on(p);
      for (EventId e = 0; e < n; ++e) {
        EventId pick = -1;
        if (f.kind == K::Next) {
          for (EventId g : evs)
            if (m.less(e, g)) {
              pick = g;
              break;
            }
        } else {
          for (EventId g : evs)
            if (m.less(g, e)) pick = g;
        }
        out[e] = pick >= 0 && l[pick];
      }
      break;
    }
    case K::ProcUntil: {
      const ProcId p = proc_of();
      const auto& evs = m.events_on(p);
      for (EventId e = 0; e < n; ++e) {
        // Walk the p-events above e in process order.
        for (EventId g : evs) {
          if (!m.leq(e, g)) continue;
          if (r[g]) {
            out[e] = true;
            break;
          }
          if (!l[g]) break;
        }
      }
      break;
    }
    case K::First: {
      const ProcId p = proc_of();
      const auto& evs = m.events_on(p);
      for (EventId e = 0; e < n; ++e) {
        for (EventId g : evs)
          if (!m.less(g, e)) {
            out[e] = l[g];
            break;
          }
      }
      break;
    }
  }
  return out;
}

inline bool tl_holds(const Msc& m, const TlFormula& f, EventId e) { return eval_tl(m, f).at(e); }

// ---- Compilation ----

namespace detail {

// One-state check of a Boolean node: out == op(in1, in2) at every event.
class TlLocalStage : public Machine {
 public:
  TlLocalStage(SystemSignature sig, TlFormula::Kind kind, int out, int in1, int in2, int target)
      : sig_(std::move(sig)), kind_(kind), out_(out), in1_(in1), in2_(in2), target_(target) {}

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return std::max({out_, in1_, in2_}) + 1; }
  std::vector<int> read_slots() const override {
    std::set<int> s{out_};
    if (in1_ >= 0) s.insert(in1_);
    if (in2_ >= 0) s.insert(in2_);
    return {s.begin(), s.end()};
  }
  State initial_state(ProcId) const override { return {}; }
  void successors(const EventView& ev, const State&, const Message*,
                  std::vector<Step>& out) const override {
    using K = TlFormula::Kind;
    bool v = false;
    switch (kind_) {
      case K::True: v = true; break;
      case K::Atom: v = ev.label == target_; break;
      case K::Proc: v = ev.proc == target_; break;
      case K::Not: v = ev.slots[in1_] == 0; break;
      case K::Or: v = ev.slots[in1_] == 1 || ev.slots[in2_] == 1; break;
      default: throw std::logic_error("not a Boolean node");
    }
    if ((ev.slots[out_] == 1) != v) return;
    out.emplace_back();
  }
  bool accepting(const std::vector<State>&) const override { return true; }
  std::string describe() const override { return "tl-local"; }

 private:
  SystemSignature sig_;
  TlFormula::Kind kind_;
  int out_, in1_, in2_, target_;
};

// For events of q: some left path has a non-bottom last event strictly
// above the last events of all right paths.  Output 0 elsewhere.
class DominanceStage : public Machine {
 public:
  DominanceStage(SystemSignature sig, ProcId q, PreorderLayout layout, std::vector<int> left,
                 std::vector<int> right, int out)
      : sig_(std::move(sig)), q_(q), layout_(std::move(layout)), left_(std::move(left)),
        right_(std::move(right)), out_(out) {
    std::set<int> s{out_};
    for (int i : left_) {
      s.insert(layout_.bottom[i]);
      for (int j : right_) s.insert(layout_.bit[i][j]);
    }
    reads_.assign(s.begin(), s.end());
  }

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return reads_.back() + 1; }
  std::vector<int> read_slots() const override { return reads_; }
  State initial_state(ProcId) const override { return {}; }
  void successors(const EventView& ev, const State&, const Message*,
                  std::vector<Step>& out) const override {
    bool v = false;
    if (ev.proc == q_) {
      for (int i : left_) {
        if (ev.slots[layout_.bottom[i]] == 1) continue;
        bool above = true;
        for (int j : right_)
          if (ev.slots[layout_.bit[i][j]] == 1) above = false;
        if (above) {
          v = true;
          break;
        }
      }
    }
    if ((ev.slots[out_] == 1) != v) return;
    out.emplace_back();
  }
  bool accepting(const std::vector<State>&) const override { return true; }
  std::string describe() const override { return "dominance"; }

 private:
  SystemSignature sig_;
  ProcId q_;
  PreorderLayout layout_;
  std::vector<int> left_, right_;
  int out_;
  std::vector<int> reads_;
};

// Slot 0 is the disjunction of the given slots of the event's process.
class OrOverProcessStage : public Machine {
 public:
  OrOverProcessStage(SystemSignature sig, std::vector<std::vector<int>> per_proc)
      : sig_(std::move(sig)), per_proc_(std::move(per_proc)) {
    std::set<int> s{0};
    for (const auto& v : per_proc_) s.insert(v.begin(), v.end());
    reads_.assign(s.begin(), s.end());
  }
  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return reads_.back() + 1; }
  std::vector<int> read_slots() const override { return reads_; }
  State initial_state(ProcId) const override { return {}; }
  void successors(const EventView& ev, const State&, const Message*,
                  std::vector<Step>& out) const override {
    bool v = false;
    for (int s : per_proc_[ev.proc]) v = v || ev.slots[s] == 1;
    if ((ev.slots[0] == 1) != v) return;
    out.emplace_back();
  }
  bool accepting(const std::vector<State>&) const override { return true; }
  std::string describe() const override { return "or"; }

 private:
  SystemSignature sig_;
  std::vector<std::vector<int>> per_proc_;
  std::vector<int> reads_;
};

inline PathExpr with_test(const PathExpr& x, LabelId a, bool front) {
  PathExpr t{{PathSymbol::test(a)}};
  return front ? normalize(concat(t, x)) : normalize(concat(x, t));
}

}  // namespace detail

// Alphabet of the recoded MSCs: a = both, b = left only, c = right only,
// d = neither.
inline SystemSignature abcd_signature(const std::vector<std::string>& processes) {
  return SystemSignature(processes, {"a", "b", "c", "d"});
}

// Machine over the abcd alphabet whose slot 0 is 1 at q-events e exactly
// when (a|b) S (p & (a|c)) holds at e.
inline std::shared_ptr<Pipeline> compile_since_pq(const std::vector<std::string>& processes, ProcId p,
                                                  ProcId q, std::shared_ptr<Pipeline> into = nullptr,
                                                  SlotAllocator* slots_in = nullptr,
                                                  int out_slot = 0) {
  const SystemSignature sig = abcd_signature(processes);
  auto pl = into ? into : std::make_shared<Pipeline>(sig, 1, "since");
  SlotAllocator local(1);
  SlotAllocator& slots = slots_in ? *slots_in : local;
  const LabelId a = 0, c = 2, d = 3;
  std::vector<PathExpr> paths;
  std::vector<int> left, right;
  for (const auto& x : gossip_paths_between(sig, p, q))
    for (LabelId t : {a, c}) {
      left.push_back(static_cast<int>(paths.size()));
      paths.push_back(detail::with_test(x, t, true));
    }
  for (ProcId r = 0; r < sig.process_count(); ++r)
    for (const auto& x : gossip_paths_between(sig, p, r))
      for (const auto& y : gossip_paths_between(sig, r, q))
        for (LabelId t : {c, d}) {
          right.push_back(static_cast<int>(paths.size()));
          paths.push_back(normalize(concat(detail::with_test(x, t, false), y)));
        }
  std::vector<std::pair<int, int>> pairs;
  for (int i : left)
    for (int j : right) pairs.push_back({i, j});
  auto layout = add_preorder_stages(*pl, slots, p, q, paths, &pairs);
  pl->add_stage(std::make_shared<detail::DominanceStage>(sig, q, layout, left, right, out_slot),
                into ? std::vector<GuessSlot>{{out_slot, 2, q}} : std::vector<GuessSlot>{},
                "dominance " + sig.process_name(p) + "," + sig.process_name(q), true);
  return pl;
}

// Machine over the abcd alphabet with slot 0 = [(a|b) S (a|c)].
inline std::shared_ptr<Pipeline> compile_since(const std::vector<std::string>& processes) {
  const SystemSignature sig = abcd_signature(processes);
  const int np = sig.process_count();
  auto pl = std::make_shared<Pipeline>(sig, 1, "since");
  SlotAllocator slots(1);
  std::vector<std::vector<int>> per_q(np);
  for (ProcId q = 0; q < np; ++q)
    for (ProcId p = 0; p < np; ++p) {
      int s = slots.take();
      per_q[q].push_back(s);
      compile_since_pq(processes, p, q, pl, &slots, s);
    }
  pl->add_stage(std::make_shared<detail::OrOverProcessStage>(sig, per_q), {}, "since or");
  return pl;
}

namespace detail {

// Presents an abcd machine (slot 0 = output) as a stage of the outer
// pipeline: events are recoded from two input slots, and for until the
// inner machine runs on the mirrored MSC.
class TlTemporalStage : public Machine {
 public:
  TlTemporalStage(SystemSignature sig, MachinePtr inner, int in1, int in2, int out)
      : sig_(std::move(sig)), inner_(std::move(inner)), in1_(in1), in2_(in2), out_(out),
        inner_sig_(inner_->signature()) {}

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return std::max({in1_, in2_, out_}) + 1; }
  std::vector<int> read_slots() const override {
    std::set<int> s{in1_, in2_, out_};
    return {s.begin(), s.end()};
  }
  State initial_state(ProcId) const override { throw Unsupported("temporal stages are searched by delegation only"); }
  std::vector<std::vector<State>> initial_tuples() const override {
    throw Unsupported("temporal stages are searched by delegation only");
  }
  void successors(const EventView&, const State&, const Message*, std::vector<Step>&) const override {
    throw Unsupported("temporal stages are searched by delegation only");
  }
  bool accepting(const std::vector<State>&) const override {
    throw Unsupported("temporal stages are searched by delegation only");
  }

  SearchResult search(const SearchRequest& req, SearchContext& ctx) const override {
    const Msc& m = *req.msc;
    for (const auto& g : req.guesses)
      if (g.slot != out_) throw std::logic_error("temporal stage: only its output can be guessed");
    std::vector<LabelId> code(m.size());
    for (EventId e = 0; e < m.size(); ++e)
      code[e] = (req.annot->get(e, in1_) == 1 ? 0 : 2) + (req.annot->get(e, in2_) == 1 ? 0 : 1);
    Msc recoded = m.relabeled(code, &inner_sig_);
    SlotTable inner_annot(m.size(), inner_->slot_count());
    for (EventId e = 0; e < m.size(); ++e) inner_annot.set(e, 0, req.annot->get(e, out_));
    SearchRequest r;
    r.msc = &recoded;
    r.annot = &inner_annot;
    for (const auto& g : req.guesses) r.guesses.push_back({0, g.domain, g.active});
    r.exclusions = req.exclusions;
    return cached_search(*inner_, r, ctx);
  }

  std::string describe() const override { return "temporal(" + inner_->describe() + ")"; }

 private:
  SystemSignature sig_;
  MachinePtr inner_;
  int in1_, in2_, out_;
  SystemSignature inner_sig_;
};

}  // namespace detail

// A compiled formula: slot 0 of an event is its truth value.
struct CompiledTl {
  std::shared_ptr<Pipeline> machine;
  int nodes = 0;
  int temporal = 0;
};

// Builds the machine recognizing (M, gamma) with gamma(e) = 1 iff M,e |= f.
// Derived forms are expanded first; co is rejected.
inline CompiledTl compile_tl(const SystemSignature& sig, const TlPtr& formula) {
  TlPtr f = expand_derived(formula);
  if (has_co(*f)) throw Unsupported("unsupported: co requires an external construction");
  CompiledTl out;
  out.machine = std::make_shared<Pipeline>(sig, 1, "tl");
  auto& pl = *out.machine;
  SlotAllocator slots(1);
  std::shared_ptr<Pipeline> since_core;
  std::shared_ptr<Machine> until_core;
  auto rec = [&](auto&& self, const TlPtr& g, int slot) -> void {
    using K = TlFormula::Kind;
    ++out.nodes;
    std::vector<GuessSlot> outs;
    if (slot != 0) outs.push_back({slot, 2, -1});
    int in1 = -1, in2 = -1;
    if (g->left) {
      in1 = slots.take();
      self(self, g->left, in1);
    }
    if (g->right) {
      in2 = slots.take();
      self(self, g->right, in2);
    }
    switch (g->kind) {
      case K::True:
      case K::Not:
      case K::Or:
        pl.add_stage(std::make_shared<detail::TlLocalStage>(sig, g->kind, slot, in1, in2, -1), outs,
                     print_tl(*g), true);
        break;
      case K::Atom: {
        auto a = sig.find_label(g->name);
        if (!a) throw InputError("formula mentions unknown label '" + g->name + "'");
        pl.add_stage(std::make_shared<detail::TlLocalStage>(sig, g->kind, slot, -1, -1, *a), outs,
                     print_tl(*g), true);
        break;
      }
      case K::Proc: {
        auto p = sig.find_process(g->name);
        if (!p) throw InputError("formula mentions unknown process '" + g->name + "'");
        pl.add_stage(std::make_shared<detail::TlLocalStage>(sig, g->kind, slot, -1, -1, *p), outs,
                     print_tl(*g), true);
        break;
      }
      case K::Since:
      case K::Until: {
        ++out.temporal;
        if (!since_core) {
          since_core = compile_since(sig.processes());
          until_core = std::make_shared<MirrorMachine>(since_core);
        }
        MachinePtr inner = g->kind == K::Since ? MachinePtr(since_core) : MachinePtr(until_core);
        pl.add_stage(std::make_shared<detail::TlTemporalStage>(sig, inner, in1, in2, slot), outs,
                     print_tl(*g), true);
        break;
      }
      default:
        throw std::logic_error("derived form survived expansion");
    }
  };
  rec(rec, f, 0);
  return out;
}

struct TranslationCheck {
  bool ok = false;
  bool accepted = false;
  bool budget = false;
  std::vector<EventId> accepted_mutations;  // flipped events that were not rejected
  std::uint64_t nodes = 0;
};

// Accepts (M, truth values) and rejects every single-bit mutation.
inline TranslationCheck check_translation(const CompiledTl& c, const Msc& m, const TlFormula& f,
                                          std::uint64_t budget = 50'000'000) {
  TranslationCheck res;
  auto truth = eval_tl(m, f);
  SearchContext ctx;
  ctx.budget = budget;
  ctx.cache = std::make_shared<StageCache>();
  SlotTable annot(m.size(), 1);
  for (EventId e = 0; e < m.size(); ++e) annot.set(e, 0, truth[e] ? 1 : 0);
  auto o = accepts(*c.machine, m, annot, ctx);
  if (o == Outcome::Budget) {
    res.budget = true;
    res.nodes = ctx.stats.nodes;
    return res;
  }
  res.accepted = o == Outcome::Found;
  for (EventId e = 0; e < m.size(); ++e) {
    SlotTable mut = annot;
    mut.set(e, 0, 1 - annot.get(e, 0));
    auto mo = accepts(*c.machine, m, mut, ctx);
    if (mo == Outcome::Budget) {
      res.budget = true;
      break;
    }
    if (mo == Outcome::Found) res.accepted_mutations.push_back(e);
  }
  res.nodes = ctx.stats.nodes;
  res.ok = res.accepted && !res.budget && res.accepted_mutations.empty();
  return res;
}

// Random formula over the signature; only core constructors, no co.
inline TlPtr random_tl(std::mt19937_64& rng, const SystemSignature& sig, int depth) {
  auto pick = [&](int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng)); };
  if (depth == 0 || pick(4) == 0) {
    if (pick(3) == 0) return tl::proc(sig.process_name(pick(sig.process_count())));
    return tl::atom(sig.label_name(pick(sig.label_count())));
  }
  switch (pick(4)) {
    case 0: return tl::lnot(random_tl(rng, sig, depth - 1));
    case 1: return tl::lor(random_tl(rng, sig, depth - 1), random_tl(rng, sig, depth - 1));
    case 2: return tl::since(random_tl(rng, sig, depth - 1), random_tl(rng, sig, depth - 1));
    default: return tl::until(random_tl(rng, sig, depth - 1), random_tl(rng, sig, depth - 1));
  }
}

}  // namespace cfmg
