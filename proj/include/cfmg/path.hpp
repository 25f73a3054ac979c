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
#include <compare>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cfmg/msc.hpp"

namespace cfmg {

struct PathSymbol {
  enum class Kind : std::uint8_t { Step, StarStep, Msg, Label };
  Kind kind = Kind::Step;
  int a = -1;  // sender process for Msg, letter for Label
  int b = -1;  // receiver process for Msg

  static PathSymbol step() { return {Kind::Step}; }
  static PathSymbol star() { return {Kind::StarStep}; }
  static PathSymbol msg(ProcId p, ProcId q) { return {Kind::Msg, p, q}; }
  static PathSymbol test(LabelId x) { return {Kind::Label, x}; }

  auto operator<=>(const PathSymbol&) const = default;
};

struct PathExpr {
  std::vector<PathSymbol> symbols;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  auto operator<=>(const PathExpr&) const = default;

  PathExpr prefix(std::size_t n) const {
    return {{symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(n)}};
  }
  PathExpr suffix_from(std::size_t i) const {
    return {{symbols.begin() + static_cast<std::ptrdiff_t>(i), symbols.end()}};
  }
};

inline PathExpr concat(const PathExpr& x, const PathExpr& y) {
  PathExpr out = x;
  out.symbols.insert(out.symbols.end(), y.symbols.begin(), y.symbols.end());
  return out;
}

// Collapses runs of ->* into one, the only rewriting the theory allows.
inline PathExpr normalize(const PathExpr& x) {
  PathExpr out;
  for (const auto& s : x.symbols) {
    if (s.kind == PathSymbol::Kind::StarStep && !out.symbols.empty() &&
        out.symbols.back().kind == PathSymbol::Kind::StarStep)
      continue;
    out.symbols.push_back(s);
  }
  return out;
}

inline PathExpr star_path() { return {{PathSymbol::star()}}; }
inline PathExpr plus_path() { return {{PathSymbol::step(), PathSymbol::star()}}; }

inline std::string print_path(const SystemSignature& sig, const PathExpr& x) {
  if (x.empty()) return "eps";
  std::string out;
  for (const auto& s : x.symbols) {
    if (!out.empty()) out += ' ';
    switch (s.kind) {
      case PathSymbol::Kind::Step: out += "->"; break;
      case PathSymbol::Kind::StarStep: out += "->*"; break;
      case PathSymbol::Kind::Msg:
        out += "msg(" + sig.process_name(s.a) + "," + sig.process_name(s.b) + ")";
        break;
      case PathSymbol::Kind::Label: out += "[" + sig.label_name(s.a) + "]"; break;
    }
  }
  return out;
}

inline PathExpr parse_path(const SystemSignature& sig, const std::string& text) {
  PathExpr out;
  std::size_t i = 0;
  auto fail = [&](const std::string& why) -> void {
    throw InputError("path syntax error at position " + std::to_string(i) + ": " + why);
  };
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto ident = [&] {
    skip_ws();
    std::size_t start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
      ++i;
    if (start == i) fail("expected a name");
    return text.substr(start, i - start);
  };
  auto expect = [&](char c) {
    skip_ws();
    if (i >= text.size() || text[i] != c) fail(std::string("expected '") + c + "'");
    ++i;
  };
  bool saw_eps = false;
  for (;;) {
    skip_ws();
    if (i >= text.size()) break;
    if (text.compare(i, 3, "->*") == 0) {
      out.symbols.push_back(PathSymbol::star());
      i += 3;
    } else if (text.compare(i, 3, "->+") == 0) {
      out.symbols.push_back(PathSymbol::step());
      out.symbols.push_back(PathSymbol::star());
      i += 3;
    } else if (text.compare(i, 2, "->") == 0) {
      out.symbols.push_back(PathSymbol::step());
      i += 2;
    } else if (text[i] == '[') {
      ++i;
      std::size_t at = i;
      auto name = ident();
      auto a = sig.find_label(name);
      if (!a) {
        i = at;
        fail("unknown label '" + name + "'");
      }
      expect(']');
      out.symbols.push_back(PathSymbol::test(*a));
    } else if (text.compare(i, 3, "eps") == 0) {
      i += 3;
      saw_eps = true;
    } else if (text.compare(i, 3, "msg") == 0) {
      i += 3;
      expect('(');
      std::size_t at = i;
      auto p = ident();
      expect(',');
      auto q = ident();
      expect(')');
      auto pp = sig.find_process(p), qq = sig.find_process(q);
      if (!pp || !qq) {
        i = at;
        fail("unknown process in msg(" + p + "," + q + ")");
      }
      if (*pp == *qq) {
        i = at;
        fail("msg endpoints must differ");
      }
      out.symbols.push_back(PathSymbol::msg(*pp, *qq));
    } else {
      fail("unexpected character '" + std::string(1, text[i]) + "'");
    }
  }
  if (saw_eps && !out.empty()) throw InputError("path syntax error: 'eps' cannot be combined");
  if (!saw_eps && out.empty()) throw InputError("path syntax error: empty expression (use 'eps')");
  return out;
}

// Process pairs (p,q) such that the expression may lead from p to q.
inline std::set<std::pair<ProcId, ProcId>> comp(const SystemSignature& sig,
                                                const PathExpr& x) {
  std::set<std::pair<ProcId, ProcId>> cur;
  for (ProcId p = 0; p < sig.process_count(); ++p) cur.insert({p, p});
  for (const auto& s : x.symbols) {
    if (s.kind != PathSymbol::Kind::Msg) continue;
    std::set<std::pair<ProcId, ProcId>> next;
    for (auto [r, p] : cur)
      if (p == s.a) next.insert({r, s.b});
    cur = std::move(next);
  }
  return cur;
}

inline bool in_paths(const SystemSignature& sig, const PathExpr& x, ProcId p, ProcId q) {
  return comp(sig, x).count({p, q}) > 0;
}

// The relation denoted by the expression; (e,f) set iff e reaches f.
inline BitMatrix eval_path(const Msc& m, const PathExpr& x) {
  const int n = m.size();
  BitMatrix rel = BitMatrix::identity(n);
  for (const auto& s : x.symbols) {
    BitMatrix base(n);
    for (EventId e = 0; e < n; ++e) {
      switch (s.kind) {
        case PathSymbol::Kind::Step:
          if (EventId f = m.next(e); f >= 0) base.set(e, f);
          break;
        case PathSymbol::Kind::StarStep:
          for (EventId f : m.events_on(m.loc(e)))
            if (m.position(f) >= m.position(e)) base.set(e, f);
          break;
        case PathSymbol::Kind::Msg:
          if (m.kind(e) == EventKind::Send && m.loc(e) == s.a && m.peer(e) == s.b)
            base.set(e, m.partner(e));
          break;
        case PathSymbol::Kind::Label:
          if (m.label(e) == s.a) base.set(e, e);
          break;
      }
    }
    rel = rel.compose(base);
  }
  return rel;
}

namespace detail {

inline ExtEvent extremal(const Msc& m, const std::vector<EventId>& cands, bool want_max) {
  if (cands.empty()) return want_max ? ExtEvent::bottom() : ExtEvent::top();
  ProcId p = m.loc(cands.front());
  EventId best = cands.front();
  for (EventId c : cands) {
    if (m.loc(c) != p)
      throw std::logic_error("path candidates span several processes");
    if (want_max ? m.position(c) > m.position(best) : m.position(c) < m.position(best))
      best = c;
  }
  return ExtEvent::of(best);
}

}  // namespace detail

inline ExtEvent last_of(const Msc& m, const BitMatrix& rel, EventId e) {
  std::vector<EventId> c;
  for (EventId f = 0; f < m.size(); ++f)
    if (rel.get(f, e)) c.push_back(f);
  return detail::extremal(m, c, true);
}

inline ExtEvent first_of(const Msc& m, const BitMatrix& rel, EventId e) {
  std::vector<EventId> c;
  for (EventId f = 0; f < m.size(); ++f)
    if (rel.get(e, f)) c.push_back(f);
  return detail::extremal(m, c, false);
}

inline ExtEvent last(const Msc& m, const PathExpr& x, EventId e) {
  return last_of(m, eval_path(m, x), e);
}

inline ExtEvent first(const Msc& m, const PathExpr& x, EventId e) {
  return first_of(m, eval_path(m, x), e);
}

// Source process p such that both expressions lie in Paths_{p,q} with q the
// process of e; throws when there is none.
inline ProcId common_source(const Msc& m, const std::vector<PathExpr>& xs, EventId e) {
  const auto& sig = m.signature();
  ProcId q = m.loc(e);
  ProcId src = -1;
  for (ProcId p = 0; p < sig.process_count(); ++p) {
    bool all = true;
    for (const auto& x : xs) all = all && in_paths(sig, x, p, q);
    if (all) {
      if (src >= 0)
        throw InputError("ambiguous source process for the given path expressions");
      src = p;
    }
  }
  if (src < 0) throw InputError("path expressions do not share a compatible process pair");
  return src;
}

inline ExtEvent f_pair(const Msc& m, const PathExpr& x, const PathExpr& y, EventId e) {
  common_source(m, {x, y}, e);
  ExtEvent g = last(m, x, e);
  if (!g.is_event()) return ExtEvent::bottom();
  return first(m, y, g.event());
}

struct EventPreorder {
  EventId at = -1;
  std::vector<PathExpr> paths;
  std::vector<std::vector<bool>> leq;  // leq[i][j]: paths[i] below-or-equal paths[j]

  bool strictly_below(std::size_t i, std::size_t j) const { return !leq[j][i]; }
  bool operator==(const EventPreorder&) const = default;
};

inline EventPreorder preorder_at(const Msc& m, const std::vector<PathExpr>& paths, EventId e) {
  if (paths.size() > 1) common_source(m, paths, e);
  EventPreorder out;
  out.at = e;
  out.paths = paths;
  std::vector<ExtEvent> lasts;
  for (const auto& x : paths) lasts.push_back(last(m, x, e));
  out.leq.assign(paths.size(), std::vector<bool>(paths.size(), false));
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = 0; j < paths.size(); ++j)
      out.leq[i][j] = causal_leq(m, lasts[i], lasts[j]);
  return out;
}

// The expression ->* msg(p1,p2) ->* ... ->* for a sequence of distinct
// processes, and ->+ for a one-process sequence.
inline PathExpr gossip_path_for(const std::vector<ProcId>& seq) {
  if (seq.size() == 1) return plus_path();
  PathExpr x{{PathSymbol::star()}};
  for (std::size_t i = 1; i < seq.size(); ++i) {
    x.symbols.push_back(PathSymbol::msg(seq[i - 1], seq[i]));
    x.symbols.push_back(PathSymbol::star());
  }
  return x;
}

namespace detail {

// Visits all sequences of distinct processes in lexicographic order.
template <typename F>
void for_each_distinct_sequence(int nproc, F&& visit) {
  std::vector<ProcId> seq;
  std::vector<bool> used(nproc, false);
  auto rec = [&](auto&& self) -> void {
    visit(seq);
    for (ProcId p = 0; p < nproc; ++p) {
      if (used[p]) continue;
      used[p] = true;
      seq.push_back(p);
      self(self);
      seq.pop_back();
      used[p] = false;
    }
  };
  for (ProcId p = 0; p < nproc; ++p) {
    used[p] = true;
    seq.push_back(p);
    rec(rec);
    seq.pop_back();
    used[p] = false;
  }
}

}  // namespace detail

inline std::vector<PathExpr> gossip_paths(const SystemSignature& sig) {
  std::vector<PathExpr> out;
  bool have_plus = false;
  detail::for_each_distinct_sequence(sig.process_count(), [&](const std::vector<ProcId>& seq) {
    if (seq.size() == 1) {
      if (have_plus) return;
      have_plus = true;
    }
    out.push_back(gossip_path_for(seq));
  });
  return out;
}

inline std::vector<PathExpr> gossip_paths_between(const SystemSignature& sig, ProcId p,
                                                  ProcId q) {
  if (p == q) return {plus_path()};
  std::vector<PathExpr> out;
  detail::for_each_distinct_sequence(sig.process_count(), [&](const std::vector<ProcId>& seq) {
    if (seq.size() >= 2 && seq.front() == p && seq.back() == q)
      out.push_back(gossip_path_for(seq));
  });
  return out;
}

inline std::size_t path_size(const std::vector<PathExpr>& xs) {
  std::size_t n = 0;
  for (const auto& x : xs) n += x.size();
  return n;
}

}  // namespace cfmg
