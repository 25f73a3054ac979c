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

#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cfmg/cfmg.hpp"

namespace cfmg::testing {

inline std::string data_file(const std::string& name) { return std::string(CFMG_DATA_DIR) + "/" + name; }

inline Msc load_fixture(const std::string& name) { return msc_from_json(read_json_file(data_file(name))); }

inline SystemSignature pqr(int labels = 2) { return SystemSignature({"p", "q", "r"}, default_alphabet(labels)); }

// Path semantics by walking the symbols one event at a time; shares no
// code with the relational evaluator.
inline std::set<EventId> naive_targets(const Msc& m, const PathExpr& x, EventId from) {
  std::set<EventId> cur{from};
  for (const auto& s : x.symbols) {
    std::set<EventId> next;
    for (EventId e : cur) {
      switch (s.kind) {
        case PathSymbol::Kind::Step:
          if (m.next(e) >= 0) next.insert(m.next(e));
          break;
        case PathSymbol::Kind::StarStep:
          for (EventId f : m.events_on(m.loc(e)))
            if (m.position(f) >= m.position(e)) next.insert(f);
          break;
        case PathSymbol::Kind::Msg:
          if (m.loc(e) == s.a && m.kind(e) == EventKind::Send && m.peer(e) == s.b) next.insert(m.partner(e));
          break;
        case PathSymbol::Kind::Label:
          if (m.label(e) == s.a) next.insert(e);
          break;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

inline std::set<std::pair<EventId, EventId>> naive_relation(const Msc& m, const PathExpr& x) {
  std::set<std::pair<EventId, EventId>> out;
  for (EventId e = 0; e < m.size(); ++e)
    for (EventId f : naive_targets(m, x, e)) out.insert({e, f});
  return out;
}

// Sources of paths into e: an event id, or -1 for none.  All sources lie
// on one process, so "latest" is the process-order maximum.
inline int naive_last(const Msc& m, const PathExpr& x, EventId e) {
  int best = -1;
  for (EventId g = 0; g < m.size(); ++g)
    if (naive_targets(m, x, g).count(e) && (best < 0 || m.position(g) > m.position(best))) best = g;
  return best;
}

inline int naive_first(const Msc& m, const PathExpr& x, EventId e) {
  int best = -1;
  for (EventId f : naive_targets(m, x, e))
    if (best < 0 || m.position(f) < m.position(best)) best = f;
  return best;
}

// Causal order by explicit search over process and message edges.
inline bool reaches(const Msc& m, EventId e, EventId f) {
  std::vector<EventId> stack{e};
  std::vector<char> seen(m.size(), 0);
  while (!stack.empty()) {
    EventId x = stack.back();
    stack.pop_back();
    if (x == f) return true;
    if (seen[x]) continue;
    seen[x] = 1;
    if (m.next(x) >= 0) stack.push_back(m.next(x));
    if (m.kind(x) == EventKind::Send) stack.push_back(m.partner(x));
  }
  return false;
}

// Latest p-event strictly below e, or -1.
inline int naive_last_on(const Msc& m, ProcId p, EventId e) {
  int best = -1;
  for (EventId g : m.events_on(p))
    if (g != e && reaches(m, g, e)) best = g;
  return best;
}

inline int ext_code(ExtEvent x) { return x.is_event() ? x.event() : -1; }

// Small random MSC over p, q, r.
inline Msc small_msc(std::mt19937_64& rng, int max_events = 4, int labels = 2) {
  return random_msc(rng, pqr(labels), max_events);
}

}  // namespace cfmg::testing
