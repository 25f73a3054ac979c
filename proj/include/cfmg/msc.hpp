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
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfmg/bits.hpp"
#include "cfmg/signature.hpp"

namespace cfmg {

using EventId = int;

enum class EventKind : std::uint8_t { Local, Send, Recv };

// An event of an MSC, or one of the sentinels below/above every event.
class ExtEvent {
 public:
  enum class Tag : std::uint8_t { Bottom, Event, Top };

  static ExtEvent bottom() { return ExtEvent(Tag::Bottom, -1); }
  static ExtEvent top() { return ExtEvent(Tag::Top, -1); }
  static ExtEvent of(EventId e) { return ExtEvent(Tag::Event, e); }

  Tag tag() const { return tag_; }
  bool is_bottom() const { return tag_ == Tag::Bottom; }
  bool is_top() const { return tag_ == Tag::Top; }
  bool is_event() const { return tag_ == Tag::Event; }
  EventId event() const { return event_; }

  bool operator==(const ExtEvent&) const = default;

 private:
  ExtEvent(Tag t, EventId e) : tag_(t), event_(e) {}
  Tag tag_;
  EventId event_;
};

// Unchecked MSC description as it appears on the wire.
struct RawEvent {
  std::string id;
  std::string proc;
  std::string label;
};

struct RawMsc {
  std::vector<std::string> processes;
  std::vector<std::string> alphabet;
  std::vector<RawEvent> events;
  std::vector<std::pair<std::string, std::string>> messages;
};

struct Violation {
  std::string axiom;
  std::vector<std::string> events;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& v : violations) {
      if (!s.empty()) s += "; ";
      s += v.axiom + ": " + v.detail;
    }
    return s;
  }
};

namespace detail {

// Kahn's algorithm; among ready nodes the smallest (rank, index) goes
// first.  Returns fewer than n entries when the graph has a cycle.
inline std::vector<int> topo_order(
    int n, const std::vector<std::vector<int>>& succ,
    const std::function<int(int)>& rank = nullptr) {
  std::vector<int> indeg(n, 0);
  for (const auto& s : succ)
    for (int v : s) ++indeg[v];
  using Key = std::pair<int, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  auto key = [&](int i) { return Key{rank ? rank(i) : 0, i}; };
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(key(i));
  std::vector<int> out;
  out.reserve(n);
  while (!ready.empty()) {
    int u = ready.top().second;
    ready.pop();
    out.push_back(u);
    for (int v : succ[u])
      if (--indeg[v] == 0) ready.push(key(v));
  }
  return out;
}

}  // namespace detail

inline ValidationReport validate_msc(const RawMsc& raw) {
  ValidationReport rep;
  auto add = [&](std::string axiom, std::vector<std::string> evs,
                 std::string detail) {
    rep.violations.push_back({std::move(axiom), std::move(evs), std::move(detail)});
  };

  try {
    SystemSignature sig(raw.processes, raw.alphabet);
  } catch (const InputError& e) {
    add("signature", {}, e.what());
  }

  auto index_of = [](const std::vector<std::string>& v, const std::string& s) {
    auto it = std::find(v.begin(), v.end(), s);
    return it == v.end() ? -1 : static_cast<int>(it - v.begin());
  };

  const int n = static_cast<int>(raw.events.size());
  std::unordered_map<std::string, int> ids;
  std::vector<int> loc(n, -1);
  for (int i = 0; i < n; ++i) {
    const auto& ev = raw.events[i];
    if (!ids.emplace(ev.id, i).second)
      add("unique-ids", {ev.id}, "duplicate event id '" + ev.id + "'");
    loc[i] = index_of(raw.processes, ev.proc);
    if (loc[i] < 0)
      add("reference", {ev.id}, "unknown process '" + ev.proc + "'");
    if (index_of(raw.alphabet, ev.label) < 0)
      add("reference", {ev.id}, "unknown label '" + ev.label + "'");
  }

  std::vector<int> pos(n, 0);
  {
    std::map<int, int> counter;
    for (int i = 0; i < n; ++i)
      if (loc[i] >= 0) pos[i] = counter[loc[i]]++;
  }

  std::vector<int> used(n, 0);
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [s, r] : raw.messages) {
    auto si = ids.find(s);
    auto ri = ids.find(r);
    if (si == ids.end() || ri == ids.end()) {
      add("reference", {s, r}, "message refers to an unknown event");
      continue;
    }
    int a = si->second, b = ri->second;
    if (a == b) {
      add("message-endpoints", {s}, "event sends to itself");
      continue;
    }
    if (++used[a] == 2)
      add("single-message", {s}, "event '" + s + "' occurs in several messages");
    if (++used[b] == 2)
      add("single-message", {r}, "event '" + r + "' occurs in several messages");
    if (loc[a] >= 0 && loc[a] == loc[b])
      add("message-endpoints", {s, r}, "message between events of one process");
    pairs.emplace_back(a, b);
  }

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      auto [e, f] = pairs[i];
      auto [e2, f2] = pairs[j];
      if (loc[e] < 0 || loc[f] < 0) continue;
      if (loc[e] != loc[e2] || loc[f] != loc[f2]) continue;
      bool send_order = pos[e] <= pos[e2];
      bool recv_order = pos[f] <= pos[f2];
      if (send_order != recv_order)
        add("fifo", {raw.events[e].id, raw.events[f].id, raw.events[e2].id,
                     raw.events[f2].id},
            "messages " + raw.events[e].id + "->" + raw.events[f].id + " and " +
                raw.events[e2].id + "->" + raw.events[f2].id +
                " overtake each other");
    }
  }

  std::vector<std::vector<int>> succ(n);
  {
    std::map<int, int> last;
    for (int i = 0; i < n; ++i) {
      if (loc[i] < 0) continue;
      auto it = last.find(loc[i]);
      if (it != last.end()) succ[it->second].push_back(i);
      last[loc[i]] = i;
    }
  }
  for (auto [a, b] : pairs) succ[a].push_back(b);
  auto order = detail::topo_order(n, succ);
  if (static_cast<int>(order.size()) < n) {
    std::vector<char> done(n, 0);
    for (int v : order) done[v] = 1;
    std::vector<std::string> cyc;
    for (int i = 0; i < n; ++i)
      if (!done[i]) cyc.push_back(raw.events[i].id);
    add("acyclicity", cyc, "process and message edges form a cycle");
  }
  return rep;
}

class Msc {
 public:
  Msc() = default;

  static Msc from_raw(const RawMsc& raw) {
    auto rep = validate_msc(raw);
    if (!rep.ok()) throw InputError("invalid MSC: " + rep.summary());
    Msc m;
    m.sig_ = SystemSignature(raw.processes, raw.alphabet);
    const int n = static_cast<int>(raw.events.size());
    m.proc_events_.assign(m.sig_.process_count(), {});
    for (int i = 0; i < n; ++i) {
      const auto& ev = raw.events[i];
      m.ids_.push_back(ev.id);
      m.loc_.push_back(m.sig_.process(ev.proc));
      m.label_.push_back(m.sig_.label(ev.label));
      m.proc_events_[m.loc_.back()].push_back(i);
    }
    m.partner_.assign(n, -1);
    m.kind_.assign(n, EventKind::Local);
    for (int i = 0; i < n; ++i) m.id_index_[m.ids_[i]] = i;
    for (const auto& [s, r] : raw.messages) {
      int a = m.id_index_.at(s), b = m.id_index_.at(r);
      m.partner_[a] = b;
      m.partner_[b] = a;
      m.kind_[a] = EventKind::Send;
      m.kind_[b] = EventKind::Recv;
    }
    m.finish();
    return m;
  }

  const SystemSignature& signature() const { return sig_; }
  int size() const { return static_cast<int>(ids_.size()); }

  const std::string& id(EventId e) const { return ids_.at(e); }
  ProcId loc(EventId e) const { return loc_[e]; }
  LabelId label(EventId e) const { return label_[e]; }
  EventKind kind(EventId e) const { return kind_[e]; }
  // Message partner (receiver of a send, sender of a receive), or -1.
  EventId partner(EventId e) const { return partner_[e]; }
  // Process on the other end of the message, or -1 for local events.
  ProcId peer(EventId e) const {
    return partner_[e] < 0 ? -1 : loc_[partner_[e]];
  }

  const std::vector<EventId>& events_on(ProcId p) const { return proc_events_.at(p); }
  int position(EventId e) const { return pos_[e]; }
  EventId prev(EventId e) const {
    int i = pos_[e];
    return i == 0 ? -1 : proc_events_[loc_[e]][i - 1];
  }
  EventId next(EventId e) const {
    const auto& v = proc_events_[loc_[e]];
    int i = pos_[e];
    return i + 1 == static_cast<int>(v.size()) ? -1 : v[i + 1];
  }

  std::optional<EventId> find_event(const std::string& id) const {
    auto it = id_index_.find(id);
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
  }
  EventId event(const std::string& id) const {
    if (auto e = find_event(id)) return *e;
    throw InputError("unknown event '" + id + "'");
  }

  // Causal order e <= f.
  bool leq(EventId e, EventId f) const { return down_.get(f, e); }
  bool less(EventId e, EventId f) const { return e != f && leq(e, f); }
  // Reflexive process order: same process and e at or before f.
  bool proc_leq(EventId e, EventId f) const {
    return loc_[e] == loc_[f] && pos_[e] <= pos_[f];
  }

  // Topological order of the causal order, smallest index first on ties.
  const std::vector<EventId>& linearization() const { return lin_; }
  // Linearization used by run search: receives are taken as soon as they
  // are enabled and processes advance evenly, so guesses carried by
  // messages are checked early.
  const std::vector<EventId>& search_order() const { return search_; }

  // Structure encoding used as a cache key: equal iff same MSC up to ids.
  const std::vector<int>& fingerprint() const { return fingerprint_; }

  RawMsc to_raw() const {
    RawMsc raw;
    raw.processes = sig_.processes();
    raw.alphabet = sig_.alphabet();
    std::vector<EventId> order(size());
    for (int i = 0; i < size(); ++i) order[i] = i;
    if (!index_order_matches_process_order()) order = lin_;
    for (EventId e : order)
      raw.events.push_back({ids_[e], sig_.process_name(loc_[e]),
                            sig_.label_name(label_[e])});
    for (EventId e : order)
      if (kind_[e] == EventKind::Send) raw.messages.emplace_back(ids_[e], ids_[partner_[e]]);
    return raw;
  }

  // Same events and ids, per-process orders and messages reversed.
  Msc mirrored() const {
    Msc m = *this;
    for (auto& v : m.proc_events_) std::reverse(v.begin(), v.end());
    for (auto& k : m.kind_) {
      if (k == EventKind::Send)
        k = EventKind::Recv;
      else if (k == EventKind::Recv)
        k = EventKind::Send;
    }
    m.finish();
    return m;
  }

  // Copy with new labels (same structure).
  Msc relabeled(const std::vector<LabelId>& labels,
                const SystemSignature* sig = nullptr) const {
    Msc m = *this;
    if (sig) m.sig_ = *sig;
    m.label_ = labels;
    m.finish();
    return m;
  }

 private:
  bool index_order_matches_process_order() const {
    for (const auto& v : proc_events_)
      for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i - 1] > v[i]) return false;
    return true;
  }

  void finish() {
    const int n = size();
    pos_.assign(n, 0);
    for (const auto& v : proc_events_)
      for (std::size_t i = 0; i < v.size(); ++i) pos_[v[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> succ(n);
    for (int e = 0; e < n; ++e) {
      if (EventId f = next(e); f >= 0) succ[e].push_back(f);
      if (kind_[e] == EventKind::Send) succ[e].push_back(partner_[e]);
    }
    lin_ = detail::topo_order(n, succ);
    search_ = detail::topo_order(n, succ, [&](int e) { return kind_[e] == EventKind::Recv ? 0 : 1 + pos_[e]; });
    down_ = BitMatrix(n);
    for (EventId f : lin_) {
      down_.set(f, f);
      auto absorb = [&](EventId g) {
        for (int x = 0; x < n; ++x)
          if (down_.get(g, x)) down_.set(f, x);
      };
      if (EventId g = prev(f); g >= 0) absorb(g);
      if (kind_[f] == EventKind::Recv) absorb(partner_[f]);
    }
    fingerprint_.clear();
    fingerprint_.push_back(n);
    fingerprint_.push_back(sig_.process_count());
    for (const auto& v : proc_events_) {
      fingerprint_.push_back(static_cast<int>(v.size()));
      for (EventId e : v) {
        fingerprint_.push_back(e);
        fingerprint_.push_back(label_[e]);
        fingerprint_.push_back(static_cast<int>(kind_[e]));
        fingerprint_.push_back(partner_[e]);
      }
    }
  }

  SystemSignature sig_;
  std::vector<std::string> ids_;
  std::vector<ProcId> loc_;
  std::vector<LabelId> label_;
  std::vector<EventId> partner_;
  std::vector<EventKind> kind_;
  std::vector<std::vector<EventId>> proc_events_;
  std::vector<int> pos_;
  std::vector<EventId> lin_;
  std::vector<EventId> search_;
  std::vector<int> fingerprint_;
  BitMatrix down_;
  std::unordered_map<std::string, EventId> id_index_;
};

// Convenience construction in code and tests.
class MscBuilder {
 public:
  MscBuilder(std::vector<std::string> processes, std::vector<std::string> alphabet) {
    raw_.processes = std::move(processes);
    raw_.alphabet = std::move(alphabet);
  }
  MscBuilder& event(std::string id, std::string proc, std::string label) {
    raw_.events.push_back({std::move(id), std::move(proc), std::move(label)});
    return *this;
  }
  MscBuilder& message(std::string send, std::string recv) {
    raw_.messages.emplace_back(std::move(send), std::move(recv));
    return *this;
  }
  const RawMsc& raw() const { return raw_; }
  Msc build() const { return Msc::from_raw(raw_); }

 private:
  RawMsc raw_;
};

inline bool causal_leq(const Msc& m, ExtEvent e, ExtEvent f) {
  if (e.is_bottom() || f.is_top()) return true;
  if (e.is_top() || f.is_bottom()) return false;
  return m.leq(e.event(), f.event());
}

inline bool causal_less(const Msc& m, ExtEvent e, ExtEvent f) {
  return !(e == f) && causal_leq(m, e, f);
}

inline std::vector<EventId> linearize(const Msc& m) { return m.linearization(); }

inline std::vector<std::pair<EventId, EventId>> concurrent_pairs(const Msc& m) {
  std::vector<std::pair<EventId, EventId>> out;
  for (int e = 0; e < m.size(); ++e)
    for (int f = e + 1; f < m.size(); ++f)
      if (!m.leq(e, f) && !m.leq(f, e)) out.emplace_back(e, f);
  return out;
}

inline Msc mirror_msc(const Msc& m) { return m.mirrored(); }

// Latest p-event strictly below e, or bottom.
inline ExtEvent last_on_process(const Msc& m, ProcId p, EventId e) {
  const auto& evs = m.events_on(p);
  for (auto it = evs.rbegin(); it != evs.rend(); ++it)
    if (m.less(*it, e)) return ExtEvent::of(*it);
  return ExtEvent::bottom();
}

}  // namespace cfmg
