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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cfmg/msc_json.hpp"
#include "cfmg/preorder.hpp"

namespace cfmg {

// ---- Preorder machine ----

struct PreorderCfm {
  std::shared_ptr<Pipeline> machine;
  PreorderLayout layout;

  // Slot of "paths[i] <= paths[j]"; the diagonal is implicit.
  int slot(std::size_t i, std::size_t j) const { return layout.bit.at(i).at(j); }
};

// Recognizes (M, gamma) with gamma(e) the preorder at e, for e on q.  The
// annotation has one bit per ordered pair of distinct paths, row-major.
inline PreorderCfm build_preorder_cfm(const SystemSignature& sig, ProcId p, ProcId q,
                                      const std::vector<PathExpr>& paths) {
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j)
      if (paths[i] == paths[j]) throw InputError("duplicate path expression in preorder set");
  const int visible = static_cast<int>(paths.size() * (paths.size() - (paths.empty() ? 0 : 1)));
  auto pl = std::make_shared<Pipeline>(sig, visible, "preorder");
  SlotAllocator slots(0);
  PreorderCfm out;
  out.layout = add_preorder_stages(*pl, slots, p, q, paths, nullptr, true);
  // The requested pairs are tracked first, so they occupy the first slots.
  int k = 0;
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = 0; j < paths.size(); ++j)
      if (i != j && out.layout.bit[i][j] != k++)
        throw std::logic_error("preorder slot layout mismatch");
  out.machine = pl;
  return out;
}

// Annotation of events of q with their preorders (other events all zero).
inline SlotTable preorder_annotation(const Msc& m, const PreorderCfm& c) {
  const auto& paths = c.layout.paths;
  SlotTable t(m.size(), c.machine->slot_count());
  for (EventId e : m.events_on(c.layout.q)) {
    auto po = preorder_at(m, paths, e);
    for (std::size_t i = 0; i < paths.size(); ++i)
      for (std::size_t j = 0; j < paths.size(); ++j)
        if (i != j) t.set(e, c.slot(i, j), po.leq[i][j] ? 1 : 0);
  }
  return t;
}

// Canonical JSON form of a preorder: sorted list of index pairs [i, j]
// with paths[i] <= paths[j], diagonal included.
inline json preorder_to_json(const EventPreorder& po) {
  json out = json::array();
  for (std::size_t i = 0; i < po.paths.size(); ++i)
    for (std::size_t j = 0; j < po.paths.size(); ++j)
      if (po.leq[i][j]) out.push_back({i, j});
  return out;
}

// ---- Gossip ----

// Gossip annotation: slot p holds the label of last_p(e), or the alphabet
// size for bottom.
inline int gossip_bottom(const SystemSignature& sig) { return sig.label_count(); }

inline SlotTable oracle_gossip_table(const Msc& m) {
  const auto& sig = m.signature();
  SlotTable t(m.size(), sig.process_count());
  for (EventId e = 0; e < m.size(); ++e)
    for (ProcId p = 0; p < sig.process_count(); ++p) {
      ExtEvent g = last_on_process(m, p, e);
      t.set(e, p, g.is_event() ? m.label(g.event()) : gossip_bottom(sig));
    }
  return t;
}

inline json gossip_value_to_json(const SystemSignature& sig, const SlotTable& t, EventId e) {
  json o = json::object();
  for (ProcId p = 0; p < sig.process_count(); ++p) {
    int v = t.get(e, p);
    o[sig.process_name(p)] = v == gossip_bottom(sig) ? std::string(kBottomName) : sig.label_name(v);
  }
  return o;
}

inline ExtendedMsc to_extended_gossip(const Msc& m, const SlotTable& t) {
  ExtendedMsc x{m, {}};
  for (EventId e = 0; e < m.size(); ++e) x.annot.push_back(gossip_value_to_json(m.signature(), t, e));
  return x;
}

inline ExtendedMsc oracle_gossip_annotation(const Msc& m) {
  return to_extended_gossip(m, oracle_gossip_table(m));
}

// Reads a gossip annotation; missing processes are an input error.
inline SlotTable gossip_table_from_extended(const ExtendedMsc& x) {
  const auto& sig = x.base.signature();
  SlotTable t(x.base.size(), sig.process_count());
  for (EventId e = 0; e < x.base.size(); ++e) {
    const json& a = x.annot.at(e);
    if (!a.is_object()) throw InputError("gossip annotation of " + x.base.id(e) + " is not an object");
    for (ProcId p = 0; p < sig.process_count(); ++p) {
      const auto& name = sig.process_name(p);
      if (!a.contains(name) || !a.at(name).is_string())
        throw InputError("gossip annotation of " + x.base.id(e) + " lacks process " + name);
      auto v = a.at(name).get<std::string>();
      t.set(e, p, v == kBottomName ? gossip_bottom(sig) : sig.label(v));
    }
  }
  return t;
}

namespace detail {

// For events of q: some path of the set is maximal in the computed
// preorder and the announced label is the label of its last event.
class GossipLabelStage : public Machine {
 public:
  GossipLabelStage(SystemSignature sig, ProcId q, PreorderLayout layout, int slot_xi)
      : sig_(std::move(sig)), q_(q), layout_(std::move(layout)), slot_xi_(slot_xi) {
    for (const auto& x : layout_.paths) cores_.push_back({x, sig_.label_count()});
    std::set<int> r{slot_xi_};
    for (const auto& row : layout_.bit)
      for (int s : row)
        if (s >= 0) r.insert(s);
    reads_.assign(r.begin(), r.end());
  }

  const SystemSignature& signature() const override { return sig_; }
  int slot_count() const override { return reads_.back() + 1; }
  std::vector<int> read_slots() const override { return reads_; }
  State initial_state(ProcId) const override { return {}; }

  void successors(const EventView& ev, const State& s, const Message* in,
                  std::vector<Step>& out) const override {
    const std::size_t n = cores_.size();
    std::vector<std::vector<Word>> prev, msg;
    if (!s.empty()) prev = split_parts(s, n);
    if (in) msg = split_parts(*in, n);
    Step st;
    std::vector<Word> lastv(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Word> theta(cores_[k].width());
      cores_[k].step(ev, prev.empty() ? nullptr : prev[k].data(), in ? msg[k].data() : nullptr,
                     ev.label, theta.data());
      lastv[k] = theta.back();
      append_part(st.target, theta);
    }
    if (ev.proc == q_) {
      bool ok = false;
      for (std::size_t k = 0; k < n && !ok; ++k) {
        bool maximal = true;
        for (std::size_t j = 0; j < n && maximal; ++j)
          if (j != k && layout_.bit[j][k] >= 0 && ev.slots[layout_.bit[j][k]] != 1) maximal = false;
        ok = maximal && lastv[k] == ev.slots[slot_xi_];
      }
      if (!ok) return;
    }
    if (ev.kind == EventKind::Send) st.msg = st.target;
    out.push_back(std::move(st));
  }
  bool accepting(const std::vector<State>&) const override { return true; }
  std::string describe() const override { return "gossip-label"; }

 private:
  SystemSignature sig_;
  ProcId q_;
  PreorderLayout layout_;
  int slot_xi_;
  std::vector<LastCore> cores_;
  std::vector<int> reads_;
};

}  // namespace detail

// The gossip machine over Sigma x Xi: slot p of an event holds xi(e)(p).
inline std::shared_ptr<Pipeline> build_gossip_cfm(const SystemSignature& sig) {
  const int np = sig.process_count();
  auto pl = std::make_shared<Pipeline>(sig, np, "gossip");
  SlotAllocator slots(np);
  for (ProcId q = 0; q < np; ++q) {
    for (ProcId p = 0; p < np; ++p) {
      if (p == q) {
        pl->add_stage(std::make_shared<LastLabelMachine>(sig, plus_path(), sig.label_count(),
                                                         kInputLabel, p, q),
                      {}, "gossip " + sig.process_name(q) + " self");
        continue;
      }
      auto paths = gossip_paths_between(sig, p, q);
      auto layout = add_preorder_stages(*pl, slots, p, q, paths);
      pl->add_stage(std::make_shared<detail::GossipLabelStage>(sig, q, layout, p), {},
                    "gossip " + sig.process_name(p) + "->" + sig.process_name(q));
    }
  }
  return pl;
}

}  // namespace cfmg
