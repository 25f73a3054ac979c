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

#include <array>
#include <deque>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cfmg/cfm.hpp"
#include "cfmg/msc.hpp"
#include "cfmg/path.hpp"

namespace cfmg {

struct CorpusSpec {
  std::uint64_t seed = 1;
  int count = 1;
  int max_events = 4;   // per process
  int processes = 3;
  int alphabet = 2;
  bool local_events = true;
};

inline void check_corpus_spec(const CorpusSpec& s) {
  if (s.count < 0 || s.max_events < 1 || s.processes < 1 || s.alphabet < 1)
    throw InputError("corpus: counts must be positive");
}

inline std::vector<std::string> default_process_names(int n) {
  static const char* base[] = {"p", "q", "r", "s", "t", "u"};
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(i < 6 ? base[i] : "p" + std::to_string(i));
  return out;
}

inline std::vector<std::string> default_alphabet(int n) {
  static const char* base[] = {"b", "a", "c", "d", "e", "f"};
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(i < 6 ? base[i] : "l" + std::to_string(i));
  return out;
}

namespace detail {

inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace detail

// One random MSC: each process gets between 1 and max_events events; the
// run interleaves sends, FIFO receives and local steps at random, and
// every send reserves its receive so all messages are delivered.
inline Msc random_msc(std::mt19937_64& rng, const SystemSignature& sig, int max_events,
                      bool local_events = true) {
  const int np = sig.process_count();
  std::vector<int> rem(np);
  for (auto& r : rem) r = detail::uniform(rng, 1, max_events);
  struct Ev {
    ProcId proc;
    int index;
  };
  std::vector<std::deque<Ev>> chan(static_cast<std::size_t>(np) * np);
  std::vector<std::pair<Ev, Ev>> msgs;
  std::vector<int> count(np, 0);
  for (;;) {
    // Enabled actions: (kind, p, q) with kind 0 = local, 1 = send, 2 = receive.
    std::vector<std::array<int, 3>> acts;
    for (ProcId p = 0; p < np; ++p) {
      for (ProcId q = 0; q < np; ++q) {
        if (q == p) continue;
        if (!chan[q * np + p].empty()) acts.push_back({2, q, p});
        if (rem[p] > 0 && rem[q] > 0) acts.push_back({1, p, q});
      }
      if (rem[p] > 0 && (local_events || np == 1)) acts.push_back({0, p, p});
    }
    if (acts.empty()) {
      // Leftover budget of a process with no partner: spend it locally.
      bool any = false;
      for (ProcId p = 0; p < np; ++p)
        if (rem[p] > 0) {
          any = true;
          --rem[p];
          ++count[p];
        }
      if (!any) break;
      continue;
    }
    auto a = acts[detail::uniform(rng, 0, static_cast<int>(acts.size()) - 1)];
    const ProcId p = a[1], q = a[2];
    if (a[0] == 0) {
      --rem[p];
      ++count[p];
    } else if (a[0] == 1) {
      --rem[p];
      --rem[q];
      chan[p * np + q].push_back({p, count[p]++});
    } else {
      Ev s = chan[p * np + q].front();
      chan[p * np + q].pop_front();
      msgs.push_back({s, {q, count[q]++}});
    }
  }
  MscBuilder b(sig.processes(), sig.alphabet());
  auto id = [&](ProcId p, int i) { return sig.process_name(p) + std::to_string(i); };
  for (ProcId p = 0; p < np; ++p)
    for (int i = 0; i < count[p]; ++i)
      b.event(id(p, i), sig.process_name(p), sig.label_name(detail::uniform(rng, 0, sig.label_count() - 1)));
  for (const auto& [s, r] : msgs) b.message(id(s.proc, s.index), id(r.proc, r.index));
  return b.build();
}

inline std::vector<Msc> generate_corpus(const CorpusSpec& spec) {
  check_corpus_spec(spec);
  std::mt19937_64 rng(spec.seed);
  SystemSignature sig(default_process_names(spec.processes), default_alphabet(spec.alphabet));
  std::vector<Msc> out;
  for (int i = 0; i < spec.count; ++i) out.push_back(random_msc(rng, sig, spec.max_events, spec.local_events));
  return out;
}

// All message structures (up to event renaming) with at most max_messages
// messages and max_events events per process, without local events.  Every
// event carries the first label.  Built by exploring FIFO executions.
inline std::vector<Msc> enumerate_msc_shapes(const SystemSignature& sig, int max_messages, int max_events) {
  const int np = sig.process_count();
  struct Msg {
    ProcId from, to;
    int send_pos, recv_pos;
  };
  std::vector<Msc> out;
  std::set<std::vector<int>> seen;
  std::vector<int> count(np, 0);
  std::vector<Msg> done;
  std::vector<std::deque<std::pair<ProcId, int>>> chan(static_cast<std::size_t>(np) * np);
  int sent = 0;
  auto emit = [&]() {
    MscBuilder b(sig.processes(), sig.alphabet());
    auto id = [&](ProcId p, int i) { return sig.process_name(p) + std::to_string(i); };
    for (ProcId p = 0; p < np; ++p)
      for (int i = 0; i < count[p]; ++i) b.event(id(p, i), sig.process_name(p), sig.label_name(0));
    for (const auto& m : done) b.message(id(m.from, m.send_pos), id(m.to, m.recv_pos));
    Msc m = b.build();
    if (seen.insert(m.fingerprint()).second) out.push_back(std::move(m));
  };
  auto rec = [&](auto&& self) -> void {
    bool pending = false;
    for (const auto& c : chan) pending = pending || !c.empty();
    if (!pending) emit();
    for (ProcId p = 0; p < np; ++p)
      for (ProcId q = 0; q < np; ++q) {
        if (p == q) continue;
        auto& c = chan[p * np + q];
        if (!c.empty() && count[q] < max_events) {
          auto s = c.front();
          c.pop_front();
          done.push_back({p, q, s.second, count[q]++});
          self(self);
          --count[q];
          done.pop_back();
          c.push_front(s);
        }
        if (sent < max_messages && count[p] < max_events) {
          c.push_back({p, count[p]++});
          ++sent;
          self(self);
          --sent;
          --count[p];
          c.pop_back();
        }
      }
  };
  rec(rec);
  return out;
}

// Random path expression from p to q with at most max_len symbols (one
// more when a final message is needed to reach q).
inline PathExpr random_path(std::mt19937_64& rng, const SystemSignature& sig, ProcId p, ProcId q, int max_len) {
  const int np = sig.process_count();
  const int len = detail::uniform(rng, 0, max_len);
  PathExpr x;
  ProcId at = p;
  for (int i = 0; i < len; ++i) {
    const bool last_slot = i == len - 1;
    int kind = detail::uniform(rng, 0, 3);
    if (last_slot && at != q) kind = 2;
    if (kind == 2 && np == 1) kind = 0;
    switch (kind) {
      case 0: x.symbols.push_back(PathSymbol::step()); break;
      case 1: x.symbols.push_back(PathSymbol::star()); break;
      case 2: {
        ProcId to = last_slot ? q : detail::uniform(rng, 0, np - 2);
        if (!last_slot && to >= at) ++to;
        if (to == at) {
          x.symbols.push_back(PathSymbol::step());
          break;
        }
        x.symbols.push_back(PathSymbol::msg(at, to));
        at = to;
        break;
      }
      default: x.symbols.push_back(PathSymbol::test(detail::uniform(rng, 0, sig.label_count() - 1)));
    }
  }
  if (at != q) x.symbols.push_back(PathSymbol::msg(at, q));
  return x;
}

// ---- Random CFMs ----

// A random explicit CFM with up to max_states states per process and a
// random subset of transitions; roughly half of the state tuples accept.
inline Cfm random_cfm(std::mt19937_64& rng, const SystemSignature& sig, int max_states, int messages,
                      double density = 0.35) {
  const int np = sig.process_count();
  std::bernoulli_distribution coin(density);
  std::vector<std::string> msgs;
  for (int i = 0; i < messages; ++i) msgs.push_back("m" + std::to_string(i));
  std::vector<ProcessAutomaton> procs(np);
  for (ProcId p = 0; p < np; ++p) {
    auto& a = procs[p];
    const int ns = detail::uniform(rng, 1, max_states);
    for (int s = 0; s < ns; ++s) a.states.push_back("s" + std::to_string(s));
    a.initial = 0;
    for (int s = 0; s < ns; ++s)
      for (LabelId l = 0; l < sig.label_count(); ++l) {
        for (int d = 0; d < ns; ++d) {
          if (coin(rng)) a.transitions.push_back({s, EventKind::Local, l, -1, -1, d});
          for (ProcId q = 0; q < np; ++q) {
            if (q == p) continue;
            for (int m = 0; m < messages; ++m) {
              if (coin(rng)) a.transitions.push_back({s, EventKind::Send, l, m, q, d});
              if (coin(rng)) a.transitions.push_back({s, EventKind::Recv, l, m, q, d});
            }
          }
        }
      }
  }
  std::vector<std::vector<int>> acc{{}};
  for (ProcId p = 0; p < np; ++p) {
    std::vector<std::vector<int>> next;
    for (const auto& t : acc)
      for (int s = 0; s < static_cast<int>(procs[p].states.size()); ++s) {
        next.push_back(t);
        next.back().push_back(s);
      }
    acc = std::move(next);
  }
  std::vector<std::vector<int>> keep;
  std::bernoulli_distribution half(0.5);
  for (auto& t : acc)
    if (half(rng)) keep.push_back(std::move(t));
  return Cfm(sig, msgs, procs, keep);
}

}  // namespace cfmg
