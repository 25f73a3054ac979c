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

#include <gtest/gtest.h>

#include "properties.hpp"

using namespace cfmg;
using namespace cfmg::testing;

TEST(Path, ParsePrintRoundTrip) {
  auto sig = pqr();
  for (const char* s : {"eps", "->", "->*", "msg(p,q)", "[b] -> [a] msg(q,r) ->*", "->* msg(p,r) ->* msg(r,q) ->*"}) {
    PathExpr x = parse_path(sig, s);
    EXPECT_EQ(print_path(sig, x), s);
    EXPECT_EQ(parse_path(sig, print_path(sig, x)), x);
  }
  EXPECT_EQ(parse_path(sig, "->+"), plus_path());
  EXPECT_TRUE(parse_path(sig, "eps").empty());
}

TEST(Path, ParseErrors) {
  auto sig = pqr();
  for (const char* s : {"", "msg(p,p)", "msg(p,z)", "[zz]", "eps ->", "msg(p q)", "=>"})
    EXPECT_THROW(parse_path(sig, s), InputError) << s;
}

TEST(Path, RandomRoundTrip) {
  std::mt19937_64 rng(3);
  auto sig = pqr();
  for (int i = 0; i < 200; ++i) {
    PathExpr x = random_path(rng, sig, i % 3, (i / 3) % 3, 6);
    if (x.empty()) continue;
    EXPECT_EQ(parse_path(sig, print_path(sig, x)), x);
  }
}

TEST(Path, WorkedExamplesFig2) {
  Tally t = check_fig2(load_fixture("fig2.json"));
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
}

TEST(Path, CompOfNonsenseIsEmpty) {
  auto sig = pqr();
  EXPECT_TRUE(comp(sig, parse_path(sig, "msg(p,q) msg(r,p)")).empty());
  EXPECT_EQ(comp(sig, parse_path(sig, "->*")).size(), 3u);
}

TEST(Path, EvaluatorMatchesWalk) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 150; ++i) {
    Msc m = small_msc(rng, 4);
    PathExpr x = random_path(rng, m.signature(), i % 3, (i + 1) % 3, 5);
    auto rel = eval_path(m, x);
    auto want = naive_relation(m, x);
    for (EventId e = 0; e < m.size(); ++e)
      for (EventId f = 0; f < m.size(); ++f) ASSERT_EQ(rel.get(e, f), want.count({e, f}) > 0);
  }
}

TEST(Path, PathsCoverCausalOrder) {
  // e < f iff some sequence of steps and messages leads from e to f.
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) {
    Msc m = small_msc(rng, 4);
    std::set<std::pair<EventId, EventId>> reach;
    for (EventId e = 0; e < m.size(); ++e)
      for (EventId f = 0; f < m.size(); ++f)
        if (e != f && reaches(m, e, f)) reach.insert({e, f});
    // Close ->+ and ->* msg ->* under appending msg(a,b) ->*.
    using Rel = std::set<std::pair<EventId, EventId>>;
    auto strict = [](const Rel& r) {
      Rel out;
      for (auto pr : r)
        if (pr.first != pr.second) out.insert(pr);
      return out;
    };
    std::vector<Rel> hops;
    for (ProcId a = 0; a < 3; ++a)
      for (ProcId b = 0; b < 3; ++b)
        if (a != b) hops.push_back(naive_relation(m, {{PathSymbol::msg(a, b), PathSymbol::star()}}));
    Rel covered = strict(naive_relation(m, plus_path()));
    for (ProcId a = 0; a < 3; ++a)
      for (ProcId b = 0; b < 3; ++b)
        if (a != b) {
          Rel r = naive_relation(m, {{PathSymbol::star(), PathSymbol::msg(a, b), PathSymbol::star()}});
          covered.insert(r.begin(), r.end());
        }
    for (bool grew = true; grew;) {
      grew = false;
      Rel add;
      for (auto [e, f] : covered)
        for (const auto& h : hops)
          for (auto [g, k] : h)
            if (g == f) add.insert({e, k});
      for (auto pr : add) grew = covered.insert(pr).second || grew;
    }
    EXPECT_EQ(covered, reach);
  }
}

TEST(Path, DoubleStarCollapses) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    Msc m = small_msc(rng, 4);
    PathExpr x = random_path(rng, m.signature(), 0, 1, 4);
    PathExpr once = concat(x, star_path());
    PathExpr twice = concat(once, star_path());
    EXPECT_EQ(naive_relation(m, once), naive_relation(m, twice));
    EXPECT_EQ(normalize(twice), normalize(once));
  }
}

TEST(Path, MonotonicityOfLastAndFirst) {
  Tally t = monotonicity_trials(101, 150);
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
  EXPECT_GT(t.witnesses, 0);
}

TEST(Path, MonotonicityOfPairImages) {
  Tally t = pair_monotonicity_trials(102, 150);
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
  EXPECT_GT(t.witnesses, 0);
}

TEST(Path, PreorderCharacterization) {
  long cases[3] = {0, 0, 0};
  Tally t = pair_characterization_trials(103, 300, cases);
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
  for (long c : cases) EXPECT_GT(c, 0);
}

TEST(Path, PreorderIsTotalAndTransitive) {
  std::mt19937_64 rng(7);
  auto sig = pqr();
  const auto paths = gossip_paths_between(sig, 0, 1);
  for (int i = 0; i < 40; ++i) {
    Msc m = small_msc(rng, 5);
    for (EventId e : m.events_on(1)) {
      auto po = preorder_at(m, paths, e);
      const std::size_t n = paths.size();
      for (std::size_t a = 0; a < n; ++a) {
        EXPECT_TRUE(po.leq[a][a]);
        for (std::size_t b = 0; b < n; ++b) {
          EXPECT_TRUE(po.leq[a][b] || po.leq[b][a]);
          for (std::size_t c = 0; c < n; ++c)
            EXPECT_TRUE(!(po.leq[a][b] && po.leq[b][c]) || po.leq[a][c]);
        }
      }
    }
  }
}

TEST(Path, PreorderRejectsIncompatiblePaths) {
  Msc m = load_fixture("fig2.json");
  const auto& sig = m.signature();
  EXPECT_THROW(preorder_at(m, {parse_path(sig, "msg(p,q)"), parse_path(sig, "msg(r,q)")}, m.event("f0")),
               InputError);
}

TEST(Path, GossipPathSets) {
  auto sig = pqr();
  auto pq = gossip_paths_between(sig, 0, 1);
  ASSERT_EQ(pq.size(), 2u);
  EXPECT_EQ(print_path(sig, pq[0]), "->* msg(p,q) ->*");
  EXPECT_EQ(print_path(sig, pq[1]), "->* msg(p,r) ->* msg(r,q) ->*");
  EXPECT_EQ(gossip_paths_between(sig, 2, 2), std::vector<PathExpr>{plus_path()});
  // One ->+ plus all sequences of 2 or 3 distinct processes.
  auto all = gossip_paths(sig);
  EXPECT_EQ(all.size(), 1u + 6u + 6u);
  EXPECT_EQ(path_size(all), 2u + 6u * 3u + 6u * 5u);
}
