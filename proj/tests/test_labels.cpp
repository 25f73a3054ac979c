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

namespace {

void expect_clean(const Tally& t) {
  EXPECT_TRUE(t.ok()) << t.failures << " of " << t.trials << "; " << (t.notes.empty() ? "" : t.notes.front());
}

}  // namespace

TEST(Labels, LastLabel) { expect_clean(label_machine_trials(LabelMachine::Last, 31, 25)); }
TEST(Labels, FirstLabel) { expect_clean(label_machine_trials(LabelMachine::First, 32, 25)); }
TEST(Labels, PairImageLabel) { expect_clean(label_machine_trials(LabelMachine::Fa, 33, 25)); }

TEST(Labels, Fixpoint) {
  Tally t = label_machine_trials(LabelMachine::Fixpoint, 34, 25);
  expect_clean(t);
  EXPECT_GT(t.witnesses, 0);
}

TEST(Labels, Preorder) { expect_clean(label_machine_trials(LabelMachine::Preorder, 35, 15)); }

TEST(Labels, FixpointSearchAgreesWithPlainSearch) {
  std::mt19937_64 rng(36);
  int compared = 0;
  for (int i = 0; i < 30; ++i) {
    auto in = random_path_instance(rng, 3, 4);
    const Msc& m = in.m;
    FixpointMachine mach(m.signature(), in.p, in.q, in.x, in.y, 0);
    SlotTable a(m.size(), 1);
    for (EventId e : m.events_on(in.q)) a.set(e, 0, detail::uniform(rng, 0, 1));
    SearchRequest req;
    req.msc = &m;
    req.annot = &a;
    SearchContext c1, c2;
    auto fast = mach.search(req, c1);
    auto plain = dfs_search(mach, req, c2);
    ASSERT_NE(plain.outcome, Outcome::Budget);
    EXPECT_EQ(fast.outcome, plain.outcome) << describe(m);
    if (fast.outcome == Outcome::Found) {
      EXPECT_TRUE(validate_generic_run(mach, m, a, fast.run));
    }
    ++compared;
  }
  EXPECT_EQ(compared, 30);
}

TEST(Labels, FixpointOnFig3) {
  Msc m = load_fixture("fig3.json");
  const auto& sig = m.signature();
  PathExpr pi = parse_path(sig, "->* msg(p,q) ->*");
  PathExpr pi2 = parse_path(sig, "->* msg(p,r) ->* msg(r,q) ->*");
  FixpointMachine mach(sig, 0, 1, pi, star_then(pi2), 0);
  SlotTable a(m.size(), 1);
  for (EventId e : m.events_on(1)) a.set(e, 0, naive_fa(m, pi, star_then(pi2), e) == e);
  EXPECT_EQ(accepts(mach, m, a), Outcome::Found);
  for (EventId e : m.events_on(1)) {
    SlotTable mut = a;
    mut.set(e, 0, 1 - a.get(e, 0));
    EXPECT_EQ(accepts(mach, m, mut), Outcome::NoRun) << m.id(e);
  }
}

TEST(Labels, IncompatiblePathsAreRejected) {
  auto sig = pqr();
  EXPECT_THROW(FaLabelMachine(sig, 0, 1, parse_path(sig, "msg(r,q)"), parse_path(sig, "msg(p,q)"), 2, kInputLabel, 0),
               InputError);
  EXPECT_THROW(build_preorder_cfm(sig, 0, 1, {plus_path(), plus_path()}), InputError);
}
