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

TEST(Impossibility, FullCheckList) {
  Tally t = impossibility_checks(load_fixture("fig2.json"), cfm_from_json(read_json_file(data_file("fig1.json"))));
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
}

TEST(Impossibility, FamilyLabelsFollowTheOracle) {
  for (int n = 1; n <= 6; ++n)
    for (int k = 0; k < n; ++k) {
      Msc m = build_family_msc({n, k});
      EXPECT_EQ(m.size(), 6 * n);
      EXPECT_TRUE(naive_gossip_violations(m).empty()) << n << "," << k;
    }
}

TEST(Impossibility, FamilyParameterChecks) {
  EXPECT_THROW(build_family_msc({0, 0}), InputError);
  EXPECT_THROW(build_family_msc({3, 3}), InputError);
  EXPECT_THROW(build_family_msc({3, -1}), InputError);
}

TEST(Impossibility, NaiveMachineFailsOnFig2) {
  Msc m = load_fixture("fig2.json");
  Cfm naive = naive_gossip_cfm();
  EXPECT_EQ(accepts(naive, m), Outcome::Found);
  const ProcId p = m.signature().process("p"), q = m.signature().process("q");
  std::vector<std::string> ids;
  for (EventId f : gossip_violations(m, p, q)) ids.push_back(m.id(f));
  EXPECT_EQ(ids, (std::vector<std::string>{"f2", "f5"}));
}

TEST(Impossibility, RefutationsAreVerified) {
  for (const auto& cl : demo_claimants()) {
    Refutation r = refute_deterministic(cl.machine);
    ASSERT_EQ(r.verdict, RefutationVerdict::Counterexample) << cl.name;
    ASSERT_TRUE(r.msc);
    EXPECT_TRUE(r.accepted) << cl.name;
    EXPECT_FALSE(r.violations.empty()) << cl.name;
    json j = refutation_to_json(r);
    EXPECT_EQ(j["verdict"], "counterexample");
    EXPECT_EQ(msc_from_json(j["msc"]).fingerprint(), r.msc->fingerprint());
  }
}

TEST(Impossibility, NonDeterministicMachinesAreNotRefuted) {
  Cfm u = universal_cfm(demo_signature());
  SystemSignature sig = demo_signature();
  auto procs = u.automata();
  procs[0].states.push_back("t");
  procs[0].transitions.push_back({0, EventKind::Local, 0, -1, -1, 1});
  Cfm nd(sig, u.messages(), procs, {{0, 0, 0}});
  EXPECT_FALSE(is_deterministic(nd));
  EXPECT_EQ(refute_deterministic(nd).verdict, RefutationVerdict::NotDeterministic);
}
