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

#include <algorithm>
#include <regex>

#include "properties.hpp"

using namespace cfmg;
using namespace cfmg::testing;

namespace {

std::size_t count_matches(const std::string& s, const std::string& re) {
  std::regex r(re);
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(s.begin(), s.end(), r), std::sregex_iterator()));
}

}  // namespace

TEST(Corpus, DeterministicPerSeed) {
  CorpusSpec spec;
  spec.seed = 9;
  spec.count = 12;
  auto a = generate_corpus(spec);
  auto b = generate_corpus(spec);
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(msc_to_json(a[i]), msc_to_json(b[i]));
  spec.seed = 10;
  auto c = generate_corpus(spec);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || msc_to_json(a[i]) != msc_to_json(c[i]);
  EXPECT_TRUE(differs);
}

TEST(Corpus, EdgeCases) {
  CorpusSpec spec;
  spec.count = 0;
  EXPECT_TRUE(generate_corpus(spec).empty());
  spec.count = 1;
  spec.processes = 1;
  spec.max_events = 3;
  Msc m = generate_corpus(spec).at(0);
  for (EventId e = 0; e < m.size(); ++e) EXPECT_EQ(m.kind(e), EventKind::Local);
  for (EventId e = 0; e + 1 < m.size(); ++e) EXPECT_TRUE(m.less(e, e + 1));
  spec.processes = 0;
  EXPECT_THROW(generate_corpus(spec), InputError);
}

TEST(Corpus, OutputsAreValid) {
  CorpusSpec spec;
  spec.count = 40;
  spec.max_events = 6;
  spec.local_events = false;
  for (const Msc& m : generate_corpus(spec)) {
    EXPECT_TRUE(validate_msc(m.to_raw()).ok());
    for (ProcId p = 0; p < 3; ++p) {
      EXPECT_GE(m.events_on(p).size(), 1u);
      EXPECT_LE(m.events_on(p).size(), 6u);
    }
  }
}

TEST(Corpus, ShapeEnumeration) {
  SystemSignature sig({"p", "q"}, {"a"});
  // Up to one message: empty, p->q, q->p.
  EXPECT_EQ(enumerate_msc_shapes(sig, 1, 1).size(), 3u);
  auto shapes = enumerate_msc_shapes(pqr(2), 3, 4);
  EXPECT_GE(shapes.size(), 250u);
  std::set<std::vector<int>> prints;
  for (const Msc& m : shapes) {
    EXPECT_TRUE(prints.insert(m.fingerprint()).second);
    for (ProcId p = 0; p < 3; ++p) EXPECT_LE(m.events_on(p).size(), 4u);
  }
  EXPECT_GE(gossip_structured_corpus().size(), 500u);
}

TEST(Dot, Fig2Rendering) {
  Msc m = load_fixture("fig2.json");
  std::string dot = export_dot(m);
  EXPECT_EQ(dot.rfind("digraph msc {", 0), 0u);
  EXPECT_EQ(count_matches(dot, R"(style=dashed)"), 12u);
  EXPECT_EQ(count_matches(dot, R"(\[label="[efg][0-9])"), 24u);
  EXPECT_EQ(count_matches(dot, R"(subgraph proc_)"), 3u);
}

TEST(Dot, SingleEventAndAnnotations) {
  MscBuilder b({"p"}, {"a"});
  b.event("only", "p", "a");
  Msc m = b.build();
  std::string dot = export_dot(m);
  EXPECT_EQ(count_matches(dot, R"(\[label="only)"), 1u);
  EXPECT_EQ(count_matches(dot, R"(style=dashed)"), 0u);
  ExtendedMsc x{m, {json{{"p", "bot"}}}};
  EXPECT_NE(export_dot(x).find(R"({\"p\":\"bot\"})"), std::string::npos);
}

TEST(Dot, QuotesIdentifiers) {
  MscBuilder b({"p"}, {"a"});
  b.event("we\"ird", "p", "a");
  std::string dot = export_dot(b.build());
  EXPECT_NE(dot.find(R"("we\"ird")"), std::string::npos);
}
