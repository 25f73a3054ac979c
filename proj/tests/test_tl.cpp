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

TEST(Tl, ParsePrintRoundTrip) {
  auto sig = pqr();
  for (const char* s : {"true", "b", "@p", "!a", "(a | @q)", "(a & b)", "(a U (b S @r))", "co a", "X_p a",
                        "Y_q !b", "O_r a", "(a Up_p b)"}) {
    TlPtr f = parse_tl(s, &sig);
    EXPECT_EQ(print_tl(*f), s);
    EXPECT_EQ(*parse_tl(print_tl(*f), &sig), *f);
  }
  EXPECT_EQ(print_tl(*parse_tl("false")), "!true");
  EXPECT_EQ(print_tl(*parse_tl("a | b & c")), "(a | (b & c))");
  EXPECT_EQ(print_tl(*parse_tl("a U b U c")), "(a U (b U c))");
}

TEST(Tl, ParseErrors) {
  auto sig = pqr();
  for (const char* s : {"", "(a", "a)", "zz", "@z", "X_z a", "U", "a U", "a ^ b"})
    EXPECT_THROW(parse_tl(s, &sig), InputError) << s;
}

TEST(Tl, RandomRoundTrip) {
  std::mt19937_64 rng(51);
  auto sig = pqr();
  for (int i = 0; i < 100; ++i) {
    TlPtr f = random_tl(rng, sig, 4);
    EXPECT_EQ(*parse_tl(print_tl(*f), &sig), *f);
    EXPECT_TRUE(is_core(*f));
    EXPECT_LE(tl_depth(*f), 4);
  }
}

TEST(Tl, ConcurrencyOnAChainIsFalse) {
  MscBuilder b({"p", "q"}, {"a", "b"});
  b.event("x0", "p", "a").event("x1", "p", "a").event("x2", "p", "b");
  b.event("y0", "q", "a").event("y1", "q", "b").event("y2", "q", "b");
  b.message("x0", "y0").message("y1", "x1").message("x2", "y2");
  Msc m = b.build();
  for (bool v : eval_tl(m, *parse_tl("co a"))) EXPECT_FALSE(v);
  for (bool v : eval_tl(m, *parse_tl("co true"))) EXPECT_FALSE(v);
}

TEST(Tl, StrictModalities) {
  MscBuilder b({"p", "q"}, {"a", "b"});
  b.event("x0", "p", "a").event("x1", "p", "b").event("y0", "q", "a");
  b.message("x1", "y0");
  Msc m = b.build();
  auto until = eval_tl(m, *parse_tl("(a U b)"));
  EXPECT_TRUE(until[m.event("x0")]);
  EXPECT_FALSE(until[m.event("x1")]);  // strict: x1 itself does not count
  auto since = eval_tl(m, *parse_tl("(false S b)"));
  EXPECT_TRUE(since[m.event("y0")]);
  EXPECT_FALSE(since[m.event("x0")]);
  EXPECT_TRUE(eval_tl(m, *parse_tl("co a"))[m.event("x0")] == false);
}

TEST(Tl, SugarMatchesDirectSemantics) {
  auto res = tl_sugar_trials(52, 6, 12, 3, 3);
  for (const char* k : {"X", "Y", "U"})
    EXPECT_TRUE(res[k].ok()) << k << ": " << (res[k].notes.empty() ? "" : res[k].notes.front());
}

TEST(Tl, FirstEventExpansionMissesMinimalEvent) {
  // With e the first p-event, O_p a holds at e by definition, but every
  // disjunct of the expansion looks strictly before, beside or after e.
  MscBuilder b({"p"}, {"a"});
  b.event("x0", "p", "a");
  Msc m = b.build();
  TlPtr f = parse_tl("O_p a");
  EXPECT_TRUE(eval_tl(m, *f)[0]);
  EXPECT_FALSE(eval_tl(m, *expand_derived(f))[0]);
}

TEST(Tl, MirrorDuality) {
  Tally t = tl_duality_trials(53, 80);
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
  EXPECT_GT(t.witnesses, 0);
}

TEST(Tl, ExpansionIsCore) {
  auto sig = pqr();
  TlPtr f = parse_tl("(X_p a Up_q (Y_r b & O_p a))", &sig);
  EXPECT_FALSE(is_core(*f));
  EXPECT_TRUE(is_core(*expand_derived(f)));
}

TEST(Tl, CompileRejectsConcurrency) {
  auto sig = pqr();
  EXPECT_THROW(compile_tl(sig, parse_tl("(a | co b)")), Unsupported);
  EXPECT_THROW(compile_tl(sig, parse_tl("zz")), InputError);
}

TEST(Tl, TranslationTwoProcesses) {
  Tally t = tl_translation_trials(54, 5, 6, 2, 3);
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
}

TEST(Tl, TranslationThreeProcesses) {
  Tally t = tl_translation_trials(55, 2, 3, 3, 2);
  EXPECT_TRUE(t.ok()) << (t.notes.empty() ? "" : t.notes.front());
}

TEST(Tl, TranslationOfDerivedForms) {
  SystemSignature sig({"p", "q"}, {"b", "a"});
  std::mt19937_64 rng(56);
  std::vector<Msc> ms;
  for (int i = 0; i < 4; ++i) ms.push_back(random_msc(rng, sig, 3));
  for (const char* s : {"X_p a", "Y_q b", "(a Up_q b)", "(a & !@p)"}) {
    TlPtr f = parse_tl(s, &sig);
    CompiledTl c = compile_tl(sig, f);
    for (const auto& m : ms) EXPECT_TRUE(check_translation(c, m, *f).ok) << s << " on " << describe(m);
  }
}
