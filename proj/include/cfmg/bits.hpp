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

#include <bit>
#include <cstdint>
#include <vector>

namespace cfmg {

// Square boolean matrix stored row-major in 64-bit words.  Used for the
// causal order and for path relations.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(int n)
      : n_(n), words_((n + 63) / 64), bits_(static_cast<std::size_t>(n) * words_, 0) {}

  static BitMatrix identity(int n) {
    BitMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i);
    return m;
  }

  int size() const { return n_; }

  bool get(int i, int j) const {
    return (row(i)[j >> 6] >> (j & 63)) & 1u;
  }
  void set(int i, int j, bool v = true) {
    auto& w = bits_[static_cast<std::size_t>(i) * words_ + (j >> 6)];
    if (v)
      w |= std::uint64_t{1} << (j & 63);
    else
      w &= ~(std::uint64_t{1} << (j & 63));
  }

  // this ∘ other: (i,k) iff exists j with (i,j) in this and (j,k) in other.
  BitMatrix compose(const BitMatrix& other) const {
    BitMatrix out(n_);
    for (int i = 0; i < n_; ++i) {
      std::uint64_t* dst = out.row(i);
      for (int j = 0; j < n_; ++j) {
        if (!get(i, j)) continue;
        const std::uint64_t* src = other.row(j);
        for (int w = 0; w < words_; ++w) dst[w] |= src[w];
      }
    }
    return out;
  }

  // Keeps only the pairs whose row index satisfies the predicate.
  template <typename Pred>
  BitMatrix filter_rows(Pred keep) const {
    BitMatrix out(*this);
    for (int i = 0; i < n_; ++i)
      if (!keep(i))
        for (int w = 0; w < words_; ++w) out.row(i)[w] = 0;
    return out;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : bits_) c += std::popcount(w);
    return c;
  }

  bool operator==(const BitMatrix&) const = default;

 private:
  std::uint64_t* row(int i) { return bits_.data() + static_cast<std::size_t>(i) * words_; }
  const std::uint64_t* row(int i) const {
    return bits_.data() + static_cast<std::size_t>(i) * words_;
  }

  int n_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace cfmg
