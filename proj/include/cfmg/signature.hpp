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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cfmg {

using ProcId = int;
using LabelId = int;

// Malformed user input: bad JSON, unknown ids, syntax errors.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The search ran out of its node budget.
class BudgetError : public std::runtime_error {
 public:
  BudgetError() : std::runtime_error("search budget exhausted") {}
};

// A construct the library deliberately does not handle.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kBottomName = "bot";
inline constexpr std::string_view kTopName = "top";

class SystemSignature {
 public:
  SystemSignature() = default;

  SystemSignature(std::vector<std::string> processes,
                  std::vector<std::string> alphabet)
      : processes_(std::move(processes)), alphabet_(std::move(alphabet)) {
    if (processes_.empty()) throw InputError("signature: no processes");
    if (alphabet_.empty()) throw InputError("signature: empty alphabet");
    check_unique(processes_, "process");
    check_unique(alphabet_, "label");
    for (const auto& a : alphabet_) {
      if (a == kBottomName || a == kTopName)
        throw InputError("signature: label '" + a + "' is reserved");
    }
  }

  const std::vector<std::string>& processes() const { return processes_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int process_count() const { return static_cast<int>(processes_.size()); }
  int label_count() const { return static_cast<int>(alphabet_.size()); }

  const std::string& process_name(ProcId p) const { return processes_.at(p); }
  const std::string& label_name(LabelId a) const { return alphabet_.at(a); }

  std::optional<ProcId> find_process(std::string_view name) const {
    return find(processes_, name);
  }
  std::optional<LabelId> find_label(std::string_view name) const {
    return find(alphabet_, name);
  }

  ProcId process(std::string_view name) const {
    if (auto p = find_process(name)) return *p;
    throw InputError("unknown process '" + std::string(name) + "'");
  }
  LabelId label(std::string_view name) const {
    if (auto a = find_label(name)) return *a;
    throw InputError("unknown label '" + std::string(name) + "'");
  }

  bool operator==(const SystemSignature&) const = default;

 private:
  static std::optional<int> find(const std::vector<std::string>& v,
                                 std::string_view name) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == name) return static_cast<int>(i);
    return std::nullopt;
  }

  static void check_unique(const std::vector<std::string>& v,
                           const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j)
        if (v[i] == v[j])
          throw InputError(std::string("signature: duplicate ") + what +
                           " '" + v[i] + "'");
  }

  std::vector<std::string> processes_;
  std::vector<std::string> alphabet_;
};

}  // namespace cfmg
