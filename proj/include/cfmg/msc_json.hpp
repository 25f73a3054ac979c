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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfmg/msc.hpp"

namespace cfmg {

using json = nlohmann::json;

// An MSC whose events carry one free-form annotation value each.
struct ExtendedMsc {
  Msc base;
  std::vector<json> annot;
};

namespace detail {

inline std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw InputError(std::string("missing array '") + key + "'");
  std::vector<std::string> out;
  for (const auto& x : j.at(key)) {
    if (!x.is_string()) throw InputError(std::string("non-string entry in '") + key + "'");
    out.push_back(x.get<std::string>());
  }
  return out;
}

inline std::string string_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string())
    throw InputError(std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

}  // namespace detail

inline RawMsc raw_msc_from_json(const json& j) {
  if (!j.is_object()) throw InputError("MSC document must be an object");
  RawMsc raw;
  raw.processes = detail::string_list(j, "processes");
  raw.alphabet = detail::string_list(j, "alphabet");
  if (!j.contains("events") || !j.at("events").is_array())
    throw InputError("missing array 'events'");
  for (const auto& ev : j.at("events"))
    raw.events.push_back({detail::string_field(ev, "id"), detail::string_field(ev, "proc"),
                          detail::string_field(ev, "label")});
  if (j.contains("messages")) {
    for (const auto& m : j.at("messages")) {
      if (!m.is_array() || m.size() != 2 || !m[0].is_string() || !m[1].is_string())
        throw InputError("message entries must be [sendId, recvId]");
      raw.messages.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
    }
  }
  return raw;
}

inline json raw_msc_to_json(const RawMsc& raw) {
  json j;
  j["processes"] = raw.processes;
  j["alphabet"] = raw.alphabet;
  j["events"] = json::array();
  for (const auto& ev : raw.events)
    j["events"].push_back({{"id", ev.id}, {"proc", ev.proc}, {"label", ev.label}});
  j["messages"] = json::array();
  for (const auto& [s, r] : raw.messages) j["messages"].push_back({s, r});
  return j;
}

inline Msc msc_from_json(const json& j) { return Msc::from_raw(raw_msc_from_json(j)); }
inline json msc_to_json(const Msc& m) { return raw_msc_to_json(m.to_raw()); }

inline ExtendedMsc extended_from_json(const json& j) {
  ExtendedMsc x{msc_from_json(j), {}};
  x.annot.assign(x.base.size(), json());
  for (const auto& ev : j.at("events")) {
    EventId e = x.base.event(ev.at("id").get<std::string>());
    if (ev.contains("annot")) x.annot[e] = ev.at("annot");
  }
  return x;
}

inline json extended_to_json(const ExtendedMsc& x) {
  json j = msc_to_json(x.base);
  for (auto& ev : j["events"]) {
    EventId e = x.base.event(ev["id"].get<std::string>());
    ev["annot"] = x.annot.at(e);
  }
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace cfmg
