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

#include <sstream>
#include <string>

#include "cfmg/msc_json.hpp"

namespace cfmg {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline std::string render_dot(const Msc& m, const std::vector<json>* annot) {
  const auto& sig = m.signature();
  std::ostringstream os;
  os << "digraph msc {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (ProcId p = 0; p < sig.process_count(); ++p) {
    os << "  subgraph proc_" << p << " {\n    rank=same;\n";
    os << "    " << dot_quote("proc:" + sig.process_name(p)) << " [shape=plaintext, label="
       << dot_quote(sig.process_name(p)) << "];\n";
    for (EventId e : m.events_on(p)) {
      std::string label = m.id(e) + "\n" + sig.label_name(m.label(e));
      if (annot && !annot->at(e).is_null()) label += "\n" + annot->at(e).dump();
      os << "    " << dot_quote(m.id(e)) << " [label=" << dot_quote(label) << "];\n";
    }
    os << "  }\n";
  }
  for (ProcId p = 0; p < sig.process_count(); ++p) {
    std::string prev = "proc:" + sig.process_name(p);
    for (EventId e : m.events_on(p)) {
      os << "  " << dot_quote(prev) << " -> " << dot_quote(m.id(e)) << " [style=bold, arrowhead=none];\n";
      prev = m.id(e);
    }
  }
  for (EventId e = 0; e < m.size(); ++e)
    if (m.kind(e) == EventKind::Send)
      os << "  " << dot_quote(m.id(e)) << " -> " << dot_quote(m.id(m.partner(e)))
         << " [style=dashed, constraint=false];\n";
  os << "}\n";
  return os.str();
}

}  // namespace detail

// Graphviz rendering: one rank per process, bold process lines, dashed
// message arrows.
inline std::string export_dot(const Msc& m) { return detail::render_dot(m, nullptr); }

// Same, with each event's annotation appended to its node label.
inline std::string export_dot(const ExtendedMsc& x) { return detail::render_dot(x.base, &x.annot); }

}  // namespace cfmg
