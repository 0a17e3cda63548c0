#include "claimalign/viz.hpp"

#include <sstream>

namespace claimalign {
namespace {

std::string quoted(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string to_dot(const PatentRecord& record) {
  std::vector<bool> connected(record.draft.size(), false);
  if (record.edges) {
    for (const auto& e : *record.edges) connected[e.draft_index] = true;
  }

  std::ostringstream out;
  out << "digraph " << quoted(record.id) << " {\n"
      << "  rankdir=LR;\n"
      << "  node [shape=box];\n"
      << "  subgraph cluster_draft {\n"
      << "    label=\"draft\";\n";
  for (std::size_t i = 0; i < record.draft.size(); ++i) {
    out << "    d" << i << " [label=\"d" << i << "\", tooltip=" << quoted(record.draft[i]);
    if (!connected[i]) out << ", style=dashed";
    out << "];\n";
  }
  out << "  }\n"
      << "  subgraph cluster_final {\n"
      << "    label=\"final\";\n";
  for (std::size_t j = 0; j < record.final.size(); ++j) {
    out << "    f" << j << " [label=\"f" << j << "\", tooltip=" << quoted(record.final[j]) << "];\n";
  }
  out << "  }\n";
  if (record.edges) {
    for (const auto& e : *record.edges) {
      out << "  d" << e.draft_index << " -> f" << e.final_index;
      if (record.labels) {
        out << " [label=\"" << label_code((*record.labels)[e.draft_index]) << "\"]";
      }
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace claimalign
