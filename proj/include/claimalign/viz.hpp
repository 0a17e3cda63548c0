#pragma once

#include <string>

#include "claimalign/corpus.hpp"

namespace claimalign {

/// Renders a record's matches as a Graphviz digraph: draft nodes d0..dN on the
/// left, final nodes f0..fM on the right, one edge per match labeled with the
/// draft's edit label when labels are present. Unmatched drafts stay
/// unconnected and are drawn dashed. Node tooltips carry the sentence text.
std::string to_dot(const PatentRecord& record);

}  // namespace claimalign
