#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "sweep/tape.hpp"

namespace sweep {

/// Graphviz description of the subgraph reachable from `output`: one node
/// line per reachable tape node in ascending id order, then one edge line per
/// parent edge, directed parent -> child. The format is stable and golden
/// tested.
template <typename T>
std::string export_dot(const BasicTape<T>& tape, const BasicVar<T>& output) {
  if (!output.attached() || output.tape() != &tape) throw TapeMismatchError();

  std::vector<bool> reachable(tape.size(), false);
  reachable[output.id()] = true;
  for (NodeId id = output.id();; --id) {
    if (reachable[id]) {
      const Node<T>& n = tape.node(id);
      for (int p = 0; p < n.n_parents; ++p) reachable[n.parents[p]] = true;
    }
    if (id == 0) break;
  }

  std::ostringstream out;
  out << "digraph tape {\n";
  for (NodeId id = 0; id <= output.id(); ++id) {
    if (!reachable[id]) continue;
    out << "  v" << id << " [label=\"v" << id << ": " << op_name(tape.node(id).op) << "\"];\n";
  }
  for (NodeId id = 0; id <= output.id(); ++id) {
    if (!reachable[id]) continue;
    const Node<T>& n = tape.node(id);
    for (int p = 0; p < n.n_parents; ++p)
      out << "  v" << n.parents[p] << " -> v" << id << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace sweep
