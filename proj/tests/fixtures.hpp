#pragma once

#include <string>

#include "shrg/json_io.hpp"
#include "shrg/tree.hpp"

namespace fixtures {

inline std::string path(const std::string &name) { return std::string(SHRG_DATA_DIR) + "/fixtures/" + name; }

inline shrg::RuleInventory table1() { return shrg::inventory_from_json(shrg::read_json(path("table1_rules.json"))); }
inline shrg::Derivation fig3() { return shrg::derivation_from_json(shrg::read_json(path("fig3_derivation.json"))); }
inline shrg::SemGraph fig2b() { return shrg::graph_from_json(shrg::read_json(path("fig2b_graph.json"))); }
inline shrg::SynTree fig2a() {
    auto text = shrg::read_text(path("fig2a_tree.txt"));
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
        text.pop_back();
    return shrg::parse_tree(text);
}

} // namespace fixtures
