#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "shrg/engine.hpp"
#include "shrg/graph.hpp"
#include "shrg/rules.hpp"

namespace shrg {

// Key order is part of the file format, hence ordered_json throughout.
using Json = nlohmann::ordered_json;

Json to_json(const SemGraph &g);
Json to_json(const GraphFragment &f);
Json to_json(const SyncRule &r);
Json to_json(const RuleInventory &inv);
Json to_json(const Derivation &d);

SemGraph graph_from_json(const Json &j);
GraphFragment fragment_from_json(const Json &j);
SyncRule rule_from_json(const Json &j);
RuleInventory inventory_from_json(const Json &j);
Derivation derivation_from_json(const Json &j);

// Compact single-line dump; the byte-exact form used everywhere.
std::string dump(const Json &j);

Json parse_json(const std::string &text);
std::string read_text(const std::filesystem::path &path);  // IoError
void write_text(const std::filesystem::path &path, const std::string &text);
Json read_json(const std::filesystem::path &path);

} // namespace shrg
