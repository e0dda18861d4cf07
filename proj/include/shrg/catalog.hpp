#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shrg/engine.hpp"
#include "shrg/json_io.hpp"

namespace shrg {

// One revision example: a small inventory, the original derivation, the
// original -> modified rule pairs and, when the syntax changes, the modified
// skeleton written with original rule ids.
struct CatalogEntry {
    std::string phenomenon;
    int table = 0;
    std::string sentence;
    RuleInventory inventory;
    Derivation derivation;
    std::vector<RevisionPair> pairs;
    std::optional<Derivation> rewrite;
    std::optional<SemGraph> original_sem;
    std::optional<SemGraph> modified_sem;

    struct EdgeCheck {
        std::string src, role, tgt; // labels
    };
    std::vector<EdgeCheck> present;
    std::vector<std::string> absent;         // labels that must not occur
    std::map<std::string, std::size_t> counts; // exact label counts
};

// A modified rule written with "sem": null stands for an empty contribution
// under the modified lhs and syntax.
std::vector<CatalogEntry> catalog_from_json(const Json &j);
std::vector<CatalogEntry> load_catalog(const std::filesystem::path &path);

struct RevisionCheck {
    Composition original;
    Composition modified;
    std::vector<std::string> failures; // empty when every expectation holds
};

RevisionCheck run_revision(const CatalogEntry &e);

// Same labels and edges, ignoring anchors and top.
bool same_analysis(const SemGraph &a, const SemGraph &b);

} // namespace shrg
