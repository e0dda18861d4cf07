#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shrg/graph.hpp"
#include "shrg/json_io.hpp"
#include "shrg/rules.hpp"
#include "shrg/tree.hpp"

namespace shrg {

enum class Source { kEsfl, kEnglish };
enum class Label { kAccept, kReject, kAbandon };
enum class Provenance { kAccepted, kModified, kComposed, kUnlabeled };

std::string to_string(Source s);
std::string to_string(Label l);
std::string to_string(Provenance p);
Source parse_source(std::string_view s);
Label parse_label(std::string_view s);
Provenance parse_provenance(std::string_view s);

struct SentenceRecord {
    std::string id;
    std::string sentence;
    std::vector<std::string> tokens;
    Source source = Source::kEsfl;
    std::optional<SynTree> tree;
    std::optional<SemGraph> graph;
    std::optional<Derivation> derivation;
    std::map<std::string, Label> labels; // annotator -> label
    Provenance provenance = Provenance::kUnlabeled;

    bool operator==(const SentenceRecord &) const = default;
};

void validate(const SentenceRecord &r);

Json to_json(const SentenceRecord &r);
SentenceRecord record_from_json(const Json &j);

// Whitespace split, then punctuation split per a fixed character list. Only
// used when a record carries no tokens of its own.
std::vector<std::string> tokenize(std::string_view sentence);

struct Corpus {
    std::vector<SentenceRecord> records;
    std::vector<std::string> skipped; // "line N: reason", --lenient only
};

Corpus parse_corpus(const std::string &text, bool lenient = false);
Corpus load_corpus(const std::filesystem::path &path, bool lenient = false);
std::string serialize_corpus(const std::vector<SentenceRecord> &records);
void save_corpus(const std::vector<SentenceRecord> &records, const std::filesystem::path &path);

// --- reports ------------------------------------------------------------------

struct Stratum {
    std::string name; // Triple, Double, Single, Overall
    std::size_t acc = 0, rej = 0;
    std::size_t all() const { return acc + rej; }
};

struct GroupStats {
    Source source;
    std::vector<Stratum> strata; // Triple, Double, Single, then Overall
    std::size_t labelled = 0;     // records with at least one label
    std::size_t inconsistent = 0; // accept/reject ties, excluded
    std::size_t abandoned = 0;    // only abandon labels, excluded
};

struct ProvenanceSummary {
    std::size_t accepted = 0, modified = 0, composed = 0, unlabeled = 0;
    std::size_t total() const { return accepted + modified + composed + unlabeled; }
};

struct CorpusReport {
    std::vector<GroupStats> groups; // esfl, english
    ProvenanceSummary provenance;   // over esfl records
    std::size_t records = 0;
};

CorpusReport corpus_report(const std::vector<SentenceRecord> &records);
Json to_json(const CorpusReport &r);
std::string render_text(const CorpusReport &r);

struct IaaRow {
    std::vector<std::string> annotators;
    std::map<Source, std::optional<double>> agreement; // percent, nullopt if nothing co-labelled
    std::map<Source, std::size_t> items;
};

struct IaaReport {
    std::vector<IaaRow> rows;
};

// Default groups: every annotator together (three or more), then each pair.
// A group without co-labelled items is an error unless skip_empty drops it.
IaaReport iaa_report(const std::vector<SentenceRecord> &records,
                     std::optional<std::vector<std::vector<std::string>>> groups = std::nullopt,
                     bool skip_empty = false);
Json to_json(const IaaReport &r);
std::string render_text(const IaaReport &r);

} // namespace shrg
