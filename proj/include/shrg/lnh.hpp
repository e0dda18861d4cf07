#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shrg/engine.hpp"
#include "shrg/json_io.hpp"
#include "shrg/sembank.hpp"
#include "shrg/stats.hpp"

namespace shrg::lnh {

// --- grammar induction ------------------------------------------------------------

// Rules extracted from every record with a tree and a graph, merged across the
// corpus when lhs, rhs and canonical fragment agree. Ids are assigned in order
// of first appearance (corpus order, then pre-order).
struct InducedGrammar {
    RuleInventory inventory;
    std::vector<std::optional<Derivation>> derivations; // aligned with the input records
    std::vector<std::string> failures;                 // "id: reason"
};

InducedGrammar induce_grammar(const std::vector<SentenceRecord> &records, SignatureMode mode,
                              const ExtractOptions &opts = {}, unsigned jobs = 1);

// Records with their derivations replaced by the induced ones (records that
// failed extraction lose their derivation).
std::vector<SentenceRecord> with_derivations(std::vector<SentenceRecord> records, const InducedGrammar &g);

// Keeps records whose id is listed, in corpus order.
std::vector<SentenceRecord> filter_ids(const std::vector<SentenceRecord> &records, const std::set<std::string> &ids);
std::set<std::string> read_id_list(const std::filesystem::path &path);

// --- frequency profile ------------------------------------------------------------

struct SignatureRow {
    std::string signature;
    std::int64_t esfl = 0, english = 0;
    bool lexical = false;
    std::optional<stats::RatioCi> ratio; // esfl / english, both counts > 0
    std::int64_t total() const { return esfl + english; }
};

struct FrequencyProfile {
    SignatureMode mode = SignatureMode::kDelexicalized;
    std::vector<SignatureRow> rows;   // combined count desc, then signature
    std::vector<std::string> missing; // records without a derivation
    std::size_t unique_esfl = 0, unique_english = 0;
    std::size_t derivation_nodes = 0;

    // Per-group unique signature counts added up, before pooling.
    std::size_t unique_pre_dedup() const { return unique_esfl + unique_english; }
    std::size_t unique_post_dedup() const { return rows.size(); }
};

FrequencyProfile build_frequency_profile(const std::vector<SentenceRecord> &records, const RuleInventory &inv,
                                         SignatureMode mode);
std::string profile_tsv(const FrequencyProfile &p);

// --- syntactic complexity ---------------------------------------------------------

struct ComplexityResult {
    stats::TestResult test;
    double min_expected = 4;
    stats::FilterRule filter = stats::FilterRule::kPerCell;
    std::vector<std::string> retained;    // after the expected-frequency filter
    std::vector<std::string> nonlexical;  // retained minus lexical signatures; tested
    std::size_t unique_pre_dedup = 0, unique_post_dedup = 0;
};

ComplexityResult syntactic_complexity(const FrequencyProfile &p, double min_expected = 4,
                                      stats::FilterRule rule = stats::FilterRule::kPerCell);
Json to_json(const ComplexityResult &r);

// --- semantic transparency ----------------------------------------------------------

struct TransparencyOptions {
    int restarts = 16;
    std::uint64_t seed = 0;
    bool include_top = true;
    SignatureMode mode = SignatureMode::kDelexicalized;
    unsigned jobs = 1;
};

struct ScoreRow {
    std::string id;
    Source source = Source::kEsfl;
    std::optional<double> f1; // empty when substitution or composition failed
    std::string error;
};

struct Histogram {
    static constexpr int kBins = 10;
    double lo = 0, hi = 1;
    std::array<std::size_t, kBins> counts{};
    double edge(int i) const { return lo + (hi - lo) * i / kBins; }
};

// Equal-width bins over [min(sample), 1]; the last bin is closed.
Histogram histogram(const std::vector<double> &sample);

struct GroupOutcome {
    Source source;
    std::vector<double> scores; // successful records, corpus order
    std::size_t failures = 0;
    std::optional<stats::Describe> describe;
    std::optional<Histogram> hist;
};

struct TransparencyOutcome {
    std::vector<ScoreRow> rows; // corpus order
    GroupOutcome esfl{Source::kEsfl}, english{Source::kEnglish};
    // ESFL against English; empty when either group has fewer than two scores.
    std::optional<stats::TestResult> welch, student, z;
    // Pairs the i-th ESFL score with the i-th English score; needs equal sizes.
    std::optional<stats::TestResult> paired;
};

// substitute_rules, then compose with each replaced rule's terminals kept, so the
// yield is the original one and only the semantics differ.
Composition compose_substituted(const Derivation &d, const RuleInventory &inv, SignatureMode mode);

TransparencyOutcome transparency_experiment(const std::vector<SentenceRecord> &records, const RuleInventory &inv,
                                            const TransparencyOptions &opts = {});

std::string scores_tsv(const TransparencyOutcome &o, std::optional<Source> only = std::nullopt);
Json describe_json(const TransparencyOutcome &o);
Json tests_json(const TransparencyOutcome &o);
std::string histogram_tsv(const TransparencyOutcome &o);

// --- formatting ---------------------------------------------------------------------

double sig9(double x); // rounded to 9 significant digits
Json to_json(const stats::TestResult &r);
Json to_json(const stats::Describe &d);

} // namespace shrg::lnh
