#include "shrg/review.hpp"

#include <chrono>
#include <ctime>
#include <mutex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "shrg/engine.hpp"
#include "shrg/error.hpp"

namespace shrg::review {

namespace {

Response error(int status, const std::string &msg) { return {status, Json{{"error", msg}}}; }

Json parse_body(const std::string &body) {
    auto j = parse_json(body);
    if (!j.is_object())
        throw ValidationError("request body must be a JSON object");
    return j;
}

std::string required_string(const Json &j, const char *key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string() || it->get<std::string>().empty())
        throw ValidationError(std::string("\"") + key + "\" must be a non-empty string");
    return it->get<std::string>();
}

} // namespace

std::string iso_now() {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    return fmt::format("{}.{:03d}Z", buf, ms);
}

Json to_json(const ReviewEvent &e) {
    Json j = Json::object();
    j["seq"] = e.seq;
    j["ts"] = e.ts;
    j["annotator"] = e.annotator;
    j["item"] = e.item;
    j["action"] = e.action;
    j["payload"] = e.payload;
    return j;
}

ReviewEvent event_from_json(const Json &j) {
    if (!j.is_object() || !j.contains("seq") || !j["seq"].is_number_unsigned())
        throw ValidationError("event needs an unsigned \"seq\"");
    ReviewEvent e;
    e.seq = j["seq"].get<std::uint64_t>();
    e.ts = j.value("ts", "");
    e.annotator = required_string(j, "annotator");
    e.item = required_string(j, "item");
    e.action = required_string(j, "action");
    e.payload = j.value("payload", Json::object());
    return e;
}

std::string label_status(const SentenceRecord &r) {
    if (r.labels.empty())
        return "pending";
    std::size_t acc = 0, rej = 0;
    for (const auto &[who, l] : r.labels) {
        acc += l == Label::kAccept;
        rej += l == Label::kReject;
    }
    if (acc + rej == 0)
        return "abandoned";
    if (acc == rej)
        return "inconsistent";
    return acc > rej ? "accepted" : "rejected";
}

ReviewStore::ReviewStore(std::vector<SentenceRecord> records, RuleInventory inventory,
                         std::optional<std::filesystem::path> log_path, Clock clock)
    : records_(std::move(records)), rebuilt_(records_.size(), false), inventory_(std::move(inventory)),
      log_path_(std::move(log_path)), clock_(clock ? std::move(clock) : Clock(iso_now)) {
    for (std::size_t i = 0; i < records_.size(); ++i)
        index_[records_[i].id] = i;
    if (!log_path_)
        return;
    if (std::filesystem::exists(*log_path_)) {
        std::istringstream in(read_text(*log_path_));
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            try {
                auto e = event_from_json(parse_json(line));
                if (e.seq <= seq_)
                    throw ValidationError("sequence number " + std::to_string(e.seq) + " out of order");
                apply(e);
                seq_ = e.seq;
            } catch (const Error &err) {
                throw ValidationError(log_path_->string() + ": line " + std::to_string(lineno) + ": " + err.what());
            }
        }
    }
    log_.open(*log_path_, std::ios::app);
    if (!log_)
        throw IoError("cannot append to " + log_path_->string());
}

std::optional<std::size_t> ReviewStore::find(const std::string &id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

void ReviewStore::apply(const ReviewEvent &e) {
    auto i = find(e.item);
    if (!i)
        throw ValidationError("event for unknown item " + e.item);
    auto &r = records_[*i];
    if (e.action == "label" || e.action == "relabel") {
        r.labels[e.annotator] = parse_label(e.payload.at("label").get<std::string>());
    } else if (e.action == "rebuild") {
        auto d = derivation_from_json(e.payload.at("derivation"));
        auto comp = compose(d, inventory_);
        r.graph = comp.graph;
        r.derivation = d;
        r.provenance = Provenance::kComposed;
        rebuilt_[*i] = true;
    } else {
        throw ValidationError("unknown action " + e.action);
    }
}

Response ReviewStore::commit(ReviewEvent e) {
    e.seq = seq_ + 1;
    e.ts = clock_();
    if (log_path_) {
        log_ << dump(to_json(e)) << '\n';
        log_.flush();
        if (!log_)
            return error(500, "event log write failed");
    }
    seq_ = e.seq;
    apply(e);
    return {200, Json{{"seq", e.seq}, {"item", item(e.item).body}}};
}

Json ReviewStore::summary(std::size_t i) const {
    const auto &r = records_[i];
    Json j = Json::object();
    j["id"] = r.id;
    j["sentence"] = r.sentence;
    j["source"] = to_string(r.source);
    j["status"] = label_status(r);
    j["rebuilt"] = static_cast<bool>(rebuilt_[i]);
    j["labels"] = r.labels.size();
    j["provenance"] = to_string(r.provenance);
    return j;
}

Response ReviewStore::list_items(const std::string &status, const std::string &source,
                                 const std::string &page) const {
    std::shared_lock lock(mu_);
    std::size_t pg = 1;
    if (!page.empty()) {
        try {
            std::size_t used = 0;
            long v = std::stol(page, &used);
            if (used != page.size() || v < 1)
                throw std::invalid_argument("page");
            pg = static_cast<std::size_t>(v);
        } catch (const std::exception &) {
            return error(422, "page must be a positive integer");
        }
    }
    static const std::set<std::string> statuses = {"",         "pending",   "accepted", "rejected",
                                                   "inconsistent", "abandoned", "rebuilt"};
    if (!statuses.count(status))
        return error(422, "unknown status '" + status + "'");
    std::optional<Source> src;
    if (!source.empty()) {
        try {
            src = parse_source(source);
        } catch (const ValidationError &e) {
            return error(422, e.what());
        }
    }
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (src && records_[i].source != *src)
            continue;
        if (status == "rebuilt" ? !rebuilt_[i] : !status.empty() && label_status(records_[i]) != status)
            continue;
        hits.push_back(i);
    }
    Json items = Json::array();
    for (std::size_t k = (pg - 1) * kPageSize; k < hits.size() && k < pg * kPageSize; ++k)
        items.push_back(summary(hits[k]));
    Json j = Json::object();
    j["items"] = std::move(items);
    j["page"] = pg;
    j["page_size"] = kPageSize;
    j["total"] = hits.size();
    return {200, j};
}

Response ReviewStore::get_item(const std::string &id) const {
    std::shared_lock lock(mu_);
    return item(id);
}

Response ReviewStore::item(const std::string &id) const {
    auto i = find(id);
    if (!i)
        return error(404, "unknown item " + id);
    auto j = shrg::to_json(records_[*i]);
    j["status"] = label_status(records_[*i]);
    j["rebuilt"] = static_cast<bool>(rebuilt_[*i]);
    return {200, j};
}

Response ReviewStore::label(const std::string &id, const std::string &body) {
    std::unique_lock lock(mu_);
    auto i = find(id);
    if (!i)
        return error(404, "unknown item " + id);
    ReviewEvent e;
    try {
        auto j = parse_body(body);
        e.annotator = required_string(j, "annotator");
        auto label = parse_label(required_string(j, "label"));
        bool force = j.value("force", false);
        bool again = records_[*i].labels.count(e.annotator) > 0;
        if (again && !force)
            return error(409, "annotator " + e.annotator + " already labelled " + id + "; resubmit with \"force\": true");
        e.action = again ? "relabel" : "label";
        e.payload = Json{{"label", to_string(label)}};
    } catch (const ValidationError &err) {
        return error(422, err.what());
    }
    e.item = id;
    return commit(std::move(e));
}

Response ReviewStore::search_rules(const std::string &signature, const std::string &q) const {
    std::shared_lock lock(mu_);
    Json rules = Json::array();
    for (const auto &r : inventory_.rules()) {
        auto sig = cfg_signature(r, inventory_.mode());
        if (!signature.empty() && sig != signature)
            continue;
        if (!q.empty() && sig.find(q) == std::string::npos && r.id.find(q) == std::string::npos)
            continue;
        auto j = shrg::to_json(r);
        j["signature"] = sig;
        rules.push_back(std::move(j));
    }
    return {200, Json{{"mode", to_string(inventory_.mode())}, {"rules", std::move(rules)}}};
}

Response ReviewStore::preview(const std::string &body) const {
    std::shared_lock lock(mu_);
    try {
        auto j = parse_body(body);
        if (!j.contains("derivation"))
            throw ValidationError("body needs a \"derivation\"");
        auto comp = compose(derivation_from_json(j["derivation"]), inventory_);
        return {200, shrg::to_json(comp.graph)};
    } catch (const Error &e) {
        return error(422, e.what());
    }
}

Response ReviewStore::rebuild(const std::string &id, const std::string &body) {
    std::unique_lock lock(mu_);
    if (!find(id))
        return error(404, "unknown item " + id);
    ReviewEvent e;
    try {
        auto j = parse_body(body);
        if (!j.contains("derivation"))
            throw ValidationError("body needs a \"derivation\"");
        auto d = derivation_from_json(j["derivation"]);
        compose(d, inventory_); // reject before logging
        e.annotator = j.contains("annotator") ? required_string(j, "annotator") : "builder";
        e.payload = Json{{"derivation", shrg::to_json(d)}};
    } catch (const Error &err) {
        return error(422, err.what());
    }
    e.item = id;
    e.action = "rebuild";
    return commit(std::move(e));
}

Response ReviewStore::iaa() const {
    std::shared_lock lock(mu_);
    return {200, to_json(iaa_report(records_, std::nullopt, true))};
}

Response ReviewStore::corpus() const {
    std::shared_lock lock(mu_);
    auto j = to_json(corpus_report(records_));
    std::size_t rebuilt = 0;
    for (bool b : rebuilt_)
        rebuilt += b;
    j["rebuilt"] = rebuilt;
    return {200, j};
}

std::uint64_t ReviewStore::last_seq() const {
    std::shared_lock lock(mu_);
    return seq_;
}

std::vector<SentenceRecord> ReviewStore::snapshot() const {
    std::shared_lock lock(mu_);
    return records_;
}

} // namespace shrg::review
