#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "shrg/json_io.hpp"
#include "shrg/rules.hpp"
#include "shrg/sembank.hpp"

namespace httplib {
class Server;
}

namespace shrg::review {

struct ReviewEvent {
    std::uint64_t seq = 0;
    std::string ts;
    std::string annotator;
    std::string item;
    std::string action; // label | relabel | rebuild
    Json payload;
};

Json to_json(const ReviewEvent &e);
ReviewEvent event_from_json(const Json &j);

struct Response {
    int status = 200;
    Json body;
};

inline constexpr std::size_t kPageSize = 50;

// Item status derived from labels: pending, accepted, rejected, inconsistent,
// abandoned. `rebuilt` is tracked separately.
std::string label_status(const SentenceRecord &r);

// In-memory corpus state plus an append-only event log. Reads share a lock;
// every mutation takes the writer lock, appends and flushes its event, then
// updates the state.
class ReviewStore {
  public:
    using Clock = std::function<std::string()>;

    // Replays `log_path` if it exists, then appends to it. No log when empty.
    ReviewStore(std::vector<SentenceRecord> records, RuleInventory inventory,
                std::optional<std::filesystem::path> log_path = std::nullopt, Clock clock = {});

    Response list_items(const std::string &status, const std::string &source, const std::string &page) const;
    Response get_item(const std::string &id) const;
    Response label(const std::string &id, const std::string &body);
    Response search_rules(const std::string &signature, const std::string &q) const;
    Response preview(const std::string &body) const;
    Response rebuild(const std::string &id, const std::string &body);
    Response iaa() const;
    Response corpus() const;

    std::uint64_t last_seq() const;
    std::vector<SentenceRecord> snapshot() const;

  private:
    void apply(const ReviewEvent &e);
    Response commit(ReviewEvent e);
    std::optional<std::size_t> find(const std::string &id) const;
    Json summary(std::size_t i) const;
    Response item(const std::string &id) const; // caller holds a lock

    mutable std::shared_mutex mu_;
    std::vector<SentenceRecord> records_;
    std::map<std::string, std::size_t> index_;
    std::vector<bool> rebuilt_;
    RuleInventory inventory_;
    std::optional<std::filesystem::path> log_path_;
    std::ofstream log_;
    Clock clock_;
    std::uint64_t seq_ = 0;
};

std::string iso_now();

// --- HTTP -----------------------------------------------------------------------

void install_routes(httplib::Server &server, ReviewStore &store);

// "host:port"; throws ValidationError when malformed.
std::pair<std::string, int> parse_bind(const std::string &bind);

// Blocks until the server stops. Returns false when the address cannot be bound.
bool serve(ReviewStore &store, const std::string &host, int port);

} // namespace shrg::review
