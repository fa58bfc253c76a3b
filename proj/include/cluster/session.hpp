#pragma once

#include <cluster/json_io.hpp>

#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

namespace cluster {

class session_not_found : public cluster_error {
public:
    using cluster_error::cluster_error;
};

class empty_history : public cluster_error {
public:
    using cluster_error::cluster_error;
};

// Small LRU cache of full seeds keyed by fingerprint.
class SeedCache {
public:
    explicit SeedCache(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

    void put(const Fingerprint& fp, const Seed& s) {
        if (auto it = index_.find(fp); it != index_.end()) {
            order_.splice(order_.begin(), order_, it->second);
            return;
        }
        order_.emplace_front(fp, s);
        index_.emplace(fp, order_.begin());
        if (order_.size() > capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
    }

    std::optional<Seed> get(const Fingerprint& fp) {
        auto it = index_.find(fp);
        if (it == index_.end()) return std::nullopt;
        order_.splice(order_.begin(), order_, it->second);
        return it->second->second;
    }

    std::size_t size() const noexcept { return order_.size(); }

private:
    std::size_t capacity_;
    std::list<std::pair<Fingerprint, Seed>> order_;
    std::map<Fingerprint, std::list<std::pair<Fingerprint, Seed>>::iterator> index_;
};

struct HistoryStep {
    Direction k;
    Fingerprint fingerprint;  // of the seed reached by this step
};

// One interactive mutation session. History keeps fingerprints only; full
// seeds live in a bounded cache and are otherwise rebuilt by replay.
class Session {
public:
    Session(std::string id, IntMatrix origin, EngineOptions engine = {}, std::size_t cache_size = 32)
        : id_(std::move(id)),
          origin_(new_principal_seed(origin)),
          origin_fp_(Fingerprint::of(canonical_form(origin_))),
          current_(origin_),
          engine_(engine),
          cache_(cache_size) {
        cache_.put(origin_fp_, origin_);
    }

    const std::string& id() const noexcept { return id_; }
    const Seed& origin() const noexcept { return origin_; }
    const Seed& current() const noexcept { return current_; }
    const std::vector<HistoryStep>& history() const noexcept { return history_; }

    std::vector<int> path() const {
        std::vector<int> p;
        for (const auto& h : history_) p.push_back(h.k.one_based());
        return p;
    }

    const Seed& mutate(Direction k) {
        Seed next = mutate_seed(current_, k, engine_);
        auto fp = Fingerprint::of(canonical_form(next));
        cache_.put(fp, next);
        history_.push_back({k, fp});
        current_ = std::move(next);
        return current_;
    }

    // Restores the prior seed two ways, by the mutation involution and from
    // the cache or a replay, and insists they agree.
    const Seed& undo() {
        if (history_.empty()) throw empty_history("nothing to undo in session " + id_);
        const HistoryStep last = history_.back();
        Seed by_involution = mutate_seed(current_, last.k, engine_);
        history_.pop_back();
        const Fingerprint prior_fp = history_.empty() ? origin_fp_ : history_.back().fingerprint;
        std::optional<Seed> prior = cache_.get(prior_fp);
        if (!prior) prior = replay(origin_, path(), engine_);
        if (!(*prior == by_involution)) {
            throw cluster_error("undo mismatch in session " + id_ +
                                ": involution and replay disagree");
        }
        current_ = std::move(*prior);
        return current_;
    }

    Seed replay_history() const { return replay(origin_, path(), engine_); }

    std::size_t cached_seeds() const noexcept { return cache_.size(); }

private:
    std::string id_;
    Seed origin_;
    Fingerprint origin_fp_;
    Seed current_;
    EngineOptions engine_;
    SeedCache cache_;
    std::vector<HistoryStep> history_;
};

// Thread-safe registry of sessions. Each session has its own mutex, so
// requests to one session are serialized while different sessions proceed
// independently.
class SessionStore {
public:
    explicit SessionStore(EngineOptions engine = {}) : engine_(engine) {}

    std::string create(const IntMatrix& b) {
        std::unique_lock lock(mutex_);
        std::string id = "s" + std::to_string(next_id_++);
        auto slot = std::make_shared<Slot>(Session(id, b, engine_));
        sessions_.emplace(id, std::move(slot));
        return id;
    }

    // Runs fn(Session&) under the session's own lock.
    template <class Fn>
    auto with_session(const std::string& id, Fn&& fn) {
        std::shared_ptr<Slot> slot;
        {
            std::shared_lock lock(mutex_);
            auto it = sessions_.find(id);
            if (it == sessions_.end()) throw session_not_found("no session " + id);
            slot = it->second;
        }
        std::lock_guard guard(slot->mutex);
        return fn(slot->session);
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return sessions_.size();
    }

    // {"v":1,"next_id":N,"sessions":[{"id","B","path"}]}
    json snapshot() const {
        std::shared_lock lock(mutex_);
        json sessions = json::array();
        for (const auto& [id, slot] : sessions_) {
            std::lock_guard guard(slot->mutex);
            sessions.push_back(json{{"id", id},
                                    {"B", to_json(slot->session.origin().initial_matrix())},
                                    {"path", slot->session.path()}});
        }
        return json{{"v", 1}, {"next_id", next_id_}, {"sessions", std::move(sessions)}};
    }

    void restore(const json& snap) {
        std::unique_lock lock(mutex_);
        sessions_.clear();
        next_id_ = snap.at("next_id").get<std::size_t>();
        for (const auto& s : snap.at("sessions")) {
            const auto id = s.at("id").get<std::string>();
            Session session(id, matrix_from_json(s.at("B"), "B"), engine_);
            for (int k : s.at("path").get<std::vector<int>>()) session.mutate(Direction::from_one_based(k));
            sessions_.emplace(id, std::make_shared<Slot>(std::move(session)));
        }
    }

private:
    struct Slot {
        explicit Slot(Session s) : session(std::move(s)) {}
        std::mutex mutex;
        Session session;
    };

    EngineOptions engine_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::size_t next_id_ = 1;
};

}  // namespace cluster
