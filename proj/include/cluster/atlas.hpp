#pragma once

#include <cluster/digest.hpp>
#include <cluster/seed.hpp>

#include <exception>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace cluster {

struct ExploreOptions {
    std::size_t max_seeds = 200000;
    // Worker threads used to compute the children of a BFS layer. Results
    // are merged in (layer, parent, direction) order regardless of this.
    unsigned workers = 1;
    EngineOptions engine;
};

// A labeled seed reached from the origin, with its C- and G-matrix as
// tracked by the tropical recurrences along the witness path.
struct AtlasEntry {
    Seed seed;
    IntMatrix c;
    IntMatrix g;
    std::vector<int> path;  // 1-based directions from the origin
    std::size_t layer = 0;
    Fingerprint fingerprint;
};

class ExplorationAtlas {
public:
    ExplorationAtlas(Seed origin, std::size_t depth_bound)
        : origin_(std::move(origin)), depth_bound_(depth_bound) {}

    const Seed& origin() const noexcept { return origin_; }
    std::size_t depth_bound() const noexcept { return depth_bound_; }
    const std::vector<AtlasEntry>& entries() const noexcept { return entries_; }
    std::vector<AtlasEntry>& mutable_entries() noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    // True when the BFS ran out of new seeds within the depth bound.
    bool closed() const noexcept { return closed_; }
    const std::vector<std::size_t>& layer_sizes() const noexcept { return layer_sizes_; }

    // Index of an entry structurally equal to s. The fingerprint only
    // narrows the candidates.
    std::optional<std::size_t> find(const Seed& s, const Fingerprint& fp) const {
        auto it = index_.find(fp);
        if (it == index_.end()) return std::nullopt;
        for (auto i : it->second)
            if (entries_[i].seed == s) return i;
        return std::nullopt;
    }

    std::optional<std::size_t> find(const Seed& s) const {
        return find(s, Fingerprint::of(canonical_form(s)));
    }

    // Inserts unless an equal seed is present; returns (index, inserted).
    std::pair<std::size_t, bool> insert(AtlasEntry entry) {
        if (auto existing = find(entry.seed, entry.fingerprint)) return {*existing, false};
        const std::size_t i = entries_.size();
        index_[entry.fingerprint].push_back(i);
        entries_.push_back(std::move(entry));
        return {i, true};
    }

    std::size_t distinct_cluster_variables() const {
        std::set<std::string> seen;
        for (const auto& e : entries_)
            for (const auto& v : e.seed.variables()) seen.insert(to_string(v));
        return seen.size();
    }

    void set_closed(bool closed) { closed_ = closed; }
    void add_layer(std::size_t count) { layer_sizes_.push_back(count); }

private:
    Seed origin_;
    std::size_t depth_bound_;
    std::vector<AtlasEntry> entries_;
    std::unordered_map<Fingerprint, std::vector<std::size_t>, FingerprintHash> index_;
    std::vector<std::size_t> layer_sizes_;
    bool closed_ = false;
};

namespace detail {

struct ChildTask {
    std::size_t parent;
    Direction k;
};

inline AtlasEntry make_child(const AtlasEntry& parent, Direction k, const IntMatrix& b0,
                             const EngineOptions& engine) {
    std::vector<int> path = parent.path;
    path.push_back(k.one_based());
    try {
        Seed seed = mutate_seed(parent.seed, k, engine);
        const IntMatrix bt = parent.seed.exchange();
        IntMatrix c = c_mutate(bt, parent.c, k);
        IntMatrix g = g_mutate(parent.g, bt, parent.c, b0, k);
        auto fp = Fingerprint::of(canonical_form(seed));
        return AtlasEntry{std::move(seed), std::move(c), std::move(g), std::move(path),
                          parent.layer + 1, fp};
    } catch (assertion_failure& e) {
        e.set_path(path);
        throw;
    } catch (const cluster_error& e) {
        throw assertion_failure(e.what(), path);
    }
}

// Runs make_child for every task, spread over `workers` threads. Results
// keep task order; the first failure in task order is rethrown.
inline std::vector<AtlasEntry> compute_children(const std::vector<AtlasEntry>& entries,
                                                const std::vector<ChildTask>& tasks,
                                                const IntMatrix& b0, const ExploreOptions& opts) {
    std::vector<std::optional<AtlasEntry>> out(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    auto run = [&](std::size_t first, std::size_t stride) {
        for (std::size_t t = first; t < tasks.size(); t += stride) {
            try {
                out[t] = make_child(entries[tasks[t].parent], tasks[t].k, b0, opts.engine);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(opts.workers, tasks.size()));
    if (workers == 1) {
        run(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    }
    std::vector<AtlasEntry> result;
    result.reserve(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (errors[t]) std::rethrow_exception(errors[t]);
        result.push_back(std::move(*out[t]));
    }
    return result;
}

// Whether some task leads to a seed outside the atlas. Only the matrix is
// mutated up front. The new cluster variable is consulted just to confirm a
// candidate that already agrees on the matrix and the untouched variables,
// and then through the product candidate * x_k instead of a division.
inline bool probe_grows(const ExplorationAtlas& atlas, const std::vector<ChildTask>& tasks) {
    const auto key = [](const IntMatrix& m) {
        std::ostringstream os;
        os << m;
        return os.str();
    };
    const auto& entries = atlas.entries();
    std::unordered_map<std::string, std::vector<std::size_t>> by_matrix;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        by_matrix[key(entries[i].seed.extended().full())].push_back(i);
    }
    for (const auto& task : tasks) {
        const AtlasEntry& parent = entries[task.parent];
        const std::size_t kk = task.k.index();
        std::string child_key;
        try {
            child_key = key(parent.seed.extended().mutate(task.k).full());
        } catch (const cluster_error& e) {
            std::vector<int> path = parent.path;
            path.push_back(task.k.one_based());
            throw assertion_failure(e.what(), path);
        }
        auto it = by_matrix.find(child_key);
        if (it == by_matrix.end()) return true;
        std::optional<LaurentPoly> binomial;
        bool known = false;
        for (auto idx : it->second) {
            const Seed& candidate = entries[idx].seed;
            bool same_rest = true;
            for (std::size_t i = 0; i < candidate.rank() && same_rest; ++i) {
                if (i != kk) same_rest = candidate.variable(i) == parent.seed.variable(i);
            }
            if (!same_rest) continue;
            if (!binomial) binomial = exchange_binomial(parent.seed, task.k);
            if (candidate.variable(kk) * parent.seed.variable(kk) == *binomial) {
                known = true;
                break;
            }
        }
        if (!known) return true;
    }
    return false;
}

}  // namespace detail

// Breadth-first closure of the labeled seeds reachable from the principal
// seed of b0 in at most `depth` mutations. The seeds at the last layer are
// probed one step further (see probe_grows) to tell closure from truncation.
inline ExplorationAtlas explore(const IntMatrix& b0, std::size_t depth,
                                const ExploreOptions& opts = {}) {
    Seed origin = new_principal_seed(b0);
    const std::size_t n = origin.rank();
    ExplorationAtlas atlas(origin, depth);
    auto fp = Fingerprint::of(canonical_form(origin));
    atlas.insert(AtlasEntry{origin, IntMatrix::identity(n), IntMatrix::identity(n), {}, 0, fp});
    atlas.add_layer(1);

    std::vector<std::size_t> frontier{0};
    for (std::size_t layer = 0;; ++layer) {
        std::vector<detail::ChildTask> tasks;
        for (auto i : frontier) {
            const auto& path = atlas.entries()[i].path;
            for (std::size_t k = 0; k < n; ++k) {
                // stepping back along the last edge returns to the parent
                if (!path.empty() && static_cast<std::size_t>(path.back() - 1) == k) continue;
                tasks.push_back({i, Direction::from_zero_based(k)});
            }
        }
        if (tasks.empty()) {
            atlas.set_closed(true);
            break;
        }
        if (layer == depth) {
            atlas.set_closed(!detail::probe_grows(atlas, tasks));
            break;
        }
        auto children = detail::compute_children(atlas.entries(), tasks, b0, opts);

        std::vector<std::size_t> next;
        for (auto& child : children) {
            if (atlas.find(child.seed, child.fingerprint)) continue;
            if (atlas.size() >= opts.max_seeds) {
                throw budget_exceeded("exploration exceeded the budget of " +
                                      std::to_string(opts.max_seeds) + " seeds at depth " +
                                      std::to_string(layer + 1));
            }
            next.push_back(atlas.insert(std::move(child)).first);
        }
        if (next.empty()) {
            atlas.set_closed(true);
            break;
        }
        atlas.add_layer(next.size());
        frontier = std::move(next);
    }
    return atlas;
}

// Applies a 1-based mutation path to a seed.
inline Seed replay(const Seed& origin, const std::vector<int>& path,
                   const EngineOptions& engine = {}) {
    Seed s = origin;
    for (int k : path) s = mutate_seed(s, Direction::from_one_based(k), engine);
    return s;
}

}  // namespace cluster
