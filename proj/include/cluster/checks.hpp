#pragma once

#include <cluster/atlas.hpp>

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cluster {

using json = nlohmann::ordered_json;

inline json to_json(const IntMatrix& m) { return m.to_rows(); }

enum class Status { pass, fail, skipped, error };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::skipped: return "skipped";
        case Status::error: return "error";
    }
    return "?";
}

struct CheckRecord {
    std::string check;
    Status status = Status::pass;
    std::size_t seeds_covered = 0;
    std::size_t failures = 0;
    std::optional<std::vector<int>> witness_path;  // first failing seed
    std::optional<json> counterexample;
    std::optional<std::string> note;

    bool passed() const { return status == Status::pass; }
};

// Incrementally builds one CheckRecord; only the first failure keeps its
// witness, later ones are counted.
class CheckBuilder {
public:
    CheckBuilder(std::string name, std::size_t seeds) {
        record_.check = std::move(name);
        record_.seeds_covered = seeds;
    }

    void fail(const std::vector<int>& path, json counterexample) {
        if (record_.failures++ == 0) {
            record_.status = Status::fail;
            record_.witness_path = path;
            record_.counterexample = std::move(counterexample);
        }
    }

    CheckRecord done() { return std::move(record_); }

private:
    CheckRecord record_;
};

inline CheckRecord skipped_check(std::string name, std::string reason) {
    CheckRecord r;
    r.check = std::move(name);
    r.status = Status::skipped;
    r.note = std::move(reason);
    return r;
}

enum class Regime { skew_symmetrizable, acyclic_sign_skew_symmetric, sign_skew_symmetric };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::skew_symmetrizable: return "skew-symmetrizable";
        case Regime::acyclic_sign_skew_symmetric: return "acyclic-sign-skew-symmetric";
        case Regime::sign_skew_symmetric: return "sign-skew-symmetric";
    }
    return "?";
}

struct VerificationReport {
    IntMatrix initial = IntMatrix(1, 1);
    std::size_t depth = 0;
    std::optional<Regime> regime;
    std::optional<SkewSymmetrizer> symmetrizer;
    bool explored = false;
    bool closed = false;
    std::size_t seeds = 0;
    std::size_t distinct_cluster_variables = 0;
    std::vector<std::size_t> layer_sizes;
    std::optional<std::string> canary;
    std::vector<CheckRecord> checks;

    std::size_t count(Status s) const {
        std::size_t c = 0;
        for (const auto& r : checks) c += r.status == s;
        return c;
    }
    bool has_failures() const { return count(Status::fail) > 0; }
    bool has_errors() const { return count(Status::error) > 0; }
    bool truncated() const { return explored && !closed; }

    const CheckRecord* find(std::string_view name) const {
        for (const auto& r : checks)
            if (r.check == name) return &r;
        return nullptr;
    }
};

// --- individual checks -------------------------------------------------

inline bool is_sign_coherent(std::span<const std::int64_t> v) {
    bool pos = false, neg = false;
    for (auto x : v) {
        pos |= x > 0;
        neg |= x < 0;
    }
    return !(pos && neg);
}

inline std::vector<bool> column_sign_coherence(const IntMatrix& c) {
    std::vector<bool> out;
    for (std::size_t j = 0; j < c.cols(); ++j) {
        const auto col = c.column(j);
        out.push_back(is_sign_coherent(col));
    }
    return out;
}

inline CheckRecord check_sign_coherence(const ExplorationAtlas& atlas) {
    CheckBuilder b("sign_coherence", atlas.size());
    for (const auto& e : atlas.entries()) {
        const auto coherent = column_sign_coherence(e.c);
        for (std::size_t j = 0; j < coherent.size(); ++j) {
            if (!coherent[j]) {
                b.fail(e.path, json{{"column", j + 1}, {"c_vector", e.c.column(j)}, {"C", to_json(e.c)}});
            }
        }
    }
    return b.done();
}

inline CheckRecord check_positivity(const ExplorationAtlas& atlas) {
    CheckBuilder b("positivity", atlas.size());
    for (const auto& e : atlas.entries()) {
        for (std::size_t i = 0; i < e.seed.rank(); ++i) {
            if (!is_nonnegative(e.seed.variable(i))) {
                b.fail(e.path, json{{"variable", i + 1}, {"value", to_string(e.seed.variable(i))}});
            }
        }
    }
    return b.done();
}

// Tracked (C, G) against the seed's own bottom block and grading degrees.
inline CheckRecord check_recurrence_agreement(const ExplorationAtlas& atlas) {
    CheckBuilder b("recurrence_agreement", atlas.size());
    for (const auto& e : atlas.entries()) {
        const IntMatrix c = e.seed.c_matrix();
        if (c != e.c) {
            b.fail(e.path, json{{"tracked_C", to_json(e.c)}, {"seed_C", to_json(c)}});
            continue;
        }
        try {
            const IntMatrix g = e.seed.g_matrix();
            if (g != e.g) b.fail(e.path, json{{"tracked_G", to_json(e.g)}, {"degree_G", to_json(g)}});
        } catch (const not_homogeneous& ex) {
            b.fail(e.path, json{{"error", ex.what()}});
        }
    }
    return b.done();
}

inline CheckRecord check_separation(const ExplorationAtlas& atlas) {
    CheckBuilder b("separation_formula", atlas.size());
    const IntMatrix& b0 = atlas.origin().initial_matrix();
    for (const auto& e : atlas.entries()) {
        for (std::size_t i = 0; i < e.seed.rank(); ++i) {
            const auto& v = e.seed.variable(i);
            try {
                const auto rebuilt = reconstruct_separation(g_vector_of(v, b0),
                                                            FPolynomial(evaluate_x_at_one(v)), b0);
                if (rebuilt != v) {
                    b.fail(e.path, json{{"variable", i + 1}, {"value", to_string(v)},
                                        {"reconstructed", to_string(rebuilt)}});
                }
            } catch (const cluster_error& ex) {
                b.fail(e.path, json{{"variable", i + 1}, {"error", ex.what()}});
            }
        }
    }
    return b.done();
}

// Constant term 1, and optionally the unique maximal monomial.
inline CheckRecord check_f_polynomials(const ExplorationAtlas& atlas, bool maximal_monomial) {
    CheckBuilder b(maximal_monomial ? "f_polynomial_shape" : "f_polynomial_constant_term",
                   atlas.size());
    for (const auto& e : atlas.entries()) {
        for (std::size_t i = 0; i < e.seed.rank(); ++i) {
            const FPolynomial f(evaluate_x_at_one(e.seed.variable(i)));
            const bool const_ok = f.has_constant_term_one();
            const bool max_ok = !maximal_monomial || f.has_unique_maximal_monomial();
            if (!const_ok || !max_ok) {
                b.fail(e.path, json{{"variable", i + 1},
                                    {"F", to_string(f.poly())},
                                    {"constant_term_one", const_ok},
                                    {"unique_maximal_monomial", max_ok}});
            }
        }
    }
    return b.done();
}

struct DualityResult {
    bool exchange_identity = false;  // G B S^-1 G^T = B0 S^-1
    bool c_g_identity = false;       // S C S^-1 G^T = I
    bool unimodular = false;         // det G = +-1
    bool holds() const { return exchange_identity && c_g_identity && unimodular; }
};

// With L = lcm(S) and T = L S^-1 (integral), the identities become
//   G B T G^T = B0 T   and   S C T G^T = L I.
inline DualityResult check_duality_identities(const IntMatrix& b0, const SkewSymmetrizer& s,
                                              const IntMatrix& b, const IntMatrix& c,
                                              const IntMatrix& g) {
    DualityResult r;
    const IntMatrix t = s.scaled_inverse();
    const IntMatrix gt = g.transpose();
    r.exchange_identity = g * b * t * gt == b0 * t;
    IntMatrix li(b0.rows(), b0.rows());
    for (std::size_t i = 0; i < b0.rows(); ++i) li(i, i) = s.lcm();
    r.c_g_identity = s.matrix() * c * t * gt == li;
    const auto det = determinant(g);
    r.unimodular = det == 1 || det == -1;
    return r;
}

inline CheckRecord check_duality(const ExplorationAtlas& atlas, const SkewSymmetrizer& s) {
    CheckBuilder b("duality", atlas.size());
    const IntMatrix& b0 = atlas.origin().initial_matrix();
    for (const auto& e : atlas.entries()) {
        const auto r = check_duality_identities(b0, s, e.seed.exchange(), e.c, e.g);
        if (!r.holds()) {
            b.fail(e.path, json{{"G_B_Sinv_Gt_eq_B0_Sinv", r.exchange_identity},
                                {"S_C_Sinv_Gt_eq_I", r.c_g_identity},
                                {"det_G_unit", r.unimodular},
                                {"B", to_json(e.seed.exchange())},
                                {"C", to_json(e.c)},
                                {"G", to_json(e.g)}});
        }
    }
    return b.done();
}

// Every seed whose G-matrix is the identity must be the origin.
inline CheckRecord check_lemma_identity_seed(const ExplorationAtlas& atlas) {
    CheckBuilder b("identity_g_is_origin", atlas.size());
    const IntMatrix id = IntMatrix::identity(atlas.origin().rank());
    for (const auto& e : atlas.entries()) {
        if (e.g == id && !(e.seed == atlas.origin())) {
            b.fail(e.path, json{{"G", to_json(e.g)}, {"seed", canonical_form(e.seed)}});
        }
    }
    return b.done();
}

// Injectivity of key(entry) -> seed, with structural comparison on every
// key collision.
template <class KeyFn>
CheckRecord check_key_determines_seed(const ExplorationAtlas& atlas, std::string name, KeyFn key) {
    CheckBuilder b(std::move(name), atlas.size());
    std::map<std::vector<std::int64_t>, std::size_t> first_with_key;
    const auto& entries = atlas.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto [it, inserted] = first_with_key.try_emplace(key(entries[i]), i);
        if (inserted) continue;
        const auto& other = entries[it->second];
        if (!(other.seed == entries[i].seed)) {
            b.fail(entries[i].path, json{{"other_path", other.path},
                                         {"seed", canonical_form(entries[i].seed)},
                                         {"other_seed", canonical_form(other.seed)}});
        }
    }
    return b.done();
}

inline std::vector<std::int64_t> key_of(std::initializer_list<const IntMatrix*> parts) {
    std::vector<std::int64_t> key;
    for (const auto* m : parts) {
        key.push_back(static_cast<std::int64_t>(m->rows()));
        key.insert(key.end(), m->data().begin(), m->data().end());
    }
    return key;
}

inline CheckRecord check_c_determines_seed(const ExplorationAtlas& atlas) {
    return check_key_determines_seed(atlas, "c_determines_seed",
                                     [](const AtlasEntry& e) { return key_of({&e.c}); });
}

inline CheckRecord check_g_determines_seed(const ExplorationAtlas& atlas) {
    return check_key_determines_seed(atlas, "g_determines_seed",
                                     [](const AtlasEntry& e) { return key_of({&e.g}); });
}

inline CheckRecord check_triple_determines_seed(const ExplorationAtlas& atlas) {
    return check_key_determines_seed(atlas, "triple_determines_seed", [](const AtlasEntry& e) {
        const IntMatrix b = e.seed.exchange();
        return key_of({&e.g, &e.c, &b});
    });
}

// Replaying each witness path from the origin reproduces the stored seed.
inline CheckRecord check_atlas_replay(const ExplorationAtlas& atlas) {
    CheckBuilder b("atlas_replay", atlas.size());
    EngineOptions quiet;
    quiet.assertions = false;
    for (const auto& e : atlas.entries()) {
        try {
            if (!(replay(atlas.origin(), e.path, quiet) == e.seed)) {
                b.fail(e.path, json{{"stored", canonical_form(e.seed)}});
            }
        } catch (const cluster_error& ex) {
            b.fail(e.path, json{{"error", ex.what()}});
        }
    }
    return b.done();
}

// --- negative controls ------------------------------------------------

enum class Canary { flip_sign, perturb_c, incoherent_c, collide_c };

inline std::optional<Canary> parse_canary(std::string_view name) {
    if (name == "flip-sign") return Canary::flip_sign;
    if (name == "perturb-c") return Canary::perturb_c;
    if (name == "incoherent-c") return Canary::incoherent_c;
    if (name == "collide-c") return Canary::collide_c;
    return std::nullopt;
}

inline const char* to_string(Canary c) {
    switch (c) {
        case Canary::flip_sign: return "flip-sign";
        case Canary::perturb_c: return "perturb-c";
        case Canary::incoherent_c: return "incoherent-c";
        case Canary::collide_c: return "collide-c";
    }
    return "?";
}

// Corrupts the first non-origin entry (the second one for collide-c).
inline void inject_canary(ExplorationAtlas& atlas, Canary canary) {
    auto& entries = atlas.mutable_entries();
    if (entries.size() < (canary == Canary::collide_c ? 3u : 2u)) {
        throw cluster_error(std::string("atlas too small for canary ") + to_string(canary));
    }
    auto& target = entries[1];
    switch (canary) {
        case Canary::flip_sign: {
            // negate one coefficient of one cluster variable
            auto vars = target.seed.variables();
            const std::size_t k = static_cast<std::size_t>(target.path.back() - 1);
            LaurentPoly flipped = vars[k];
            const auto& [mono, c] = *flipped.terms().begin();
            const Monomial m = mono;
            const Integer coeff = c;
            flipped.add_term(m, -2 * coeff);
            vars[k] = std::move(flipped);
            target.seed = Seed(target.seed.initial_matrix(), std::move(vars), target.seed.extended());
            break;
        }
        case Canary::perturb_c:
            target.c(0, 0) = checked::add(target.c(0, 0), 1);
            break;
        case Canary::incoherent_c:
            for (std::size_t i = 0; i < target.c.rows(); ++i) target.c(i, 0) = i % 2 == 0 ? 1 : -1;
            break;
        case Canary::collide_c:
            entries[2].c = entries[1].c;
            break;
    }
}

// --- full suite ---------------------------------------------------------

struct SuiteOptions {
    ExploreOptions explore;
    std::optional<Canary> canary;
};

inline Regime classify(const IntMatrix& b0, std::optional<SkewSymmetrizer>& s) {
    s = find_skew_symmetrizer(b0);
    if (s) return Regime::skew_symmetrizable;
    if (is_acyclic(b0)) return Regime::acyclic_sign_skew_symmetric;
    return Regime::sign_skew_symmetric;
}

// Explores, then runs every check that applies to the input's regime:
//  - skew-symmetrizable: all checks;
//  - acyclic sign-skew-symmetric: no symmetrizer, so duality and the C-only
//    and G-only injectivity checks are skipped and F-polynomials are only
//    required to have constant term 1;
//  - other sign-skew-symmetric: only the structural checks run.
inline VerificationReport run_full_suite(const IntMatrix& b0, std::size_t depth,
                                         const SuiteOptions& opts = {}) {
    VerificationReport report;
    report.initial = b0;
    report.depth = depth;
    if (opts.canary) report.canary = to_string(*opts.canary);

    if (!b0.is_square() || !is_sign_skew_symmetric(b0)) {
        CheckRecord r;
        r.check = "configuration";
        r.status = Status::error;
        r.note = b0.is_square() ? "initial exchange matrix is not sign-skew-symmetric"
                                : "initial exchange matrix is not square";
        report.checks.push_back(std::move(r));
        return report;
    }
    const Regime regime = classify(b0, report.symmetrizer);
    report.regime = regime;

    std::optional<ExplorationAtlas> atlas;
    try {
        atlas = explore(b0, depth, opts.explore);
    } catch (const assertion_failure& e) {
        CheckRecord r;
        r.check = "exploration";
        r.status = Status::fail;
        r.witness_path = e.path();
        r.counterexample = json{{"error", e.what()}};
        report.checks.push_back(std::move(r));
        return report;
    } catch (const cluster_error& e) {
        CheckRecord r;
        r.check = "exploration";
        r.status = Status::error;
        r.note = e.what();
        report.checks.push_back(std::move(r));
        return report;
    }

    if (opts.canary) inject_canary(*atlas, *opts.canary);

    report.explored = true;
    report.closed = atlas->closed();
    report.seeds = atlas->size();
    report.distinct_cluster_variables = atlas->distinct_cluster_variables();
    report.layer_sizes = atlas->layer_sizes();

    const bool symmetrizable = regime == Regime::skew_symmetrizable;
    const bool guaranteed = regime != Regime::sign_skew_symmetric;
    const std::string no_s = "requires a skew-symmetrizer";
    const std::string no_claim = "no guarantee for cyclic non-skew-symmetrizable input";

    auto& checks = report.checks;
    checks.push_back(check_atlas_replay(*atlas));
    checks.push_back(guaranteed ? check_recurrence_agreement(*atlas)
                                : skipped_check("recurrence_agreement", no_claim));
    checks.push_back(guaranteed ? check_positivity(*atlas) : skipped_check("positivity", no_claim));
    checks.push_back(guaranteed ? check_sign_coherence(*atlas)
                                : skipped_check("sign_coherence", no_claim));
    checks.push_back(guaranteed ? check_separation(*atlas)
                                : skipped_check("separation_formula", no_claim));
    checks.push_back(symmetrizable  ? check_f_polynomials(*atlas, true)
                     : guaranteed   ? check_f_polynomials(*atlas, false)
                                    : skipped_check("f_polynomial_constant_term", no_claim));
    checks.push_back(symmetrizable ? check_duality(*atlas, *report.symmetrizer)
                                   : skipped_check("duality", no_s));
    checks.push_back(symmetrizable ? check_lemma_identity_seed(*atlas)
                                   : skipped_check("identity_g_is_origin", no_s));
    checks.push_back(symmetrizable ? check_c_determines_seed(*atlas)
                                   : skipped_check("c_determines_seed", no_s));
    checks.push_back(symmetrizable ? check_g_determines_seed(*atlas)
                                   : skipped_check("g_determines_seed", no_s));
    checks.push_back(check_triple_determines_seed(*atlas));
    return report;
}

inline json to_json(const CheckRecord& r) {
    json j{{"check", r.check}, {"status", to_string(r.status)}, {"seeds_covered", r.seeds_covered}};
    if (r.failures) j["failures"] = r.failures;
    if (r.witness_path) j["witness_path"] = *r.witness_path;
    if (r.counterexample) j["counterexample"] = *r.counterexample;
    if (r.note) j["note"] = *r.note;
    return j;
}

inline json to_json(const VerificationReport& r) {
    json j;
    j["v"] = 1;
    j["B"] = to_json(r.initial);
    j["depth"] = r.depth;
    j["regime"] = r.regime ? json(to_string(*r.regime)) : json(nullptr);
    j["symmetrizer"] = r.symmetrizer ? json(r.symmetrizer->diag()) : json(nullptr);
    if (r.canary) j["canary"] = *r.canary;
    if (r.explored) {
        j["exploration"] = json{{"closed", r.closed},
                                {"truncated", !r.closed},
                                {"seeds", r.seeds},
                                {"distinct_cluster_variables", r.distinct_cluster_variables},
                                {"layer_sizes", r.layer_sizes}};
    }
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    j["checks"] = std::move(checks);
    j["summary"] = json{{"passed", r.count(Status::pass)},
                        {"failed", r.count(Status::fail)},
                        {"skipped", r.count(Status::skipped)},
                        {"errors", r.count(Status::error)}};
    return j;
}

// CI exit code: 0 all pass, 1 configuration/engine error, 2 property
// failure, 3 truncated without failure when closure is required.
inline int exit_code(const VerificationReport& r, bool require_closure) {
    if (r.has_failures()) return 2;
    if (r.has_errors()) return 1;
    if (require_closure && r.truncated()) return 3;
    return 0;
}

}  // namespace cluster
