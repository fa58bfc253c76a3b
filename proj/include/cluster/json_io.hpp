#pragma once

#include <cluster/checks.hpp>

#include <fstream>
#include <sstream>

namespace cluster {

inline IntMatrix matrix_from_json(const json& rows, const char* field) {
    if (!rows.is_array()) throw parse_error(std::string("\"") + field + "\" must be an array of rows");
    std::vector<std::vector<std::int64_t>> out;
    for (const auto& row : rows) {
        if (!row.is_array()) throw parse_error(std::string("\"") + field + "\" rows must be arrays");
        std::vector<std::int64_t> r;
        for (const auto& x : row) {
            if (!x.is_number_integer()) throw parse_error(std::string("\"") + field + "\" entries must be integers");
            r.push_back(x.get<std::int64_t>());
        }
        out.push_back(std::move(r));
    }
    return IntMatrix::from_rows(out);
}

// Matrix literal: {"n": N, "B": [[...]]} for an exchange matrix with
// principal coefficients implied, or {"n": N, "m": M, "Bt": [[...]]} for an
// explicit (m+n) x n extended matrix. Only principal extended matrices
// ([B; I_n]) are accepted as starting points; the exchange block is returned.
inline IntMatrix parse_matrix_literal(const json& j) {
    if (!j.is_object()) throw parse_error("matrix literal must be a JSON object");
    if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<std::int64_t>() < 1) {
        throw parse_error("matrix literal needs a positive integer \"n\"");
    }
    const auto n = static_cast<std::size_t>(j["n"].get<std::int64_t>());
    if (j.contains("B")) {
        IntMatrix b = matrix_from_json(j["B"], "B");
        if (b.rows() != n || b.cols() != n) {
            throw parse_error("\"B\" must be " + std::to_string(n) + "x" + std::to_string(n) +
                              ", got " + b.shape_string());
        }
        return b;
    }
    if (j.contains("Bt")) {
        if (!j.contains("m") || !j["m"].is_number_integer()) {
            throw parse_error("extended matrix literal needs an integer \"m\"");
        }
        const auto m = static_cast<std::size_t>(j["m"].get<std::int64_t>());
        IntMatrix bt = matrix_from_json(j["Bt"], "Bt");
        if (bt.rows() != n + m || bt.cols() != n) {
            throw parse_error("\"Bt\" must be " + std::to_string(n + m) + "x" + std::to_string(n) +
                              ", got " + bt.shape_string());
        }
        if (m != n || bt.block_rows(n, m) != IntMatrix::identity(n)) {
            throw parse_error("only principal coefficients are supported: \"Bt\" must be [B; I_n]");
        }
        return bt.block_rows(0, n);
    }
    throw parse_error("matrix literal needs \"B\" or \"Bt\"");
}

inline IntMatrix parse_matrix_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
    return parse_matrix_literal(j);
}

inline IntMatrix load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open matrix file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_matrix_text(ss.str());
}

// Everything a client needs to render a seed. Shared by the CLI and the
// HTTP service so both transports print identical payloads.
inline json seed_payload(const Seed& s, const std::vector<int>& path) {
    const std::size_t n = s.rank();
    const IntMatrix& b0 = s.initial_matrix();
    const IntMatrix c = s.c_matrix();
    const IntMatrix g = s.g_matrix();

    json vars = json::array();
    json fpolys = json::array();
    json gvecs = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        vars.push_back(to_string(s.variable(i)));
        fpolys.push_back(to_string(evaluate_x_at_one(s.variable(i))));
        gvecs.push_back(g.column(i));
    }
    json coherence = json::array();
    for (bool ok : column_sign_coherence(c)) coherence.push_back(ok);

    json j;
    j["v"] = 1;
    j["n"] = n;
    j["path"] = path;
    j["variables"] = std::move(vars);
    j["Bt"] = to_json(s.extended().full());
    j["B"] = to_json(s.exchange());
    j["C"] = to_json(c);
    j["G"] = to_json(g);
    j["g_vectors"] = std::move(gvecs);
    j["f_polynomials"] = std::move(fpolys);
    j["sign_coherent"] = std::move(coherence);
    if (auto sym = find_skew_symmetrizer(b0)) {
        const auto r = check_duality_identities(b0, *sym, s.exchange(), c, g);
        j["duality"] = json{{"symmetrizer", sym->diag()},
                            {"G_B_Sinv_Gt_eq_B0_Sinv", r.exchange_identity},
                            {"S_C_Sinv_Gt_eq_I", r.c_g_identity},
                            {"det_G_unit", r.unimodular},
                            {"holds", r.holds()}};
    } else {
        j["duality"] = nullptr;
    }
    j["fingerprint"] = Fingerprint::of(canonical_form(s)).hex();
    return j;
}

// Compact, stable serialization of a seed.
inline json seed_to_json(const Seed& s) {
    json vars = json::array();
    for (const auto& v : s.variables()) vars.push_back(to_string(v));
    return json{{"n", s.rank()},
                {"B0", to_json(s.initial_matrix())},
                {"Bt", to_json(s.extended().full())},
                {"variables", std::move(vars)}};
}

inline Seed seed_from_json(const json& j) {
    const auto n = j.at("n").get<std::size_t>();
    IntMatrix b0 = matrix_from_json(j.at("B0"), "B0");
    IntMatrix bt = matrix_from_json(j.at("Bt"), "Bt");
    std::vector<LaurentPoly> vars;
    for (const auto& t : j.at("variables")) vars.push_back(parse_laurent(t.get<std::string>(), {n, n}));
    return Seed(std::move(b0), std::move(vars), ExtendedExchangeMatrix(n, n, std::move(bt)));
}

inline json atlas_to_json(const ExplorationAtlas& atlas) {
    json seeds = json::array();
    for (const auto& e : atlas.entries()) {
        json vars = json::array();
        for (const auto& v : e.seed.variables()) vars.push_back(to_string(v));
        seeds.push_back(json{{"path", e.path},
                             {"layer", e.layer},
                             {"fingerprint", e.fingerprint.hex()},
                             {"variables", std::move(vars)},
                             {"B", to_json(e.seed.exchange())},
                             {"C", to_json(e.c)},
                             {"G", to_json(e.g)}});
    }
    return json{{"v", 1},
                {"B", to_json(atlas.origin().initial_matrix())},
                {"depth", atlas.depth_bound()},
                {"closed", atlas.closed()},
                {"seeds", atlas.size()},
                {"distinct_cluster_variables", atlas.distinct_cluster_variables()},
                {"layer_sizes", atlas.layer_sizes()},
                {"atlas", std::move(seeds)}};
}

}  // namespace cluster
