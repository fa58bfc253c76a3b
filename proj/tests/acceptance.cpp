// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <cluster/cluster.hpp>

#include <iostream>
#include <map>
#include <sstream>

using namespace cluster;

namespace {

struct Instance {
    std::string name;
    IntMatrix b;
    std::size_t depth;
    std::vector<std::int64_t> symmetrizer;  // expected; empty when none exists
    bool closes;
};

const std::vector<Instance>& instances() {
    static const std::vector<Instance> all{
        {"A2", IntMatrix{{0, 1}, {-1, 0}}, 20, {1, 1}, true},
        {"A3", IntMatrix{{0, 1, 0}, {-1, 0, 1}, {0, -1, 0}}, 20, {1, 1, 1}, true},
        {"B2", IntMatrix{{0, 1}, {-2, 0}}, 20, {2, 1}, true},
        {"G2", IntMatrix{{0, 1}, {-3, 0}}, 20, {3, 1}, true},
        {"affine", IntMatrix{{0, 2}, {-2, 0}}, 5, {1, 1}, false},
        {"acyclic", IntMatrix{{0, 1, 1}, {-1, 0, 1}, {-2, -3, 0}}, 5, {}, false},
    };
    return all;
}

std::map<std::string, VerificationReport> run_reports() {
    std::map<std::string, VerificationReport> out;
    for (const auto& inst : instances()) out.emplace(inst.name, run_full_suite(inst.b, inst.depth));
    return out;
}

struct Verdict {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [" << what << "]";
        }
    }
};

bool passed(const VerificationReport& r, const char* check) {
    const auto* c = r.find(check);
    return c && c->status == Status::pass;
}

bool failed_with_witness(const VerificationReport& r, const char* check) {
    const auto* c = r.find(check);
    return c && c->status == Status::fail && c->witness_path.has_value();
}

void require_checks(Verdict& v, const std::map<std::string, VerificationReport>& reports,
                    const std::vector<std::string>& names, std::initializer_list<const char*> checks) {
    for (const auto& name : names) {
        const auto& r = reports.at(name);
        for (const char* check : checks) v.require(passed(r, check), name + " " + check);
    }
}

const std::vector<std::string> finite_types{"A2", "A3", "B2", "G2"};

}  // namespace

int main() {
    const auto reports = run_reports();
    int failures = 0;
    const auto line = [&](const std::string& name, Verdict& v) {
        if (!v.ok) ++failures;
        std::cout << (v.ok ? "PASS  " : "FAIL  ") << name << v.detail.str() << std::endl;
    };

    {
        Verdict v;
        for (const auto& n : finite_types) v.require(reports.at(n).closed, n + " closed");
        require_checks(v, reports, finite_types, {"c_determines_seed"});
        line("C-matrix determines the seed over all labeled seeds of A2, A3, B2, G2", v);
    }
    {
        Verdict v;
        for (const auto& n : finite_types) v.require(reports.at(n).closed, n + " closed");
        require_checks(v, reports, finite_types, {"g_determines_seed"});
        line("G-matrix determines the seed over all labeled seeds of A2, A3, B2, G2", v);
    }
    {
        Verdict v;
        for (const auto& inst : instances()) {
            if (!inst.closes) continue;
            const auto& r = reports.at(inst.name);
            v.require(r.symmetrizer && r.symmetrizer->diag() == inst.symmetrizer, inst.name + " symmetrizer");
        }
        require_checks(v, reports, finite_types, {"duality"});
        line("Duality identities and det G = +-1 at every seed, S = diag(1,1), diag(1,1,1), diag(2,1), diag(3,1)", v);
    }
    {
        Verdict v;
        v.require(reports.at("affine").explored && !reports.at("affine").closed, "affine truncated");
        require_checks(v, reports, {"A2", "A3", "B2", "G2", "affine"}, {"positivity", "sign_coherence"});
        line("Positivity and C-column sign-coherence on the closed atlases and affine [[0,2],[-2,0]] at depth 5", v);
    }
    {
        Verdict v;
        require_checks(v, reports, {"A2", "A3", "B2", "G2", "affine", "acyclic"}, {"separation_formula"});
        line("Separation formula rebuilds every cluster variable exactly", v);
    }
    {
        Verdict v;
        require_checks(v, reports, {"A2", "A3", "B2", "G2", "affine"}, {"f_polynomial_shape"});
        require_checks(v, reports, {"acyclic"}, {"f_polynomial_constant_term"});
        line("F-polynomials: constant term 1 and a unique maximal monomial; constant term 1 for the acyclic input", v);
    }
    {
        Verdict v;
        require_checks(v, reports, finite_types, {"identity_g_is_origin"});
        line("G = I occurs only at the origin in every closed atlas", v);
    }
    {
        Verdict v;
        const auto& r = reports.at("acyclic");
        v.require(!r.symmetrizer.has_value(), "symmetrizer should be absent");
        v.require(r.regime == Regime::acyclic_sign_skew_symmetric, "regime");
        v.require(r.explored && r.depth == 5, "depth-5 exploration");
        v.require(!r.has_failures() && !r.has_errors(), "no failing checks");
        require_checks(v, reports, {"acyclic"}, {"triple_determines_seed"});
        if (v.ok) v.detail << " (" << r.seeds << " seeds)";
        line("(G, C, B) determines the seed for acyclic [[0,1,1],[-1,0,1],[-2,-3,0]] at depth 5", v);
    }
    {
        Verdict v;
        const IntMatrix a2 = instances()[0].b;
        ExploreOptions multi;
        multi.workers = 4;
        const auto one = explore(a2, 20);
        const auto again = explore(a2, 20);
        const auto four = explore(a2, 20, multi);
        for (const auto* atlas : {&one, &again, &four}) {
            v.require(atlas->closed(), "closed");
            v.require(atlas->size() == 10, "10 seeds, got " + std::to_string(atlas->size()));
            v.require(atlas->distinct_cluster_variables() == 5, "5 variables");
        }
        v.require(atlas_to_json(one) == atlas_to_json(again), "repeat run differs");
        v.require(atlas_to_json(one) == atlas_to_json(four), "multi-worker run differs");
        line("A2 closes with 10 labeled seeds and 5 cluster variables, identical across runs and worker counts", v);
    }
    {
        Verdict v;
        SuiteOptions flip, perturb;
        flip.canary = Canary::flip_sign;
        perturb.canary = Canary::perturb_c;
        const auto flipped = run_full_suite(instances()[0].b, 20, flip);
        const auto perturbed = run_full_suite(instances()[1].b, 20, perturb);
        v.require(failed_with_witness(flipped, "positivity"), "flip-sign positivity");
        v.require(exit_code(flipped, false) == 2, "flip-sign exit code");
        v.require(failed_with_witness(perturbed, "duality"), "perturb-c duality");
        v.require(failed_with_witness(perturbed, "recurrence_agreement"), "perturb-c recurrence");
        v.require(exit_code(perturbed, false) == 2, "perturb-c exit code");
        line("Negative controls: flip-sign and perturb-c canaries fail with a witness path", v);
    }

    std::cout << (failures ? "acceptance: FAILED" : "acceptance: all criteria pass") << std::endl;
    return failures ? 1 : 0;
}
