// cluster-tool: command-line front end for the seed engine and verifier.
//
//   cluster-tool mutate  <matrix.json> [--path 1,2,...] [--json out.json] [--no-assert]
//   cluster-tool explore <matrix.json> --depth D [--max-seeds N] [--workers W] [--json out.json]
//   cluster-tool verify  <matrix.json> --depth D [--require-closure] [--canary KIND] [--json report.json]
//   cluster-tool serve   [--host H] [--port P] [--snapshot state.json]

#include <cluster/cluster.hpp>
#include <cluster/service.hpp>

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

namespace {

using namespace cluster;

constexpr int exit_usage_error = 1;

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw cluster_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

std::string matrix_text(const IntMatrix& m) {
    std::ostringstream os;
    os << m;
    return os.str();
}

void print_seed(std::ostream& os, const json& payload) {
    os << "path: " << payload["path"].dump() << '\n';
    const auto n = payload["n"].get<std::size_t>();
    for (std::size_t i = 0; i < n; ++i) {
        os << "x" << (i + 1) << " = " << payload["variables"][i].get<std::string>() << '\n';
    }
    os << "Bt = " << payload["Bt"].dump() << '\n';
    os << "C  = " << payload["C"].dump() << '\n';
    os << "G  = " << payload["G"].dump() << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        os << "g" << (i + 1) << " = " << payload["g_vectors"][i].dump() << "   F" << (i + 1)
           << " = " << payload["f_polynomials"][i].get<std::string>() << '\n';
    }
    os << "sign-coherent columns: " << payload["sign_coherent"].dump() << '\n';
    if (!payload["duality"].is_null()) {
        os << "duality (S = " << payload["duality"]["symmetrizer"].dump()
           << "): " << (payload["duality"]["holds"].get<bool>() ? "holds" : "FAILS") << '\n';
    }
}

int cmd_mutate(const std::string& file, const std::vector<int>& path, const std::string& json_out,
               bool no_assert) {
    const IntMatrix b = load_matrix_file(file);
    EngineOptions engine;
    engine.assertions = !no_assert;
    Seed s = new_principal_seed(b);
    std::vector<int> done;
    try {
        for (int k : path) {
            done.push_back(k);
            s = mutate_seed(s, Direction::from_one_based(k), engine);
        }
    } catch (assertion_failure& e) {
        e.set_path(done);
        throw;
    }
    const json payload = seed_payload(s, path);
    if (!json_out.empty()) {
        write_json(json_out, payload);
    } else {
        print_seed(std::cout, payload);
    }
    return 0;
}

int cmd_explore(const std::string& file, std::size_t depth, const ExploreOptions& opts,
                const std::string& json_out) {
    const auto atlas = explore(load_matrix_file(file), depth, opts);
    if (!json_out.empty()) write_json(json_out, atlas_to_json(atlas));
    std::cout << "seeds: " << atlas.size() << '\n'
              << "distinct cluster variables: " << atlas.distinct_cluster_variables() << '\n'
              << "layers: " << json(atlas.layer_sizes()).dump() << '\n'
              << (atlas.closed() ? "closure reached" : "truncated at depth bound") << '\n';
    if (json_out.empty()) {
        for (const auto& e : atlas.entries()) {
            std::cout << json(e.path).dump() << "  C=" << matrix_text(e.c) << "  G=" << matrix_text(e.g)
                      << '\n';
        }
    }
    return 0;
}

int cmd_verify(const std::string& file, std::size_t depth, const SuiteOptions& opts,
               bool require_closure, const std::string& json_out) {
    const auto report = run_full_suite(load_matrix_file(file), depth, opts);
    const json j = to_json(report);
    if (!json_out.empty()) write_json(json_out, j);
    for (const auto& c : report.checks) {
        std::cout << std::left << std::setw(28) << c.check << to_string(c.status);
        if (c.status != Status::skipped) std::cout << "  (" << c.seeds_covered << " seeds)";
        if (c.witness_path) std::cout << "  witness " << json(*c.witness_path).dump();
        if (c.note) std::cout << "  " << *c.note;
        std::cout << '\n';
    }
    if (report.explored) {
        std::cout << (report.closed ? "closure reached" : "TRUNCATED at depth bound") << ": "
                  << report.seeds << " seeds, " << report.distinct_cluster_variables
                  << " distinct cluster variables\n";
    }
    return exit_code(report, require_closure);
}

httplib::Server* running_server = nullptr;

void stop_server(int) {
    if (running_server) running_server->stop();
}

int cmd_serve(const std::string& host, int port, const std::string& snapshot, bool no_assert) {
    EngineOptions engine;
    engine.assertions = !no_assert;
    Service service(engine);
    if (!snapshot.empty()) service.load_snapshot(snapshot);
    httplib::Server server;
    service.bind(server);
    if (!server.bind_to_port(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << '\n';
        return exit_usage_error;
    }
    running_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    std::cerr << "serving on http://" << host << ":" << port << '\n';
    server.listen_after_bind();
    running_server = nullptr;
    if (!snapshot.empty()) service.save_snapshot(snapshot);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cluster algebra seed engine and verifier"};
    app.require_subcommand(1);

    std::string file;
    std::string json_out;
    std::vector<int> path;
    std::size_t depth = 6;
    std::size_t max_seeds = 200000;
    unsigned workers = 1;
    bool no_assert = false;
    bool require_closure = false;
    std::string canary;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string snapshot;

    auto* mutate = app.add_subcommand("mutate", "Apply a mutation path and print the resulting seed");
    mutate->add_option("matrix", file, "Matrix literal JSON file")->required()->check(CLI::ExistingFile);
    mutate->add_option("--path,path_list", path, "Mutation directions (1-based)")->delimiter(',');
    mutate->add_option("--json", json_out, "Write the seed payload to this file");
    mutate->add_flag("--no-assert", no_assert, "Disable positivity/homogeneity assertions");

    auto* explore_cmd = app.add_subcommand("explore", "Breadth-first exploration of labeled seeds");
    explore_cmd->add_option("matrix", file, "Matrix literal JSON file")->required()->check(CLI::ExistingFile);
    explore_cmd->add_option("--depth", depth, "Depth bound")->capture_default_str();
    explore_cmd->add_option("--max-seeds", max_seeds, "Seed budget")->capture_default_str();
    explore_cmd->add_option("--workers", workers, "Worker threads")->capture_default_str();
    explore_cmd->add_option("--json", json_out, "Write the atlas to this file");
    explore_cmd->add_flag("--no-assert", no_assert, "Disable positivity/homogeneity assertions");

    auto* verify = app.add_subcommand("verify", "Explore and run the full property suite");
    verify->add_option("matrix", file, "Matrix literal JSON file")->required()->check(CLI::ExistingFile);
    verify->add_option("--depth", depth, "Depth bound")->capture_default_str();
    verify->add_option("--max-seeds", max_seeds, "Seed budget")->capture_default_str();
    verify->add_option("--workers", workers, "Worker threads")->capture_default_str();
    verify->add_flag("--require-closure", require_closure, "Exit 3 when the depth bound truncates the search");
    verify->add_flag("--no-assert", no_assert, "Disable positivity/homogeneity assertions");
    verify->add_option("--canary", canary, "Corrupt the atlas before checking")
        ->check(CLI::IsMember({"flip-sign", "perturb-c", "incoherent-c", "collide-c"}));
    verify->add_option("--json", json_out, "Write the report to this file");

    auto* serve = app.add_subcommand("serve", "Run the HTTP+JSON session service");
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--snapshot", snapshot, "Load sessions from / save sessions to this file");
    serve->add_flag("--no-assert", no_assert, "Disable positivity/homogeneity assertions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; every other parse problem is a usage error
        return app.exit(e) == 0 ? 0 : exit_usage_error;
    }

    ExploreOptions explore_opts;
    explore_opts.max_seeds = max_seeds;
    explore_opts.workers = workers;
    explore_opts.engine.assertions = !no_assert;

    try {
        if (*mutate) return cmd_mutate(file, path, json_out, no_assert);
        if (*explore_cmd) return cmd_explore(file, depth, explore_opts, json_out);
        if (*verify) {
            SuiteOptions opts;
            opts.explore = explore_opts;
            if (!canary.empty()) opts.canary = parse_canary(canary);
            return cmd_verify(file, depth, opts, require_closure, json_out);
        }
        if (*serve) return cmd_serve(host, port, snapshot, no_assert);
    } catch (const assertion_failure& e) {
        std::cerr << "error: " << e.what() << " (path " << json(e.path()).dump() << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage_error;
    }
    return exit_usage_error;
}
