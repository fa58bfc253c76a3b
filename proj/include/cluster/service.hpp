#pragma once

#include <cluster/session.hpp>

#include <httplib.h>

#include <charconv>
#include <fstream>
#include <optional>

namespace cluster {

struct Response {
    int status = 200;
    json body;
};

// HTTP+JSON front end over a SessionStore. Every body carries "v": 1.
class Service {
public:
    static constexpr int protocol_version = 1;

    explicit Service(EngineOptions engine = {}) : store_(engine), engine_(engine) {}

    SessionStore& store() noexcept { return store_; }

    Response create_session(const std::string& body) {
        return guarded([&] {
            const IntMatrix b = parse_matrix_text(body);
            const std::string id = store_.create(b);
            return store_.with_session(id, [&](Session& s) { return seed_response(s); });
        });
    }

    Response get_session(const std::string& id) {
        return guarded([&] { return store_.with_session(id, [&](Session& s) { return seed_response(s); }); });
    }

    Response mutate(const std::string& id, const std::string& body) {
        return guarded([&] {
            json req = parse_body(body);
            if (!req.contains("k") || !req["k"].is_number_integer()) {
                throw parse_error("mutate request needs an integer \"k\"");
            }
            const auto k = Direction::from_one_based(req["k"].get<long long>());
            return store_.with_session(id, [&](Session& s) {
                s.mutate(k);
                return seed_response(s);
            });
        });
    }

    Response undo(const std::string& id) {
        return guarded([&] {
            return store_.with_session(id, [&](Session& s) {
                s.undo();
                return seed_response(s);
            });
        });
    }

    Response history(const std::string& id) {
        return guarded([&] {
            return store_.with_session(id, [&](Session& s) {
                json steps = json::array();
                EngineOptions quiet;
                quiet.assertions = false;
                Seed seed = s.origin();
                for (const auto& step : s.history()) {
                    seed = mutate_seed(seed, step.k, quiet);
                    steps.push_back(json{{"k", step.k.one_based()},
                                         {"fingerprint", step.fingerprint.hex()},
                                         {"C", to_json(seed.c_matrix())}});
                }
                return Response{200, json{{"v", protocol_version},
                                          {"id", s.id()},
                                          {"origin_fingerprint", Fingerprint::of(canonical_form(s.origin())).hex()},
                                          {"history", std::move(steps)}}};
            });
        });
    }

    Response verify(const std::string& id, std::size_t depth, std::size_t max_seeds) {
        return guarded([&] {
            const IntMatrix b0 = store_.with_session(id, [](Session& s) { return s.origin().initial_matrix(); });
            SuiteOptions opts;
            opts.explore.engine = engine_;
            opts.explore.max_seeds = max_seeds;
            const auto report = run_full_suite(b0, depth, opts);
            json body = to_json(report);
            body["id"] = id;
            return Response{200, std::move(body)};
        });
    }

    // Registers the routes on an httplib server.
    void bind(httplib::Server& server) {
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, create_session(req.body));
        });
        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, get_session(req.matches[1]));
        });
        server.Post(R"(/sessions/([^/]+)/mutate)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        reply(res, mutate(req.matches[1], req.body));
                    });
        server.Post(R"(/sessions/([^/]+)/undo)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        reply(res, undo(req.matches[1]));
                    });
        server.Get(R"(/sessions/([^/]+)/history)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       reply(res, history(req.matches[1]));
                   });
        server.Get(R"(/sessions/([^/]+)/verify)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       auto number = [&](const char* key, std::size_t fallback) -> std::optional<std::size_t> {
                           if (!req.has_param(key)) return fallback;
                           const std::string text = req.get_param_value(key);
                           std::size_t value = 0;
                           const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
                           if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
                               return std::nullopt;
                           }
                           return value;
                       };
                       const auto depth = number("depth", 6);
                       const auto max_seeds = number("max_seeds", 20000);
                       if (!depth || !max_seeds) {
                           reply(res, error(400, "bad_request", "depth and max_seeds must be non-negative integers"));
                           return;
                       }
                       reply(res, verify(req.matches[1], *depth, *max_seeds));
                   });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return;
            const json body{{"v", protocol_version},
                            {"error", {{"code", "not_found"}, {"message", "no such endpoint"}}}};
            res.set_content(body.dump(), "application/json");
        });
    }

    void save_snapshot(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw cluster_error("cannot write snapshot " + path);
        out << store_.snapshot().dump(2) << '\n';
    }

    void load_snapshot(const std::string& path) {
        std::ifstream in(path);
        if (!in) return;
        store_.restore(json::parse(in));
    }

    static Response error(int status, const std::string& code, const std::string& message) {
        return {status, json{{"v", protocol_version}, {"error", {{"code", code}, {"message", message}}}}};
    }

private:
    Response seed_response(const Session& s) const {
        return {200, json{{"v", protocol_version}, {"id", s.id()}, {"seed", seed_payload(s.current(), s.path())}}};
    }

    static json parse_body(const std::string& body) {
        try {
            return json::parse(body);
        } catch (const json::exception& e) {
            throw parse_error(std::string("invalid JSON: ") + e.what());
        }
    }

    template <class Fn>
    static Response guarded(Fn&& fn) {
        try {
            return fn();
        } catch (const session_not_found& e) {
            return error(404, "not_found", e.what());
        } catch (const empty_history& e) {
            return error(409, "empty_history", e.what());
        } catch (const parse_error& e) {
            return error(400, "bad_request", e.what());
        } catch (const dimension_error& e) {
            return error(400, "bad_request", e.what());
        } catch (const index_error& e) {
            return error(400, "invalid_direction", e.what());
        } catch (const sign_pattern_error& e) {
            return error(422, "sign_pattern", e.what());
        } catch (const assertion_failure& e) {
            return error(422, "assertion_failure", e.what());
        } catch (const std::exception& e) {
            return error(500, "internal", e.what());
        }
    }

    static void reply(httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    }

    SessionStore store_;
    EngineOptions engine_;
};

}  // namespace cluster
