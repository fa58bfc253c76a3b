#include <cluster/service.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <thread>

using namespace cluster;

namespace {

const std::string A2_BODY = R"({"n":2,"B":[[0,1],[-1,0]]})";
const std::string B2_BODY = R"({"n":2,"B":[[0,1],[-2,0]]})";

std::string create(Service& svc, const std::string& body = A2_BODY) {
    const auto r = svc.create_session(body);
    EXPECT_EQ(r.status, 200) << r.body.dump();
    return r.body["id"].get<std::string>();
}

std::string mutate_body(int k) { return json{{"k", k}}.dump(); }

void expect_error(const Response& r, int status, const std::string& code) {
    EXPECT_EQ(r.status, status) << r.body.dump();
    EXPECT_EQ(r.body["v"], 1);
    EXPECT_EQ(r.body["error"]["code"], code) << r.body.dump();
    EXPECT_FALSE(r.body["error"]["message"].get<std::string>().empty());
}

}  // namespace

TEST(Service, CreateReturnsInitialSeed) {
    Service svc;
    const auto r = svc.create_session(A2_BODY);
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["v"], 1);
    const auto& seed = r.body["seed"];
    EXPECT_EQ(seed["path"], json::array());
    EXPECT_EQ(seed["variables"], (json{"x1", "x2"}));
    EXPECT_EQ(seed["C"], (json{{1, 0}, {0, 1}}));
    EXPECT_EQ(seed["G"], (json{{1, 0}, {0, 1}}));
    EXPECT_EQ(seed["f_polynomials"], (json{"1", "1"}));
    EXPECT_EQ(seed["duality"]["holds"], true);
    EXPECT_EQ(seed["duality"]["symmetrizer"], (json{1, 1}));
}

TEST(Service, AcceptsPrincipalExtendedMatrix) {
    Service svc;
    const auto r = svc.create_session(R"({"n":2,"m":2,"Bt":[[0,1],[-1,0],[1,0],[0,1]]})");
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["seed"]["B"], (json{{0, 1}, {-1, 0}}));
    expect_error(svc.create_session(R"({"n":2,"m":2,"Bt":[[0,1],[-1,0],[2,0],[0,1]]})"), 400, "bad_request");
}

TEST(Service, MutateMatchesEngine) {
    Service svc;
    const auto id = create(svc);
    const auto r = svc.mutate(id, mutate_body(1));
    ASSERT_EQ(r.status, 200);
    const auto& seed = r.body["seed"];
    EXPECT_EQ(seed["variables"][0], "x1^-1*x2 + x1^-1*y1");
    EXPECT_EQ(seed["C"], (json{{-1, 1}, {0, 1}}));
    EXPECT_EQ(seed["G"], (json{{-1, 0}, {1, 1}}));
    EXPECT_EQ(seed["f_polynomials"][0], "y1 + 1");
    EXPECT_EQ(seed["g_vectors"][0], (json{-1, 1}));
    // same payload as the CLI builds
    const IntMatrix a2{{0, 1}, {-1, 0}};
    const auto direct = seed_payload(mutate_seed(new_principal_seed(a2), Direction::from_one_based(1)), {1});
    EXPECT_EQ(seed.dump(), direct.dump());
}

TEST(Service, UndoRestoresPriorPayload) {
    Service svc;
    const auto id = create(svc, B2_BODY);
    const auto t0 = svc.get_session(id).body;
    ASSERT_EQ(svc.mutate(id, mutate_body(1)).status, 200);
    const auto t1 = svc.get_session(id).body;
    ASSERT_EQ(svc.mutate(id, mutate_body(2)).status, 200);
    EXPECT_EQ(svc.undo(id).body.dump(), t1.dump());
    EXPECT_EQ(svc.undo(id).body.dump(), t0.dump());
    expect_error(svc.undo(id), 409, "empty_history");
}

TEST(Service, HistoryRecordsStepsAndCMatrices) {
    Service svc;
    const auto id = create(svc);
    svc.mutate(id, mutate_body(1));
    svc.mutate(id, mutate_body(2));
    const auto h = svc.history(id);
    ASSERT_EQ(h.status, 200);
    ASSERT_EQ(h.body["history"].size(), 2u);
    EXPECT_EQ(h.body["history"][0]["k"], 1);
    EXPECT_EQ(h.body["history"][0]["C"], (json{{-1, 1}, {0, 1}}));
    EXPECT_EQ(h.body["history"][1]["k"], 2);
    EXPECT_EQ(h.body["history"][1]["fingerprint"], svc.get_session(id).body["seed"]["fingerprint"]);
}

TEST(Service, SessionsAreIsolated) {
    Service svc;
    const auto a = create(svc);
    const auto b = create(svc);
    EXPECT_NE(a, b);
    svc.mutate(a, mutate_body(1));
    svc.mutate(b, mutate_body(2));
    svc.mutate(a, mutate_body(2));
    EXPECT_EQ(svc.get_session(a).body["seed"]["path"], (json{1, 2}));
    EXPECT_EQ(svc.get_session(b).body["seed"]["path"], (json{2}));
    svc.undo(b);
    EXPECT_EQ(svc.get_session(a).body["seed"]["path"], (json{1, 2}));
}

TEST(Service, ConcurrentSessionsMatchSequentialReplay) {
    Service svc;
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) ids.push_back(create(svc, i % 2 ? B2_BODY : A2_BODY));
    {
        std::vector<std::jthread> threads;
        for (int i = 0; i < 4; ++i) {
            threads.emplace_back([&, i] {
                for (int step = 0; step < 6; ++step) svc.mutate(ids[i], mutate_body(1 + (step + i) % 2));
            });
        }
    }
    for (int i = 0; i < 4; ++i) {
        const IntMatrix b = parse_matrix_text(i % 2 ? B2_BODY : A2_BODY);
        std::vector<int> path;
        for (int step = 0; step < 6; ++step) path.push_back(1 + (step + i) % 2);
        const auto expected = seed_payload(replay(new_principal_seed(b), path), path);
        EXPECT_EQ(svc.get_session(ids[i]).body["seed"].dump(), expected.dump());
    }
}

TEST(Service, ErrorsAreStructured) {
    Service svc;
    const auto id = create(svc);
    expect_error(svc.create_session("{not json"), 400, "bad_request");
    expect_error(svc.create_session(R"({"n":2,"B":[[0,1]]})"), 400, "bad_request");
    expect_error(svc.create_session(R"({"n":2,"B":[[0,1],[1,0]]})"), 422, "sign_pattern");
    expect_error(svc.get_session("nope"), 404, "not_found");
    expect_error(svc.mutate(id, "{}"), 400, "bad_request");
    expect_error(svc.mutate(id, R"({"k":"1"})"), 400, "bad_request");
    expect_error(svc.mutate(id, mutate_body(3)), 400, "invalid_direction");
    expect_error(svc.mutate(id, mutate_body(0)), 400, "invalid_direction");
    expect_error(svc.mutate("nope", mutate_body(1)), 404, "not_found");
    // failed requests leave the session untouched
    EXPECT_EQ(svc.get_session(id).body["seed"]["path"], json::array());
}

TEST(Service, VerifyRunsSuiteFromOrigin) {
    Service svc;
    const auto id = create(svc);
    svc.mutate(id, mutate_body(1));
    const auto r = svc.verify(id, 12, 1000);
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["id"], id);
    EXPECT_EQ(r.body["exploration"]["closed"], true);
    EXPECT_EQ(r.body["exploration"]["seeds"], 10);
    EXPECT_EQ(r.body["summary"]["failed"], 0);
}

TEST(Service, SnapshotRoundTrip) {
    const auto path = (std::filesystem::temp_directory_path() / "cluster_service_snapshot.json").string();
    std::string a, b;
    json before;
    {
        Service svc;
        a = create(svc);
        b = create(svc, B2_BODY);
        svc.mutate(a, mutate_body(2));
        svc.mutate(b, mutate_body(1));
        svc.mutate(b, mutate_body(2));
        before = json{svc.get_session(a).body, svc.get_session(b).body};
        svc.save_snapshot(path);
    }
    Service restored;
    restored.load_snapshot(path);
    EXPECT_EQ(restored.store().size(), 2u);
    EXPECT_EQ((json{restored.get_session(a).body, restored.get_session(b).body}).dump(), before.dump());
    // ids keep counting from where the snapshot left off
    EXPECT_NE(create(restored), a);
    std::remove(path.c_str());
}

TEST(Service, MissingSnapshotStartsEmpty) {
    Service svc;
    svc.load_snapshot("/nonexistent/cluster_snapshot.json");
    EXPECT_EQ(svc.store().size(), 0u);
}

class HttpService : public ::testing::Test {
protected:
    void SetUp() override {
        service.bind(server);
        port = server.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port, 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    void TearDown() override {
        server.stop();
        if (thread.joinable()) thread.join();
    }

    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }

    Service service;
    httplib::Server server;
    int port = 0;
    std::thread thread;
};

TEST_F(HttpService, EndToEndSession) {
    auto cli = client();
    auto created = cli.Post("/sessions", A2_BODY, "application/json");
    ASSERT_TRUE(created);
    ASSERT_EQ(created->status, 200);
    const json t0 = json::parse(created->body);
    const std::string id = t0["id"];

    auto mutated = cli.Post("/sessions/" + id + "/mutate", mutate_body(1), "application/json");
    ASSERT_EQ(mutated->status, 200);
    EXPECT_EQ(json::parse(mutated->body)["seed"]["variables"][0], "x1^-1*x2 + x1^-1*y1");

    auto got = cli.Get("/sessions/" + id);
    EXPECT_EQ(got->body, mutated->body);

    auto history = cli.Get("/sessions/" + id + "/history");
    EXPECT_EQ(json::parse(history->body)["history"].size(), 1u);

    auto undone = cli.Post("/sessions/" + id + "/undo", "", "application/json");
    ASSERT_EQ(undone->status, 200);
    EXPECT_EQ(undone->body, t0.dump());

    auto verify = cli.Get("/sessions/" + id + "/verify?depth=12");
    ASSERT_EQ(verify->status, 200);
    EXPECT_EQ(json::parse(verify->body)["exploration"]["seeds"], 10);
}

TEST_F(HttpService, ErrorBodies) {
    auto cli = client();
    auto bad = cli.Post("/sessions", "[1,2", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
    EXPECT_EQ(json::parse(bad->body)["error"]["code"], "bad_request");

    auto missing = cli.Get("/sessions/s999");
    EXPECT_EQ(missing->status, 404);
    EXPECT_EQ(json::parse(missing->body)["error"]["code"], "not_found");

    auto unknown = cli.Get("/no/such/route");
    EXPECT_EQ(unknown->status, 404);
    EXPECT_EQ(json::parse(unknown->body)["v"], 1);

    const std::string id = json::parse(cli.Post("/sessions", A2_BODY, "application/json")->body)["id"];
    auto depth = cli.Get("/sessions/" + id + "/verify?depth=-3");
    EXPECT_EQ(depth->status, 400);
    EXPECT_EQ(json::parse(depth->body)["error"]["code"], "bad_request");
}

TEST_F(HttpService, InterleavedClientsStayIsolated) {
    auto cli = client();
    const std::string a = json::parse(cli.Post("/sessions", A2_BODY, "application/json")->body)["id"];
    const std::string b = json::parse(cli.Post("/sessions", B2_BODY, "application/json")->body)["id"];
    {
        std::vector<std::jthread> threads;
        for (const auto& [id, k] : std::vector<std::pair<std::string, int>>{{a, 1}, {b, 2}}) {
            threads.emplace_back([this, id, k] {
                auto c = client();
                for (int i = 0; i < 3; ++i) c.Post("/sessions/" + id + "/mutate", mutate_body(k), "application/json");
            });
        }
    }
    // three mutations in one direction leave one net mutation
    EXPECT_EQ(json::parse(cli.Get("/sessions/" + a)->body)["seed"]["path"], (json{1, 1, 1}));
    EXPECT_EQ(json::parse(cli.Get("/sessions/" + b)->body)["seed"]["path"], (json{2, 2, 2}));
    EXPECT_EQ(json::parse(cli.Get("/sessions/" + a)->body)["seed"]["variables"][0], "x1^-1*x2 + x1^-1*y1");
}

TEST_F(HttpService, VerifyRejectsMalformedNumbers) {
    auto cli = client();
    const std::string id = json::parse(cli.Post("/sessions", A2_BODY, "application/json")->body)["id"];
    for (const char* query : {"depth=abc", "depth=", "depth=4x", "max_seeds=-1"}) {
        auto r = cli.Get("/sessions/" + id + "/verify?" + query);
        ASSERT_TRUE(r);
        EXPECT_EQ(r->status, 400) << query;
    }
}
