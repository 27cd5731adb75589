#include "doctest.h"

#include "camo/server.hpp"
#include "study_fixture.hpp"
#include "temp_dir.hpp"

#include "httplib.h"
#include "json.hpp"

using namespace camo;
using nlohmann::json;

TEST_CASE("study HTTP API") {
    testing_support::TempDir dir("server");
    const auto m = testing_support::write_study_assets(dir.path(), 6, {"ours", "random"});
    StudyService svc(m, dir.path(), dir / "log.jsonl", 9);
    ServerOptions opt;
    opt.port = 0;
    opt.admin_token = "secret";
    StudyServer server(svc, opt);
    const int port = server.start();
    REQUIRE(port > 0);
    httplib::Client cli("127.0.0.1", port);

    auto res = cli.Post("/session", R"({"participant_id":"p1"})", "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const json session = json::parse(res->body);
    CHECK(session["trial_count"] == 6);
    const std::string token = session["session_token"];

    res = cli.Post("/session", R"({"participant_id":"p1"})", "application/json");
    CHECK(res->status == 409);
    res = cli.Post("/session", "not json", "application/json");
    CHECK(res->status == 400);

    const httplib::Headers auth = {{"X-Session-Token", token}};
    res = cli.Get("/trial/next", auth);
    REQUIRE(res->status == 200);
    json trial = json::parse(res->body);
    CHECK(trial["done"] == false);
    CHECK(trial["index"] == 0);
    CHECK(trial["is_training"] == true);
    CHECK(trial["time_limit"] == 60.0);
    const std::string id = trial["trial_id"];

    res = cli.Get(trial["image_url"].get<std::string>());
    REQUIRE(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "image/png");
    CHECK(res->body.substr(1, 3) == "PNG");

    res = cli.Get("/trial/" + id + "/outline");
    CHECK(res->status == 403);

    res = cli.Post("/trial/" + id + "/click", R"({"x":24.5,"y":14.5,"elapsed_ms":1200})", "application/json");
    REQUIRE(res->status == 200);
    const json click = json::parse(res->body);
    CHECK(click["hit"] == true);
    CHECK(click["timeout"] == false);
    CHECK(click["outline_url"] == "/trial/" + id + "/outline");

    res = cli.Post("/trial/" + id + "/click", R"({"x":1,"y":1,"elapsed_ms":100})", "application/json");
    CHECK(res->status == 409);
    res = cli.Get("/trial/" + id + "/outline");
    REQUIRE(res->status == 200);
    const auto png = svc.outline_png(id);
    CHECK(res->body == std::string(png.begin(), png.end()));

    res = cli.Get("/trial/next?token=" + token);
    trial = json::parse(res->body);
    const std::string id2 = trial["trial_id"];
    CHECK(id2 != id);
    res = cli.Post("/trial/" + id2 + "/click", R"({"x":null,"y":null,"elapsed_ms":60000})", "application/json");
    CHECK(json::parse(res->body)["timeout"] == true);
    CHECK(json::parse(res->body)["time_to_click"] == 60.0);

    CHECK(cli.Post("/trial/abcdef/click", R"({"x":1,"y":1,"elapsed_ms":10})", "application/json")->status == 404);
    CHECK(cli.Get("/trial/next", {{"X-Session-Token", "bogus"}})->status == 404);

    CHECK(cli.Get("/results.csv")->status == 403);
    CHECK(cli.Get("/results.csv?admin_token=wrong")->status == 403);
    res = cli.Get("/results.csv", {{"X-Admin-Token", "secret"}});
    REQUIRE(res->status == 200);
    CHECK(res->body.find("method") != std::string::npos);

    for (int i = 0; i < 4; ++i) {
        res = cli.Get("/trial/next", auth);
        const std::string tid = json::parse(res->body)["trial_id"];
        cli.Post("/trial/" + tid + "/click", R"({"x":null,"y":null,"elapsed_ms":500})", "application/json");
    }
    res = cli.Get("/trial/next", auth);
    CHECK(json::parse(res->body)["done"] == true);
    server.stop();
}
