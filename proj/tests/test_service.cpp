#include <doctest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "oracles.hpp"
#include "tuba/api.hpp"
#include "tuba/service.hpp"

using namespace tuba;

namespace
{

const char* kJson = "application/json";

std::string robot_text() { return oracle::read_file(oracle::fixture("robot.json")); }

std::string upload(const Service& s)
{
  const HttpResponse r = s.handle("POST", "/models", robot_text(), kJson);
  REQUIRE(r.status == 200);
  return parse_json(r.body)["id"].get<std::string>();
}

}  // namespace

TEST_SUITE("service")
{
  TEST_CASE("upload is idempotent and the stored model is canonical")
  {
    Service s;
    const std::string id = upload(s);
    CHECK(upload(s) == id);
    CHECK(s.store().size() == 1);
    const HttpResponse got = s.handle("GET", "/models/" + id, "", "");
    CHECK(got.status == 200);
    CHECK(got.body == serialize_model(oracle::robot()));
  }

  TEST_CASE("error statuses")
  {
    Service s;
    const std::string id = upload(s);
    CHECK(s.handle("GET", "/models/nope", "", "").status == 404);
    CHECK(parse_json(s.handle("GET", "/models/nope", "", "").body)["error"]
          == "UnknownModel");
    CHECK(s.handle("GET", "/elsewhere", "", "").status == 404);
    CHECK(s.handle("DELETE", "/models/" + id, "", "").status == 405);
    CHECK(s.handle("POST", "/models", robot_text(), "text/plain").status == 415);
    CHECK(s.handle("POST", "/models", "{not json", kJson).status == 400);

    Json bad = parse_json(robot_text());
    bad["outcomes"].erase("Gather|Office");
    const HttpResponse invalid = s.handle("POST", "/models", bad.dump(), kJson);
    CHECK(invalid.status == 400);
    const Json body = parse_json(invalid.body);
    CHECK(body["error"] == "InvalidModel");
    CHECK(body["violations"][0]["field"] == "outcomes.Gather|Office");

    const std::string base = "/models/" + id;
    CHECK(s.handle("POST", base + "/cut", R"({"k": 12})", kJson).status == 422);
    CHECK(s.handle("POST", base + "/cut", R"({"k": 2, "tolerance": 0.1})", kJson).status
          == 400);
    CHECK(s.handle("POST", base + "/cluster", R"({"weights": [1]})", kJson).status
          == 422);
    CHECK(s.handle("POST", base + "/cluster", R"({"colour": 1})", kJson).status == 400);
    CHECK(s.handle("POST", base + "/decide", "{}", kJson).status == 422);
    CHECK(s.handle("POST", base + "/explode", "{}", kJson).status == 404);
  }

  TEST_CASE("reweighting per request leaves the stored model alone")
  {
    Service s;
    const std::string id = upload(s);
    const std::string base = "/models/" + id;
    const HttpResponse cut =
        s.handle("POST", base + "/cut", R"({"weights": [0.9, 0.1], "k": 3})", kJson);
    REQUIRE(cut.status == 200);
    CHECK(oracle::as_groups(partition_from_json(parse_json(cut.body)))
          == std::set<std::set<std::string>>{{"Office", "Restroom", "Class"},
                                             {"Hallway", "Stairwell"},
                                             {"Closet"}});
    CHECK(s.handle("GET", base, "", "").body == serialize_model(oracle::robot()));

    const HttpResponse plain = s.handle("POST", base + "/cut", R"({"k": 4})", kJson);
    const Partition four = partition_from_json(parse_json(plain.body));
    CHECK(oracle::as_groups(four).count({"Hallway", "Office", "Class"}) == 1);
  }

  TEST_CASE("responses equal the shared body builders")
  {
    Service s;
    const std::string id = upload(s);
    const UtilityModel robot = oracle::robot();
    api::ClusterRequest cr;
    cr.format = RenderFormat::Text;
    const HttpResponse text =
        s.handle("POST", "/models/" + id + "/cluster", R"({"format": "text"})", kJson);
    CHECK(text.body == api::cluster_body(robot, cr));
    CHECK(text.content_type.rfind("text/plain", 0) == 0);

    const std::string decide_req =
        R"({"dist": {"probs": {"Hallway": 0.5, "Closet": 0.5, "Office": 0,
            "Stairwell": 0, "Restroom": 0, "Class": 0}}, "rule": "minimax"})";
    const HttpResponse decided = s.handle("POST", "/models/" + id + "/decide",
                                          decide_req, kJson);
    REQUIRE(decided.status == 200);
    CHECK(decided.body
          == api::decide_body(robot, api::decide_request_from_json(parse_json(decide_req))));
  }

  TEST_CASE("state directory snapshots")
  {
    const auto dir = std::filesystem::temp_directory_path() / "tuba_state_test";
    std::filesystem::remove_all(dir);
    std::string id;
    {
      Service s(dir);
      id = upload(s);
    }
    CHECK(std::filesystem::exists(dir / (id + ".json")));
    Service restored(dir);
    CHECK(restored.handle("GET", "/models/" + id, "", "").status == 200);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("HTTP front end")
  {
    Service s;
    HttpServer server(s);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread t([&] { server.run(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    const auto up = client.Post("/models", robot_text(), kJson);
    REQUIRE(up);
    CHECK(up->status == 200);
    CHECK(up->get_header_value("Access-Control-Allow-Origin") == "*");
    const std::string id = parse_json(up->body)["id"].get<std::string>();

    const auto cut = client.Post("/models/" + id + "/cut", R"({"k": 2})", kJson);
    REQUIRE(cut);
    CHECK(cut->status == 200);
    CHECK(cut->body == s.handle("POST", "/models/" + id + "/cut", R"({"k": 2})", kJson).body);

    const auto missing = client.Get("/models/zzz");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    const auto wrong_type = client.Post("/models", robot_text(), "text/plain");
    REQUIRE(wrong_type);
    CHECK(wrong_type->status == 415);

    const auto preflight = client.Options("/models");
    REQUIRE(preflight);
    CHECK(preflight->status == 204);

    // Concurrent readers.
    std::vector<std::thread> readers;
    std::atomic<int> ok{0};
    for (int i = 0; i < 8; ++i)
    {
      readers.emplace_back([&] {
        httplib::Client c("127.0.0.1", port);
        const auto r = c.Post("/models/" + id + "/decide",
                              R"({"dist": {"probs": {"Hallway": 1, "Closet": 0,
                                  "Office": 0, "Stairwell": 0, "Restroom": 0,
                                  "Class": 0}}})",
                              kJson);
        if (r && r->status == 200)
        {
          ++ok;
        }
      });
    }
    for (auto& r : readers)
    {
      r.join();
    }
    CHECK(ok == 8);

    server.stop();
    t.join();
  }
}
