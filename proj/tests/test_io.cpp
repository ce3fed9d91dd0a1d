#include <doctest.h>

#include "oracles.hpp"
#include "tuba/error.hpp"
#include "tuba/io.hpp"

using namespace tuba;

namespace
{

Error error_of(const std::function<void()>& f)
{
  try
  {
    f();
  }
  catch (const Error& e)
  {
    return e;
  }
  FAIL("no error raised");
  return Error(ErrorCode::Usage, "");
}

}  // namespace

TEST_SUITE("io")
{
  TEST_CASE("canonical text")
  {
    Json doc = Json::object();
    doc["b"] = 1;
    doc["a"] = Json::array({0.1, 2.5, -3});
    doc["nested"] = Json::object({{"x", nullptr}, {"y", true}});
    doc["list"] = Json::array({Json::object({{"k", "v"}})});
    const std::string text = canonical_dump(doc);
    CHECK(text
          == "{\n"
             "  \"b\": 1,\n"
             "  \"a\": [0.10000000000000001, 2.5, -3],\n"
             "  \"nested\": {\n"
             "    \"x\": null,\n"
             "    \"y\": true\n"
             "  },\n"
             "  \"list\": [\n"
             "    {\n"
             "      \"k\": \"v\"\n"
             "    }\n"
             "  ]\n"
             "}\n");
    CHECK(canonical_dump(Json::array()) == "[]\n");
    CHECK(canonical_dump(Json::object()) == "{}\n");
  }

  TEST_CASE("floats survive a text round trip bit for bit")
  {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 500; ++i)
    {
      const double v = i % 2 ? u(rng) : u(rng) * 1e-12;
      Json doc = Json::array({v});
      const Json back = parse_json(canonical_dump(doc));
      CHECK(back[0].get<double>() == v);
    }
  }

  TEST_CASE("model round trip")
  {
    const UtilityModel robot = oracle::robot();
    const std::string once = serialize_model(robot);
    const UtilityModel again = parse_model(once);
    CHECK(again == robot);
    CHECK(serialize_model(again) == once);

    UtilityModel with_priors = robot;
    with_priors.priors = std::vector<double>{0.1, 0.1, 0.2, 0.2, 0.3, 0.1};
    CHECK(parse_model(serialize_model(with_priors)) == with_priors);
  }

  TEST_CASE("model schema errors carry a path")
  {
    const std::string good = oracle::read_file(oracle::fixture("robot.json"));
    CHECK(error_of([&] { parse_model("{"); }).code() == ErrorCode::Schema);

    Json doc = parse_json(good);
    doc["colour"] = "red";
    auto e = error_of([&] { model_from_json(doc); });
    CHECK(e.code() == ErrorCode::Schema);
    CHECK(e.path() == "$.colour");

    doc = parse_json(good);
    doc["actions"] = Json::array();
    e = error_of([&] { model_from_json(doc); });
    CHECK(e.path().find("actions") != std::string::npos);

    doc = parse_json(good);
    doc["attributes"][1]["weight"] = "heavy";
    e = error_of([&] { model_from_json(doc); });
    CHECK(e.code() == ErrorCode::Schema);
    CHECK(e.path().find("attributes") != std::string::npos);

    doc = parse_json(good);
    doc["outcomes"].erase("Gather|Class");
    e = error_of([&] { model_from_json(doc); });
    CHECK(e.code() == ErrorCode::InvalidModel);
    CHECK(e.path() == "outcomes.Gather|Class");
    CHECK(validate_model(model_from_json_unchecked(doc)).size() == 1);

    doc = parse_json(good);
    doc["outcomes"]["Fly|Class"] = Json::array({0.1, 0.2});
    CHECK(error_of([&] { model_from_json(doc); }).code() != ErrorCode::Usage);
  }

  TEST_CASE("distribution files")
  {
    const ProbabilityDist d =
        parse_dist(oracle::read_file(oracle::fixture("robot_uniform.json")));
    CHECK(d.evidence_label == "uniform prior over locations");
    CHECK(d.probs.size() == 6);
    CHECK(dist_from_json(dist_to_json(d)) == d);
    CHECK_NOTHROW(d.aligned(oracle::robot().hypotheses));
    CHECK(error_of([&] { parse_dist(R"({"probs": {"a": "x"}})"); }).code()
          == ErrorCode::Schema);
  }

  TEST_CASE("dendrogram round trip")
  {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial)
    {
      const auto m = oracle::random_matrix(rng, 3, 1 + trial % 9);
      const Dendrogram d = build_hierarchy(m, CategoryKind::Hypothesis,
                                           MetricKind::Chebyshev, Linkage::Single);
      const std::string text = canonical_dump(dendrogram_to_json(d));
      const Dendrogram back = parse_dendrogram(text);
      CHECK(back == d);
      CHECK(canonical_dump(dendrogram_to_json(back)) == text);
    }
    Json broken = dendrogram_to_json(
        build_hierarchy(utility_matrix(oracle::robot()), CategoryKind::Hypothesis,
                        MetricKind::Euclidean, Linkage::Complete));
    broken["merges"][0]["left"] = Json::object({{"leaf", 40}});
    CHECK(error_of([&] { dendrogram_from_json(broken); }).code() == ErrorCode::Schema);
  }

  TEST_CASE("partition documents")
  {
    const auto m = utility_matrix(oracle::robot());
    const Dendrogram d = build_hierarchy(m, CategoryKind::Hypothesis,
                                         MetricKind::Euclidean, Linkage::Complete);
    const Partition p = cut_to_k(d, 3, &m);
    const Json doc = partition_to_json(p);
    CHECK(doc["kind"] == "hypotheses");
    CHECK(doc["categories"].size() == 3);
    CHECK(partition_from_json(doc, &m) == p);

    Json no_kind = Json::object();
    no_kind["categories"] =
        Json::array({Json::object({{"members", {"Gather", "Query Assist"}}}),
                     Json::object({{"members", {"Charge/Scan", "Meander/Scan"}}})});
    const Partition inferred = partition_from_json(no_kind, &m);
    CHECK(inferred.kind == CategoryKind::Action);
    CHECK(!inferred.max_spans[0].has_value());

    const Partition unmeasured = cut_to_k(d, 2);
    CHECK(partition_to_json(unmeasured)["categories"][0]["max_span"].is_null());
  }

  TEST_CASE("decision report shape")
  {
    const auto m = utility_matrix(oracle::robot());
    const auto uniform = ProbabilityDist::uniform(m.hypotheses());
    const Json eu = report_to_json(best_action(m, uniform));
    CHECK(eu["rule"] == "eu");
    CHECK(eu["chosen"] == "Query Assist");
    CHECK(eu["dominated"].is_null());
    CHECK(eu["scores"].size() == 4);

    Partition coarse;
    coarse.categories.push_back({CategoryKind::Hypothesis, m.hypotheses()});
    coarse.max_spans.emplace_back();
    const Json mm = report_to_json(minimax_decide_events(m, coarse, uniform));
    CHECK(mm["rule"] == "minimax");
    CHECK(mm["dominated"] == false);
    CHECK(mm["chosen"].is_null());
    CHECK(mm["fallback"]["mode"] == "average");
  }

  TEST_CASE("error lines are single-line JSON")
  {
    const std::string line = error_line("NotFound", "no \"x\"\nhere", "a.b");
    CHECK(line.find('\n') == std::string::npos);
    const Json back = parse_json(line);
    CHECK(back["error"] == "NotFound");
    CHECK(back["path"] == "a.b");
    CHECK(parse_json(error_line("X", "y")).contains("path") == false);
  }
}
