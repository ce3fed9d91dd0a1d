#include <doctest.h>

#include "oracles.hpp"
#include "tuba/decisions.hpp"
#include "tuba/error.hpp"

using namespace tuba;

namespace
{

Partition make_partition(CategoryKind kind,
                         std::vector<std::vector<std::string>> groups)
{
  Partition p;
  p.kind = kind;
  for (auto& g : groups)
  {
    p.categories.push_back({kind, std::move(g)});
    p.max_spans.emplace_back();
  }
  return p;
}

double score_of(const Scores& s, const std::string& id)
{
  for (const auto& [k, v] : s)
  {
    if (k == id)
    {
      return v;
    }
  }
  FAIL("no score for " << id);
  return 0.0;
}

}  // namespace

TEST_SUITE("decisions")
{
  TEST_CASE("expected utility under a uniform distribution")
  {
    const auto m = utility_matrix(oracle::robot());
    const auto uniform = ProbabilityDist::uniform(m.hypotheses());
    CHECK(expected_utility(m, "Charge/Scan", uniform)
          == doctest::Approx(0.42666666666666667).epsilon(1e-12));
    CHECK(expected_utility(m, "Query Assist", uniform)
          == doctest::Approx(0.59333333333333333).epsilon(1e-12));
    CHECK(expected_utility(m, "Meander/Scan", uniform)
          == doctest::Approx(0.495).epsilon(1e-12));
    CHECK(expected_utility(m, "Gather", uniform)
          == doctest::Approx(0.51333333333333333).epsilon(1e-12));

    const DecisionReport r = best_action(m, uniform);
    CHECK(r.chosen == "Query Assist");
    CHECK_FALSE(r.tie);
    CHECK(r.scores.size() == 4);
    CHECK(r.scores[0].first == "Charge/Scan");
  }

  TEST_CASE("degenerate distribution picks the column maximum")
  {
    const auto m = utility_matrix(oracle::robot());
    const auto closet = ProbabilityDist::degenerate(m.hypotheses(), "Closet");
    const DecisionReport r = best_action(m, closet);
    // Charge/Scan and Gather both score 0.82 in the Closet.
    CHECK(r.chosen == "Charge/Scan");
    CHECK(r.tie);
    const auto office = ProbabilityDist::degenerate(m.hypotheses(), "Office");
    CHECK(best_action(m, office).chosen == "Query Assist");
  }

  TEST_CASE("best action agrees with a brute-force argmax")
  {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial)
    {
      const auto m = oracle::random_matrix(rng, 1 + trial % 7, 1 + trial % 9);
      const auto d = oracle::random_dist(rng, m.hypotheses(), true);
      const auto eu = oracle::brute_eu(m, d);
      const DecisionReport r = best_action(m, d);
      CHECK(r.chosen == m.actions()[oracle::first_argmax(eu)]);
      for (std::size_t i = 0; i < eu.size(); ++i)
      {
        CHECK(r.scores[i].second == doctest::Approx(eu[i]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("distribution mismatch")
  {
    const auto m = utility_matrix(oracle::robot());
    ProbabilityDist d;
    d.probs = {{"Office", 1.0}};
    try
    {
      best_action(m, d);
      FAIL("expected DistMismatch");
    }
    catch (const Error& e)
    {
      CHECK(e.code() == ErrorCode::DistMismatch);
    }
  }

  TEST_CASE("abstract outcome utilities")
  {
    const auto m = utility_matrix(oracle::robot());
    const auto uniform = ProbabilityDist::uniform(m.hypotheses());
    const Category sr{CategoryKind::Hypothesis, {"Stairwell", "Restroom"}};
    const auto avg = abstract_outcome_utility(m, "Gather", sr, AbstractionMode::Average);
    CHECK(avg.lo == doctest::Approx(0.255).epsilon(1e-12));
    CHECK(avg.lo == avg.hi);
    const auto cond = abstract_outcome_utility(m, "Gather", sr,
                                               AbstractionMode::Conditional, &uniform);
    CHECK(cond.lo == doctest::Approx(0.255).epsilon(1e-12));
    const auto iv = abstract_outcome_utility(m, "Gather", sr, AbstractionMode::Interval);
    CHECK(iv.lo == doctest::Approx(0.21).epsilon(1e-12));
    CHECK(iv.hi == doctest::Approx(0.30).epsilon(1e-12));
    CHECK(iv.midpoint() == doctest::Approx(0.255).epsilon(1e-12));

    const Category single{CategoryKind::Hypothesis, {"Office"}};
    for (auto mode : {AbstractionMode::Conditional, AbstractionMode::Average,
                      AbstractionMode::Interval})
    {
      const auto u = abstract_outcome_utility(m, "Gather", single, mode, &uniform);
      CHECK(u.lo == doctest::Approx(0.58).epsilon(1e-12));
      CHECK(u.hi == doctest::Approx(0.58).epsilon(1e-12));
    }

    const auto closet = ProbabilityDist::degenerate(m.hypotheses(), "Closet");
    try
    {
      abstract_outcome_utility(m, "Gather", sr, AbstractionMode::Conditional, &closet);
      FAIL("expected ZeroMassCategory");
    }
    catch (const Error& e)
    {
      CHECK(e.code() == ErrorCode::ZeroMassCategory);
    }
    try
    {
      abstract_outcome_utility(m, "Gather", sr, AbstractionMode::Conditional);
      FAIL("expected MissingDistribution");
    }
    catch (const Error& e)
    {
      CHECK(e.code() == ErrorCode::MissingDistribution);
    }
  }

  TEST_CASE("category probabilities")
  {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial)
    {
      const auto m = oracle::random_matrix(rng, 2, 8);
      const auto d = oracle::random_dist(rng, m.hypotheses(), true);
      const Partition p =
          oracle::random_partition(rng, m.hypotheses(), CategoryKind::Hypothesis);
      const auto pc = category_probability(p, d);
      REQUIRE(pc.size() == p.categories.size());
      double total = 0.0;
      for (std::size_t k = 0; k < pc.size(); ++k)
      {
        double expect = 0.0;
        for (const auto& h : p.categories[k].members)
        {
          expect += d.probs.at(h);
        }
        CHECK(pc[k] == doctest::Approx(expect).epsilon(1e-12));
        total += pc[k];
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("conditional mode reproduces ordinary expected utility")
  {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial)
    {
      const auto m = oracle::random_matrix(rng, 1 + trial % 6, 1 + trial % 10);
      const auto d = oracle::random_dist(rng, m.hypotheses(), true);
      const Partition p =
          oracle::random_partition(rng, m.hypotheses(), CategoryKind::Hypothesis);
      const auto eu = oracle::brute_eu(m, d);
      const DecisionReport r =
          decide_with_event_categories(m, p, d, AbstractionMode::Conditional);
      for (std::size_t i = 0; i < eu.size(); ++i)
      {
        CHECK(std::fabs(r.scores[i].second - eu[i]) <= 1e-9);
      }
      CHECK(r.chosen == m.actions()[oracle::first_argmax(eu)]);
      CHECK(r.mode == AbstractionMode::Conditional);
    }
  }

  TEST_CASE("singleton partitions change nothing")
  {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial)
    {
      const auto m = oracle::random_matrix(rng, 4, 6);
      const auto d = oracle::random_dist(rng, m.hypotheses());
      const Partition p = singleton_partition(m.hypotheses(), CategoryKind::Hypothesis);
      const auto eu = oracle::brute_eu(m, d);
      for (auto mode : {AbstractionMode::Conditional, AbstractionMode::Average,
                        AbstractionMode::Interval})
      {
        const auto r = decide_with_event_categories(m, p, d, mode);
        for (std::size_t i = 0; i < eu.size(); ++i)
        {
          CHECK(r.scores[i].second == doctest::Approx(eu[i]).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("loss of abstract decisions is at most twice the tolerance")
  {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial)
    {
      const auto m = oracle::random_matrix(rng, 5, 8);
      const auto d = oracle::random_dist(rng, m.hypotheses());
      const Partition p =
          oracle::random_partition(rng, m.hypotheses(), CategoryKind::Hypothesis);
      double tau = 0.0;
      for (const auto& c : p.categories)
      {
        tau = std::max(tau, uspan(m, c).max_span);
      }
      const auto eu = oracle::brute_eu(m, d);
      const double best = *std::max_element(eu.begin(), eu.end());
      for (auto mode : {AbstractionMode::Average, AbstractionMode::Interval})
      {
        const auto r = decide_with_event_categories(m, p, d, mode);
        const double got = eu[m.action_index(*r.chosen)];
        CHECK(best - got <= 2 * tau + 1e-12);
      }
    }
  }

  TEST_CASE("minimax on the robot table")
  {
    const auto m = utility_matrix(oracle::robot());
    const auto uniform = ProbabilityDist::uniform(m.hypotheses());

    const Partition singles = singleton_partition(m.hypotheses(), CategoryKind::Hypothesis);
    const auto exact = minimax_decide_events(m, singles, uniform);
    CHECK(exact.dominated == true);
    CHECK(exact.chosen == "Query Assist");

    const Partition coarse = make_partition(
        CategoryKind::Hypothesis,
        {{"Hallway", "Closet", "Office", "Stairwell", "Restroom", "Class"}});
    const auto r = minimax_decide_events(m, coarse, uniform);
    CHECK(r.dominated == false);
    CHECK_FALSE(r.chosen.has_value());
    REQUIRE(r.fallback.has_value());
    CHECK(r.fallback->mode == AbstractionMode::Average);
    CHECK(score_of(r.scores, "Gather") == doctest::Approx(0.21).epsilon(1e-12));
    CHECK(score_of(r.optimistic, "Gather") == doctest::Approx(0.82).epsilon(1e-12));
  }

  TEST_CASE("minimax verdicts survive sampling inside the intervals")
  {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int verdicts = 0;
    for (int trial = 0; trial < 300; ++trial)
    {
      auto base = oracle::random_matrix(rng, 4, 6);
      std::vector<double> v = base.values();
      const std::size_t boosted = trial % 4;
      for (std::size_t j = 0; j < 6; ++j)
      {
        v[boosted * 6 + j] += 0.6;
      }
      const UtilityMatrix m(base.actions(), base.hypotheses(), v);
      const auto d = oracle::random_dist(rng, m.hypotheses());
      const Partition p =
          oracle::random_partition(rng, m.hypotheses(), CategoryKind::Hypothesis);
      const auto r = minimax_decide_events(m, p, d);
      if (!r.dominated.value())
      {
        continue;
      }
      ++verdicts;
      for (int s = 0; s < 100; ++s)
      {
        std::vector<double> sample(v.size());
        for (std::size_t i = 0; i < 4; ++i)
        {
          for (const auto& c : p.categories)
          {
            const auto iv = abstract_outcome_utility(m, m.actions()[i], c,
                                                     AbstractionMode::Interval);
            for (const auto& h : c.members)
            {
              sample[i * 6 + m.hypothesis_index(h)] = iv.lo + u(rng) * (iv.hi - iv.lo);
            }
          }
        }
        const UtilityMatrix drawn(m.actions(), m.hypotheses(), sample);
        const auto eu = oracle::brute_eu(drawn, d);
        CHECK(m.actions()[oracle::first_argmax(eu)] == *r.chosen);
      }
    }
    CHECK(verdicts > 50);
  }

  TEST_CASE("action categories")
  {
    const auto m = utility_matrix(oracle::robot());
    const auto uniform = ProbabilityDist::uniform(m.hypotheses());
    const Partition p = make_partition(
        CategoryKind::Action, {{"Charge/Scan", "Query Assist"}, {"Meander/Scan", "Gather"}});
    const auto reps = representative_actions(m, p, uniform);
    REQUIRE(reps.size() == 2);
    CHECK(reps[0] == std::pair<std::string, std::string>{"Charge/Scan|Query Assist",
                                                         "Query Assist"});
    CHECK(reps[1].second == "Gather");

    const auto r = decide_with_action_categories(m, p, uniform);
    CHECK(r.chosen == "Charge/Scan|Query Assist");
    CHECK(score_of(r.scores, "Meander/Scan|Gather")
          == doctest::Approx(0.51333333333333333).epsilon(1e-12));

    const auto mm = minimax_decide_action_categories(m, p, uniform);
    REQUIRE(mm.dominated.has_value());
    if (!*mm.dominated)
    {
      REQUIRE(mm.fallback.has_value());
      CHECK_FALSE(mm.fallback->mode.has_value());
      CHECK(mm.fallback->chosen == "Charge/Scan|Query Assist");
    }

    const Partition wrong = make_partition(CategoryKind::Hypothesis, {{"Office"}});
    CHECK_THROWS_AS(decide_with_action_categories(m, wrong, uniform), Error);
  }

  TEST_CASE("action-category minimax is sound under sampling")
  {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int verdicts = 0;
    for (int trial = 0; trial < 300; ++trial)
    {
      auto base = oracle::random_matrix(rng, 6, 5);
      std::vector<double> v = base.values();
      const Partition p =
          oracle::random_partition(rng, base.actions(), CategoryKind::Action);
      for (const auto& a : p.categories[0].members)
      {
        for (std::size_t j = 0; j < 5; ++j)
        {
          v[base.action_index(a) * 5 + j] += 0.7;
        }
      }
      const UtilityMatrix m(base.actions(), base.hypotheses(), v);
      const auto d = oracle::random_dist(rng, m.hypotheses());
      const auto r = minimax_decide_action_categories(m, p, d);
      if (!r.dominated.value())
      {
        continue;
      }
      ++verdicts;
      const Category* chosen = nullptr;
      for (const auto& c : p.categories)
      {
        if (category_label(c) == *r.chosen)
        {
          chosen = &c;
        }
      }
      REQUIRE(chosen != nullptr);
      for (int s = 0; s < 100; ++s)
      {
        std::vector<double> sample(v.size());
        for (const auto& c : p.categories)
        {
          for (std::size_t j = 0; j < 5; ++j)
          {
            double lo = 1e300;
            double hi = -1e300;
            for (const auto& a : c.members)
            {
              lo = std::min(lo, m(m.action_index(a), j));
              hi = std::max(hi, m(m.action_index(a), j));
            }
            for (const auto& a : c.members)
            {
              sample[m.action_index(a) * 5 + j] = lo + u(rng) * (hi - lo);
            }
          }
        }
        const auto eu = oracle::brute_eu(UtilityMatrix(m.actions(), m.hypotheses(), sample), d);
        double chosen_best = -1e300;
        for (const auto& a : chosen->members)
        {
          chosen_best = std::max(chosen_best, eu[m.action_index(a)]);
        }
        for (std::size_t i = 0; i < eu.size(); ++i)
        {
          CHECK(eu[i] <= chosen_best + 1e-12);
        }
      }
    }
    CHECK(verdicts > 50);
  }

  TEST_CASE("rule and mode names")
  {
    CHECK(parse_rule("eu") == DecisionRule::ExpectedUtility);
    CHECK(parse_rule("minimax") == DecisionRule::MinimaxDominance);
    for (auto mode : {AbstractionMode::Conditional, AbstractionMode::Average,
                      AbstractionMode::Interval})
    {
      CHECK(parse_mode(to_string(mode)) == mode);
    }
    CHECK_THROWS_AS(parse_mode("median"), Error);
  }
}
