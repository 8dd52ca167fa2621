#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mmpo/enumeration.hpp"
#include "mmpo/pomdp.hpp"
#include "oracles.hpp"

using namespace mmpo;

namespace {

// 2-state chain with one action; O(o=0|s'=0)=0.7, O(o=0|s'=1)=0.4.
DiscretePomdp two_state_chain() {
  return DiscretePomdp(2, 1, 2,
                       {0.9, 0.1, 0.2, 0.8},
                       {0.7, 0.3, 0.4, 0.6},
                       {0.0, 0.0}, 1.0, {0.6, 0.4});
}

DiscretePomdp identity_revealing() {
  // Identity transition, observation emits o = s' deterministically.
  return DiscretePomdp(2, 1, 2,
                       {1.0, 0.0, 0.0, 1.0},
                       {1.0, 0.0, 0.0, 1.0},
                       {0.0, 0.0}, 1.0, {0.5, 0.5});
}

DiscretePomdp uninformative_obs() {
  return DiscretePomdp(2, 1, 2,
                       {0.9, 0.1, 0.3, 0.7},
                       {0.5, 0.5, 0.5, 0.5},
                       {0.0, 0.0}, 1.0, {0.25, 0.75});
}

}  // namespace

TEST_CASE("constructor rejects bad rows") {
  CHECK_THROWS_AS(DiscretePomdp(2, 1, 2, {0.9, 0.2, 0.2, 0.8},
                                {0.7, 0.3, 0.4, 0.6}, {0.0, 0.0}, 1.0,
                                {0.6, 0.4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiscretePomdp(2, 1, 2, {0.9, 0.1, 0.2, 0.8},
                                {0.7, 0.3, 0.4, 0.6}, {0.0, 0.0}, 1.0,
                                {0.7, 0.4}),
                  std::invalid_argument);
}

TEST_CASE("fully revealing observation pins the state") {
  const DiscretePomdp pomdp = identity_revealing();
  const FilterResult r = belief_update(pomdp, BeliefState{{0.5, 0.5}}, 0, 0);
  CHECK(r.posterior.probs[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.posterior.probs[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("uninformative observation propagates the prior through T only") {
  const DiscretePomdp pomdp = uninformative_obs();
  const BeliefState prior{{0.25, 0.75}};
  const FilterResult r = belief_update(pomdp, prior, 0, 1);
  // Predicted state marginal: T^T prior.
  const double p0 = 0.9 * 0.25 + 0.3 * 0.75;
  const double p1 = 0.1 * 0.25 + 0.7 * 0.75;
  CHECK(r.posterior.probs[0] == doctest::Approx(p0).epsilon(1e-12));
  CHECK(r.posterior.probs[1] == doctest::Approx(p1).epsilon(1e-12));
  CHECK(r.observation_probability == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two-state filter step matches the frozen hand computation") {
  const DiscretePomdp pomdp = two_state_chain();
  const FilterResult r = belief_update(pomdp, BeliefState{{0.6, 0.4}}, 0, 0);
  // Predicted: (0.62, 0.38); likelihoods (0.434, 0.152); normalizer 0.586.
  CHECK(r.observation_probability == doctest::Approx(0.586).epsilon(1e-12));
  CHECK(r.posterior.probs[0] == doctest::Approx(0.7406143344709898).epsilon(1e-12));
  CHECK(r.posterior.probs[1] == doctest::Approx(0.2593856655290102).epsilon(1e-12));
}

TEST_CASE("impossible observation raises ZeroLikelihood") {
  // Observation 1 can never be emitted.
  const DiscretePomdp pomdp(2, 1, 2, {1.0, 0.0, 0.0, 1.0},
                            {1.0, 0.0, 1.0, 0.0}, {0.0, 0.0}, 1.0, {0.5, 0.5});
  CHECK_THROWS_AS(belief_update(pomdp, pomdp.initial_belief(), 0, 1),
                  ZeroLikelihood);
}

TEST_CASE("posterior_given_history base cases") {
  const DiscretePomdp pomdp = two_state_chain();
  SUBCASE("empty history returns the initial belief") {
    const BeliefState b = posterior_given_history(pomdp, HistoryRecord{});
    CHECK(b.probs[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(b.probs[1] == doctest::Approx(0.4).epsilon(1e-15));
  }
  SUBCASE("one observation equals a single filter step") {
    HistoryRecord h;
    h.observations = {0};
    const BeliefState folded = posterior_given_history(pomdp, h);
    const BeliefState direct =
        belief_update(pomdp, pomdp.initial_belief(), 0, 0).posterior;
    CHECK(folded.probs[0] == direct.probs[0]);
    CHECK(folded.probs[1] == direct.probs[1]);
  }
}

TEST_CASE("three-step history matches brute-force path enumeration") {
  const DiscretePomdp pomdp = two_state_chain();
  HistoryRecord h;
  h.observations = {0, 1, 0};
  h.actions = {0, 0};
  const BeliefState filtered = posterior_given_history(pomdp, h);
  const BeliefState brute = oracle::brute_posterior(pomdp, h);
  for (int s = 0; s < 2; ++s) {
    CHECK(filtered.probs[s] == doctest::Approx(brute.probs[s]).epsilon(1e-12));
  }
}

TEST_CASE("filter agrees with brute enumeration on randomized kernels") {
  RngStream rng = RngStream::root(2024).child("pomdp-prop");
  for (int trial = 0; trial < 50; ++trial) {
    const int S = 2 + static_cast<int>(rng.next_below(3));
    const int A = 1 + static_cast<int>(rng.next_below(3));
    const int O = 2 + static_cast<int>(rng.next_below(3));
    const int horizon = static_cast<int>(rng.next_below(4));
    const DiscretePomdp pomdp = oracle::random_pomdp(S, A, O, rng);
    const HistoryRecord h = oracle::simulate_history(pomdp, horizon, rng);
    const BeliefState filtered = posterior_given_history(pomdp, h);
    const BeliefState brute = oracle::brute_posterior(pomdp, h);
    for (int s = 0; s < S; ++s) {
      CHECK(std::abs(filtered.probs[s] - brute.probs[s]) < 1e-10);
    }
  }
}

TEST_CASE("identity summarizer reproduces per-history posteriors") {
  const DiscretePomdp pomdp = two_state_chain();
  const int horizon = 2;
  const HistoryEnumeration hist = enumerate_histories(pomdp, horizon);
  const int n = static_cast<int>(hist.histories.size());
  int counter = 0;
  // One summary id per enumeration slot, assigned in order.
  auto summarizer = deterministic_summarizer(
      n, [&counter](const HistoryRecord&) { return counter++; });
  const SummaryBelief sb = summary_induced_belief(pomdp, summarizer, n, horizon);
  for (int i = 0; i < n; ++i) {
    if (hist.probability[i] <= 0.0) continue;
    for (int s = 0; s < 2; ++s) {
      CHECK(sb.belief[i].probs[s] ==
            doctest::Approx(hist.posterior[i].probs[s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("constant summarizer yields the state marginal at horizon") {
  const DiscretePomdp pomdp = two_state_chain();
  const int horizon = 2;
  auto summarizer = deterministic_summarizer(1, [](const HistoryRecord&) { return 0; });
  const SummaryBelief sb = summary_induced_belief(pomdp, summarizer, 1, horizon);
  // Marginal of s after horizon+1 transitions from the initial belief.
  std::vector<double> marginal = pomdp.initial_belief().probs;
  for (int step = 0; step < horizon + 1; ++step) {
    std::vector<double> next(2, 0.0);
    for (int s2 = 0; s2 < 2; ++s2) {
      for (int s = 0; s < 2; ++s) next[s2] += pomdp.transition(s, 0, s2) * marginal[s];
    }
    marginal = next;
  }
  CHECK(sb.p_summary[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (int s = 0; s < 2; ++s) {
    CHECK(sb.belief[0].probs[s] == doctest::Approx(marginal[s]).epsilon(1e-10));
  }
}

TEST_CASE("last-observation summarizer matches the independent mixture") {
  const DiscretePomdp pomdp = two_state_chain();
  const int horizon = 2;
  auto summarizer = deterministic_summarizer(
      2, [](const HistoryRecord& h) { return h.observations.back(); });
  const SummaryBelief sb = summary_induced_belief(pomdp, summarizer, 2, horizon);

  // Independent path: brute-force joint over (s, h), grouped by summary.
  const oracle::BruteHistoryJoint brute = oracle::brute_history_joint(pomdp, horizon);
  std::vector<double> p_m(2, 0.0);
  std::vector<std::vector<double>> mix(2, std::vector<double>(2, 0.0));
  for (std::size_t h = 0; h < brute.histories.size(); ++h) {
    const int m = brute.histories[h].observations.back();
    for (int s = 0; s < 2; ++s) {
      mix[m][s] += brute.joint[h][s];
      p_m[m] += brute.joint[h][s];
    }
  }
  for (int m = 0; m < 2; ++m) {
    CHECK(sb.p_summary[m] == doctest::Approx(p_m[m]).epsilon(1e-10));
    for (int s = 0; s < 2; ++s) {
      CHECK(std::abs(sb.belief[m].probs[s] - mix[m][s] / p_m[m]) < 1e-10);
    }
  }
}

TEST_CASE("enumeration cap is enforced") {
  const DiscretePomdp pomdp = two_state_chain();
  CHECK_THROWS_AS(enumerate_histories(pomdp, 4, 10), EnumerationTooLarge);
}

TEST_CASE("conditional entropy basics") {
  SUBCASE("bijective summary determines the state") {
    const std::vector<double> joint{0.5, 0.0, 0.0, 0.5};
    CHECK(conditional_entropy_state_given_summary(joint, 2, 2) ==
          doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("independent uniform state gives ln 2") {
    const std::vector<double> joint{0.25, 0.25, 0.25, 0.25};
    CHECK(conditional_entropy_state_given_summary(joint, 2, 2) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("lossy-summarizer joint matches the direct double sum") {
    const DiscretePomdp pomdp = two_state_chain();
    auto summarizer = deterministic_summarizer(
        2, [](const HistoryRecord& h) { return h.observations.back(); });
    const SummaryBelief sb = summary_induced_belief(pomdp, summarizer, 2, 2);
    double direct = 0.0;
    std::vector<double> p_m(2, 0.0);
    for (int s = 0; s < 2; ++s) {
      for (int m = 0; m < 2; ++m) p_m[m] += sb.joint[s * 2 + m];
    }
    for (int s = 0; s < 2; ++s) {
      for (int m = 0; m < 2; ++m) {
        const double p = sb.joint[s * 2 + m];
        if (p > 0.0) direct -= p * std::log(p / p_m[m]);
      }
    }
    CHECK(conditional_entropy_state_given_summary(sb.joint, 2, 2) ==
          doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("mutual information basics") {
  SUBCASE("independent joint gives zero") {
    const std::vector<double> joint{0.25, 0.25, 0.25, 0.25};
    CHECK(mutual_information(joint, 2, 2) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("bijective uniform joint gives ln K") {
    const std::vector<double> joint{1.0 / 3, 0.0, 0.0, 0.0, 1.0 / 3, 0.0,
                                    0.0, 0.0, 1.0 / 3};
    CHECK(mutual_information(joint, 3, 3) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }
  SUBCASE("matches the brute-force double-sum definition") {
    const DiscretePomdp pomdp = two_state_chain();
    auto summarizer = deterministic_summarizer(
        2, [](const HistoryRecord& h) { return h.observations.back(); });
    const SummaryBelief sb = summary_induced_belief(pomdp, summarizer, 2, 2);
    std::vector<double> p_s(2, 0.0), p_m(2, 0.0);
    for (int s = 0; s < 2; ++s) {
      for (int m = 0; m < 2; ++m) {
        p_s[s] += sb.joint[s * 2 + m];
        p_m[m] += sb.joint[s * 2 + m];
      }
    }
    double direct = 0.0;
    for (int s = 0; s < 2; ++s) {
      for (int m = 0; m < 2; ++m) {
        const double p = sb.joint[s * 2 + m];
        if (p > 0.0) direct += p * std::log(p / (p_s[s] * p_m[m]));
      }
    }
    CHECK(mutual_information(sb.joint, 2, 2) ==
          doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("data processing inequality over random summarizers") {
  RngStream rng = RngStream::root(77).child("dpi");
  for (int trial = 0; trial < 20; ++trial) {
    const int S = 2 + static_cast<int>(rng.next_below(2));
    const int O = 2 + static_cast<int>(rng.next_below(2));
    const DiscretePomdp pomdp = oracle::random_pomdp(S, 1, O, rng);
    const int horizon = 1 + static_cast<int>(rng.next_below(2));
    const HistoryEnumeration hist = enumerate_histories(pomdp, horizon);
    const int H = static_cast<int>(hist.histories.size());

    // I(s;h): identity summarizer over enumeration slots.
    int counter = 0;
    auto identity = deterministic_summarizer(
        H, [&counter](const HistoryRecord&) { return counter++; });
    const SummaryBelief full = summary_induced_belief(pomdp, identity, H, horizon);
    const double i_sh = mutual_information(full.joint, S, H);

    // Random lossy summarizer.
    const int M = 1 + static_cast<int>(rng.next_below(3));
    std::vector<int> assignment(H);
    for (int h = 0; h < H; ++h) {
      assignment[h] = static_cast<int>(rng.next_below(M));
    }
    int slot = 0;
    auto lossy = deterministic_summarizer(
        M, [&assignment, &slot](const HistoryRecord&) { return assignment[slot++]; });
    const SummaryBelief sb = summary_induced_belief(pomdp, lossy, M, horizon);
    const double i_sm = mutual_information(sb.joint, S, M);

    CHECK(i_sm <= i_sh + 1e-9);
    CHECK(i_sm >= -1e-9);
  }
}

TEST_CASE("entropy bounds and refinement monotonicity") {
  RngStream rng = RngStream::root(99).child("refine");
  for (int trial = 0; trial < 20; ++trial) {
    const int S = 2 + static_cast<int>(rng.next_below(3));
    const DiscretePomdp pomdp = oracle::random_pomdp(S, 1, 2, rng);
    const int horizon = 2;
    const HistoryEnumeration hist = enumerate_histories(pomdp, horizon);
    const int H = static_cast<int>(hist.histories.size());

    const int M = 2;
    std::vector<int> coarse(H);
    for (int h = 0; h < H; ++h) coarse[h] = static_cast<int>(rng.next_below(M));
    // Refinement: split class 0 into two by a second random bit.
    std::vector<int> fine(H);
    for (int h = 0; h < H; ++h) {
      fine[h] = coarse[h] == 0 ? (rng.next_below(2) == 0 ? 0 : 2) : 1;
    }

    int slot_a = 0, slot_b = 0;
    auto coarse_fn = deterministic_summarizer(
        M, [&coarse, &slot_a](const HistoryRecord&) { return coarse[slot_a++]; });
    auto fine_fn = deterministic_summarizer(
        3, [&fine, &slot_b](const HistoryRecord&) { return fine[slot_b++]; });

    const SummaryBelief sb_coarse = summary_induced_belief(pomdp, coarse_fn, M, horizon);
    const SummaryBelief sb_fine = summary_induced_belief(pomdp, fine_fn, 3, horizon);
    const double h_coarse = conditional_entropy_state_given_summary(sb_coarse.joint, S, M);
    const double h_fine = conditional_entropy_state_given_summary(sb_fine.joint, S, 3);

    CHECK(h_coarse >= -1e-12);
    CHECK(h_coarse <= std::log(static_cast<double>(S)) + 1e-9);
    CHECK(h_fine <= h_coarse + 1e-9);
  }
}

TEST_CASE("pomdp file round-trips and rejects bad rows") {
  const DiscretePomdp pomdp = two_state_chain();
  const std::string path = "test_pomdp_roundtrip.json";
  save_pomdp_file(pomdp, path);
  const DiscretePomdp loaded = load_pomdp_file(path);
  CHECK(loaded.num_states() == 2);
  CHECK(loaded.transition_table() == pomdp.transition_table());
  CHECK(loaded.observation_table() == pomdp.observation_table());
  CHECK(loaded.initial_belief().probs == pomdp.initial_belief().probs);
  std::filesystem::remove(path);

  const std::string bad = "test_pomdp_bad.json";
  {
    std::ofstream out(bad);
    out << R"({"num_states":2,"num_actions":1,"num_observations":2,
               "discount":1.0,
               "transition":[[[0.9,0.2]],[[0.2,0.8]]],
               "observation":[[[0.7,0.3]],[[0.4,0.6]]],
               "reward":[[0.0],[0.0]],
               "initial_belief":[0.6,0.4]})";
  }
  CHECK_THROWS_AS(load_pomdp_file(bad), ConfigParseError);
  std::filesystem::remove(bad);
}
