#include "mmpo/pomdp.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mmpo {
namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kLikelihoodFloor = 1e-300;

void check_row_sums(const std::vector<double>& table, std::size_t rows,
                    std::size_t cols, const char* name) {
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = table[r * cols + c];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + ": negative or non-finite entry in row " +
                                    std::to_string(r));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw std::invalid_argument(std::string(name) + ": row " + std::to_string(r) +
                                  " sums to " + std::to_string(sum) + ", expected 1");
    }
  }
}

}  // namespace

DiscretePomdp::DiscretePomdp(int num_states, int num_actions, int num_observations,
                             std::vector<double> transition,
                             std::vector<double> observation,
                             std::vector<double> reward, double discount,
                             std::vector<double> initial_belief)
    : num_states_(num_states),
      num_actions_(num_actions),
      num_observations_(num_observations),
      transition_(std::move(transition)),
      observation_(std::move(observation)),
      reward_(std::move(reward)),
      discount_(discount),
      initial_belief_{std::move(initial_belief)} {
  if (num_states_ <= 0 || num_actions_ <= 0 || num_observations_ <= 0) {
    throw std::invalid_argument("DiscretePomdp: dimensions must be positive");
  }
  const auto s = static_cast<std::size_t>(num_states_);
  const auto a = static_cast<std::size_t>(num_actions_);
  const auto o = static_cast<std::size_t>(num_observations_);
  if (transition_.size() != s * a * s || observation_.size() != s * a * o ||
      reward_.size() != s * a) {
    throw std::invalid_argument("DiscretePomdp: table size mismatch");
  }
  if (!(discount_ > 0.0) || discount_ > 1.0) {
    throw std::invalid_argument("DiscretePomdp: discount must be in (0, 1]");
  }
  if (initial_belief_.probs.size() != s) {
    throw std::invalid_argument("DiscretePomdp: initial belief size mismatch");
  }
  check_row_sums(transition_, s * a, s, "transition");
  check_row_sums(observation_, s * a, o, "observation");
  check_row_sums(initial_belief_.probs, 1, s, "initial_belief");
  for (double r : reward_) {
    if (!std::isfinite(r)) throw std::invalid_argument("DiscretePomdp: non-finite reward");
  }
}

FilterResult belief_update(const DiscretePomdp& pomdp, const BeliefState& prior,
                           int action, int obs) {
  const int S = pomdp.num_states();
  if (action < 0 || action >= pomdp.num_actions()) {
    throw std::invalid_argument("belief_update: action out of range");
  }
  if (obs < 0 || obs >= pomdp.num_observations()) {
    throw std::invalid_argument("belief_update: observation out of range");
  }
  if (static_cast<int>(prior.probs.size()) != S) {
    throw DimensionMismatch("belief_update: prior size mismatch");
  }
  std::vector<double> unnormalized(S, 0.0);
  double total = 0.0;
  for (int s2 = 0; s2 < S; ++s2) {
    double predicted = 0.0;
    for (int s = 0; s < S; ++s) {
      predicted += pomdp.transition(s, action, s2) * prior.probs[s];
    }
    unnormalized[s2] = pomdp.observation(s2, action, obs) * predicted;
    total += unnormalized[s2];
  }
  if (total < kLikelihoodFloor) {
    throw ZeroLikelihood("belief_update: observation has zero likelihood under prior");
  }
  for (int s2 = 0; s2 < S; ++s2) unnormalized[s2] /= total;
  return FilterResult{BeliefState{std::move(unnormalized)}, total};
}

BeliefState posterior_given_history(const DiscretePomdp& pomdp,
                                    const HistoryRecord& history) {
  if (!history.observations.empty() &&
      history.observations.size() != history.actions.size() + 1) {
    throw std::invalid_argument(
        "posterior_given_history: need one more observation than actions");
  }
  BeliefState belief = pomdp.initial_belief();
  for (std::size_t i = 0; i < history.observations.size(); ++i) {
    const int action = i == 0 ? 0 : history.actions[i - 1];
    belief = belief_update(pomdp, belief, action, history.observations[i]).posterior;
  }
  return belief;
}

DiscretePomdp load_pomdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open POMDP file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParseError("POMDP file " + path + ": " + e.what());
  }
  try {
    const int S = doc.at("num_states").get<int>();
    const int A = doc.at("num_actions").get<int>();
    const int O = doc.at("num_observations").get<int>();
    auto flatten3 = [](const nlohmann::json& t, int d0, int d1, int d2,
                       const char* name) {
      std::vector<double> flat;
      flat.reserve(static_cast<std::size_t>(d0) * d1 * d2);
      if (static_cast<int>(t.size()) != d0) {
        throw ConfigParseError(std::string(name) + ": outer dimension mismatch");
      }
      for (const auto& r1 : t) {
        if (static_cast<int>(r1.size()) != d1) {
          throw ConfigParseError(std::string(name) + ": middle dimension mismatch");
        }
        for (const auto& r2 : r1) {
          if (static_cast<int>(r2.size()) != d2) {
            throw ConfigParseError(std::string(name) + ": inner dimension mismatch");
          }
          for (const auto& v : r2) flat.push_back(v.get<double>());
        }
      }
      return flat;
    };
    std::vector<double> transition = flatten3(doc.at("transition"), S, A, S, "transition");
    std::vector<double> observation = flatten3(doc.at("observation"), S, A, O, "observation");
    std::vector<double> reward;
    for (const auto& row : doc.at("reward")) {
      for (const auto& v : row) reward.push_back(v.get<double>());
    }
    std::vector<double> initial = doc.at("initial_belief").get<std::vector<double>>();
    const double discount = doc.at("discount").get<double>();
    return DiscretePomdp(S, A, O, std::move(transition), std::move(observation),
                         std::move(reward), discount, std::move(initial));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParseError("POMDP file " + path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigParseError("POMDP file " + path + ": " + e.what());
  }
}

void save_pomdp_file(const DiscretePomdp& pomdp, const std::string& path) {
  const int S = pomdp.num_states();
  const int A = pomdp.num_actions();
  const int O = pomdp.num_observations();
  nlohmann::json doc;
  doc["num_states"] = S;
  doc["num_actions"] = A;
  doc["num_observations"] = O;
  doc["discount"] = pomdp.discount();
  auto t3 = nlohmann::json::array();
  for (int s = 0; s < S; ++s) {
    auto by_action = nlohmann::json::array();
    for (int a = 0; a < A; ++a) {
      auto row = nlohmann::json::array();
      for (int s2 = 0; s2 < S; ++s2) row.push_back(pomdp.transition(s, a, s2));
      by_action.push_back(row);
    }
    t3.push_back(by_action);
  }
  doc["transition"] = t3;
  auto o3 = nlohmann::json::array();
  for (int s2 = 0; s2 < S; ++s2) {
    auto by_action = nlohmann::json::array();
    for (int a = 0; a < A; ++a) {
      auto row = nlohmann::json::array();
      for (int o = 0; o < O; ++o) row.push_back(pomdp.observation(s2, a, o));
      by_action.push_back(row);
    }
    o3.push_back(by_action);
  }
  doc["observation"] = o3;
  auto r2 = nlohmann::json::array();
  for (int s = 0; s < S; ++s) {
    auto row = nlohmann::json::array();
    for (int a = 0; a < A; ++a) row.push_back(pomdp.reward(s, a));
    r2.push_back(row);
  }
  doc["reward"] = r2;
  doc["initial_belief"] = pomdp.initial_belief().probs;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write POMDP file: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace mmpo
