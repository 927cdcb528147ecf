// Shared constructed fixtures for unit and acceptance tests.
#pragma once

#include <string>
#include <vector>

#include "wdrift/evaluate.hpp"

namespace fixtures {

using wdrift::Label;

struct LabeledPrediction {
  std::string id;
  Label gold;
  double prob;
};

inline std::string id_of(std::size_t i) { return "t" + std::to_string(100000 + i); }

// 500 test comments with confusion TP=102 FN=129 FP=72 TN=197.
// AntiVax: acc 0.598, F1 204/405, precision 102/174, recall 102/231.
inline std::vector<LabeledPrediction> base_model_predictions() {
  std::vector<LabeledPrediction> out;
  auto add = [&](std::size_t n, Label gold, double prob) {
    for (std::size_t i = 0; i < n; ++i) out.push_back({id_of(out.size()), gold, prob});
  };
  add(102, Label::AntiVax, 0.8);
  add(129, Label::AntiVax, 0.3);
  add(72, Label::Other, 0.7);
  add(197, Label::Other, 0.1);
  return out;
}

struct WeirdPrediction {
  std::string id;
  double weirdness;
  double prob;
};

// 1000 comments: 100 with weirdness below 0.9 at confidence 0.39, 200 above
// 1.2 at 0.16, and 700 in between at 0.1 (310) or 0.2 (390).
// Means: low 0.39, all 0.18, high 0.16.
inline std::vector<WeirdPrediction> base_model_confidence() {
  std::vector<WeirdPrediction> out;
  auto add = [&](std::size_t n, double w, double prob) {
    for (std::size_t i = 0; i < n; ++i) out.push_back({id_of(out.size()), w, prob});
  };
  add(100, 0.5, 0.89);
  add(200, 1.7, 0.34);
  add(310, 1.0, 0.6);
  add(390, 1.1, 0.3);
  return out;
}

}  // namespace fixtures
