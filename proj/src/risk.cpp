#include "targetbench/risk.hpp"

#include <fstream>

#include "targetbench/format.hpp"
#include "targetbench/nuisance.hpp"
#include "targetbench/stats.hpp"

namespace targetbench {

ModelPtr fit_risk_model(const Dataset& train, const LearnerSpec& spec) {
  std::vector<std::size_t> control;
  for (std::size_t i = 0; i < train.n(); ++i)
    if (train.W[i] == 0) control.push_back(i);
  if (control.empty()) fail("fit_risk_model: no control rows to fit on");

  Matrix X(control.size(), train.d());
  std::vector<double> y(control.size());
  for (std::size_t i = 0; i < control.size(); ++i) {
    for (std::size_t j = 0; j < train.d(); ++j) X(i, j) = train.X(control[i], j);
    y[i] = train.Y[control[i]];
  }
  return fit_regressor(X, y, spec);
}

RiskScores score_risk(const Dataset& ds, const Model& model) {
  const auto pred = model.predict(ds.X);
  RiskScores scores;
  scores.effect_sign = effect_sign(ds.outcome_direction);
  scores.b.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i)
    scores.b[i] = -scores.effect_sign * pred[i];

  const std::size_t n = scores.b.size();
  if (n == 0) fail("score_risk: empty dataset");
  if (n == 1) {
    scores.b_prime = {0.5};
    return scores;
  }
  const auto ranks = average_ranks(scores.b);
  scores.b_prime.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    scores.b_prime[i] = (ranks[i] - 1.0) / static_cast<double>(n - 1);
  return scores;
}

void write_risk_csv(const RiskScores& scores, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open file for writing: " + path);
  out << "row,b,b_prime\n";
  for (std::size_t i = 0; i < scores.b.size(); ++i) {
    out << i << ',' << format_double(scores.b[i]) << ','
        << format_double(scores.b_prime[i]) << '\n';
  }
  if (!out) fail("failed writing risk CSV: " + path);
}

}  // namespace targetbench
