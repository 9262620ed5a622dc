#include "serum/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include "serum/error.hpp"

namespace serum {

double ssr(const ScorePair& s, int reference, const ErrorRates& e, double floor) {
  check_binary(reference, "reference");
  const int o = reference;
  // keep = Pr[z = o | y = o], cross = Pr[z = o | y = 1 - o]. cross goes through
  // 1 - (1 - e) so that the flipped channel (1 - e1, 1 - e0) with 1 - o yields
  // the same two numbers swapped, and the result agrees to the last bit.
  const double keep = 1.0 - e.of(1 - o);
  const double cross = 1.0 - (1.0 - e.of(o));
  const double margin = keep - cross;
  if (!(std::abs(margin) > floor)) {
    throw DegenerateError("reference is uninformative (e1 + e0 = 1)");
  }
  return (keep * s.at(o) - cross * s.at(1 - o)) / margin;
}

double ssr(const ScoringRule& rule, const Report& report, int reference, const ErrorRates& e,
           double floor) {
  return ssr(ScorePair::of(rule, report), reference, e, floor);
}

double expected_ssr_given_y(const ScorePair& s, int y, const ErrorRates& e) {
  check_binary(y, "outcome");
  const double one = e.prob_one(y);
  return one * ssr(s, 1, e) + (1.0 - one) * ssr(s, 0, e);
}

double expected_ssr_given_y(const ScoringRule& rule, const Report& report, int y,
                            const ErrorRates& e) {
  return expected_ssr_given_y(ScorePair::of(rule, report), y, e);
}

double ssr_variance(const ScorePair& s, const ErrorRates& e, const Prior& prior) {
  const double phi0 = ssr(s, 0, e);
  const double phi1 = ssr(s, 1, e);
  double mean = 0.0;
  double second = 0.0;
  for (int y = 0; y <= 1; ++y) {
    const double w1 = prior.mass(y) * e.prob_one(y);
    const double w0 = prior.mass(y) * (1.0 - e.prob_one(y));
    mean += w1 * phi1 + w0 * phi0;
    second += w1 * phi1 * phi1 + w0 * phi0 * phi0;
  }
  return std::max(0.0, second - mean * mean);
}

double ssr_variance(const ScoringRule& rule, const Report& report, const ErrorRates& e,
                    const Prior& prior) {
  return ssr_variance(ScorePair::of(rule, report), e, prior);
}

}  // namespace serum
