#pragma once

// Surrogate scoring: scores a report against a noisy binary reference z
// with known error rates so that, in expectation over z given y, the
// result equals the base rule's score against y.
//
//   phi(a, z=o) = [(1 - e_{1-o}) S(a, o) - e_o S(a, 1-o)] / (1 - e1 - e0)
//
// The same expression covers negatively informative references
// (e1 + e0 > 1); no separate flip branch is needed.

#include "serum/scoring.hpp"
#include "serum/types.hpp"

namespace serum {

/// |1 - e1 - e0| at or below this is treated as uninformative by ssr().
inline constexpr double kSurrogateDenominatorFloor = 1e-12;

/// Surrogate score from a precomputed (S(a,0), S(a,1)) pair.
/// Throws DegenerateError when |1 - e1 - e0| <= floor.
double ssr(const ScorePair& s, int reference, const ErrorRates& e,
           double floor = kSurrogateDenominatorFloor);

double ssr(const ScoringRule& rule, const Report& report, int reference, const ErrorRates& e,
           double floor = kSurrogateDenominatorFloor);

/// Pr[z=1|y] ssr(.., 1, ..) + Pr[z=0|y] ssr(.., 0, ..), by enumeration.
double expected_ssr_given_y(const ScorePair& s, int y, const ErrorRates& e);
double expected_ssr_given_y(const ScoringRule& rule, const Report& report, int y,
                            const ErrorRates& e);

/// Exact variance of ssr over the joint (y, z) distribution
/// Pr[y] * Pr[z | y], enumerated over the four cells.
double ssr_variance(const ScorePair& s, const ErrorRates& e, const Prior& prior);
double ssr_variance(const ScoringRule& rule, const Report& report, const ErrorRates& e,
                    const Prior& prior);

}  // namespace serum
