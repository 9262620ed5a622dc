#pragma once

// Strictly proper scoring rules for binary outcomes, and the
// value-of-information quantities that rank reporters under them.

#include <optional>
#include <string>

#include "serum/types.hpp"

namespace serum {

enum class RuleKind { brier, logarithmic, spherical, one_over_prior, posterior_signal };

const char* to_string(RuleKind kind);
RuleKind parse_rule_kind(const std::string& name);

/// A scoring rule S(report, y). Prediction rules (brier, logarithmic,
/// spherical) take a Prediction; signal rules (one-over-prior,
/// posterior-signal) take a Signal and carry the prior they were built with.
class ScoringRule {
 public:
  static constexpr double kDefaultLogClamp = 1e-9;

  static ScoringRule brier();
  /// ln(p_y) with p clamped to [clamp, 1 - clamp].
  static ScoringRule logarithmic(double clamp = kDefaultLogClamp);
  static ScoringRule spherical();
  /// 1(s = y) / Pr[y = s].
  static ScoringRule one_over_prior(const Prior& prior);
  /// Brier score of the Bayes posterior implied by the reported signal:
  /// S(s, y) = Brier(Pr[y = 1 | s], y). Needs the reporter's error rates.
  static ScoringRule posterior_signal(const Prior& prior, const ErrorRates& reporter);

  RuleKind kind() const { return kind_; }
  bool takes_signal() const {
    return kind_ == RuleKind::one_over_prior || kind_ == RuleKind::posterior_signal;
  }
  const std::optional<Prior>& prior() const { return prior_; }
  const std::optional<ErrorRates>& reporter_rates() const { return reporter_; }
  double log_clamp() const { return log_clamp_; }

  /// Same rule bound to a different prior (signal rules only).
  ScoringRule with_prior(const Prior& prior) const;

  /// S(report, outcome). Throws ValidationError on a report-type mismatch or
  /// an out-of-range report/outcome.
  double score(const Report& report, int outcome) const;

 private:
  explicit ScoringRule(RuleKind kind) : kind_(kind) {}

  RuleKind kind_;
  std::optional<Prior> prior_;
  std::optional<ErrorRates> reporter_;
  double log_clamp_ = kDefaultLogClamp;
};

/// (S(a, 0), S(a, 1)) for a fixed report. Everything downstream of a
/// scoring rule in the surrogate construction depends only on this pair.
struct ScorePair {
  double on0 = 0.0;
  double on1 = 0.0;

  double at(int y) const { return y == 1 ? on1 : on0; }
  static ScorePair of(const ScoringRule& rule, const Report& report);
};

/// belief * S(report, 1) + (1 - belief) * S(report, 0).
double expected_score(const ScoringRule& rule, const Report& report, double belief);

/// (truth - report)^2: the Brier divergence between a prediction and the
/// true distribution of y. Smaller means a higher expected Brier score.
double brier_divergence(double report, double truth);

/// Weighted sum of errors (1 - p*)/Pr[y=0] * e0 + p*/Pr[y=1] * e1 that
/// ranks signal reporters under the 1/Prior rule (smaller is better).
double voi_one_over_prior(const ErrorRates& e, double truth, const Prior& prior);

/// Expected 1/Prior score of a truthful reporter with rates e when
/// Pr[y = 1] = truth: (1-p*)/Pr[y=0] + p*/Pr[y=1] - voi_one_over_prior.
double expected_one_over_prior(const ErrorRates& e, double truth, const Prior& prior);

/// Pr[y = 1 | s] by Bayes for a reporter with rates e under `prior`.
/// Throws DegenerateError if Pr[s] = 0.
double posterior_from_signal(int s, const ErrorRates& e, const Prior& prior);

}  // namespace serum
