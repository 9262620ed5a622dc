#include "serum/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "serum/error.hpp"

namespace serum {

const char* to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::brier: return "brier";
    case RuleKind::logarithmic: return "logarithmic";
    case RuleKind::spherical: return "spherical";
    case RuleKind::one_over_prior: return "one-over-prior";
    case RuleKind::posterior_signal: return "posterior-signal";
  }
  return "?";
}

RuleKind parse_rule_kind(const std::string& name) {
  for (auto k : {RuleKind::brier, RuleKind::logarithmic, RuleKind::spherical,
                 RuleKind::one_over_prior, RuleKind::posterior_signal}) {
    if (name == to_string(k)) return k;
  }
  throw ValidationError("unknown scoring rule '" + name +
                        "' (expected brier|logarithmic|spherical|one-over-prior|posterior-signal)");
}

ScoringRule ScoringRule::brier() { return ScoringRule(RuleKind::brier); }

ScoringRule ScoringRule::logarithmic(double clamp) {
  if (!(clamp > 0.0 && clamp < 0.5)) {
    throw ValidationError("logarithmic clamp must lie in (0, 0.5)");
  }
  ScoringRule r(RuleKind::logarithmic);
  r.log_clamp_ = clamp;
  return r;
}

ScoringRule ScoringRule::spherical() { return ScoringRule(RuleKind::spherical); }

ScoringRule ScoringRule::one_over_prior(const Prior& prior) {
  ScoringRule r(RuleKind::one_over_prior);
  r.prior_ = Prior::make(prior.p0, prior.p1);
  return r;
}

ScoringRule ScoringRule::posterior_signal(const Prior& prior, const ErrorRates& reporter) {
  ScoringRule r(RuleKind::posterior_signal);
  r.prior_ = Prior::make(prior.p0, prior.p1);
  r.reporter_ = ErrorRates::make(reporter.e1, reporter.e0);
  return r;
}

ScoringRule ScoringRule::with_prior(const Prior& prior) const {
  if (!takes_signal()) return *this;
  ScoringRule r = *this;
  r.prior_ = Prior::make(prior.p0, prior.p1);
  return r;
}

namespace {

double brier_score(double p, int y) {
  const double d = p - static_cast<double>(y);
  return 1.0 - d * d;
}

}  // namespace

double ScoringRule::score(const Report& report, int outcome) const {
  check_binary(outcome, "outcome");
  if (takes_signal()) {
    const auto* s = std::get_if<Signal>(&report);
    if (s == nullptr) {
      throw ValidationError(std::string(to_string(kind_)) + " scores signal reports only");
    }
    check_binary(s->value, "signal report");
    if (kind_ == RuleKind::one_over_prior) {
      if (s->value != outcome) return 0.0;
      return 1.0 / prior_->mass(outcome);
    }
    return brier_score(posterior_from_signal(s->value, *reporter_, *prior_), outcome);
  }

  const auto* pred = std::get_if<Prediction>(&report);
  if (pred == nullptr) {
    throw ValidationError(std::string(to_string(kind_)) + " scores prediction reports only");
  }
  const double p = check_unit(pred->value, "prediction report");
  switch (kind_) {
    case RuleKind::brier:
      return brier_score(p, outcome);
    case RuleKind::logarithmic: {
      const double q = std::clamp(p, log_clamp_, 1.0 - log_clamp_);
      return std::log(outcome == 1 ? q : 1.0 - q);
    }
    case RuleKind::spherical: {
      const double norm = std::sqrt(p * p + (1.0 - p) * (1.0 - p));
      return (outcome == 1 ? p : 1.0 - p) / norm;
    }
    default:
      break;
  }
  throw ValidationError("unsupported scoring rule");
}

ScorePair ScorePair::of(const ScoringRule& rule, const Report& report) {
  return ScorePair{rule.score(report, 0), rule.score(report, 1)};
}

double expected_score(const ScoringRule& rule, const Report& report, double belief) {
  check_unit(belief, "belief");
  const ScorePair s = ScorePair::of(rule, report);
  return belief * s.on1 + (1.0 - belief) * s.on0;
}

double brier_divergence(double report, double truth) {
  const double d = truth - report;
  return d * d;
}

double voi_one_over_prior(const ErrorRates& e, double truth, const Prior& prior) {
  check_unit(truth, "true distribution");
  const Prior p = Prior::make(prior.p0, prior.p1);
  return (1.0 - truth) / p.p0 * e.e0 + truth / p.p1 * e.e1;
}

double expected_one_over_prior(const ErrorRates& e, double truth, const Prior& prior) {
  const double base = (1.0 - truth) / prior.p0 + truth / prior.p1;
  return base - voi_one_over_prior(e, truth, prior);
}

double posterior_from_signal(int s, const ErrorRates& e, const Prior& prior) {
  check_binary(s, "signal");
  const double num = s == 1 ? prior.p1 * (1.0 - e.e1) : prior.p1 * e.e1;
  const double other = s == 1 ? prior.p0 * e.e0 : prior.p0 * (1.0 - e.e0);
  const double den = num + other;
  if (!(den > 0.0)) {
    throw DegenerateError("signal has zero probability under the given prior and error rates");
  }
  return num / den;
}

}  // namespace serum
