#include "serum/types.hpp"

#include <cmath>

#include "serum/error.hpp"

namespace serum {

Prior Prior::from_p1(double p1) { return make(1.0 - p1, p1); }

Prior Prior::make(double p0, double p1) {
  if (!std::isfinite(p0) || !std::isfinite(p1) || std::abs(p0 + p1 - 1.0) > 1e-12) {
    throw ValidationError("prior must satisfy p0 + p1 = 1");
  }
  if (!(p0 > 0.0 && p0 < 1.0)) {
    throw ValidationError("prior must satisfy 0 < p0 < 1");
  }
  return Prior{p0, p1};
}

ErrorRates ErrorRates::make(double e1, double e0) {
  check_unit(e1, "error rate e1");
  check_unit(e0, "error rate e0");
  return ErrorRates{e1, e0};
}

const char* to_string(Elicitation e) {
  return e == Elicitation::signal ? "signal" : "prediction";
}

Elicitation parse_elicitation(const std::string& s) {
  if (s == "signal") return Elicitation::signal;
  if (s == "prediction") return Elicitation::prediction;
  throw ValidationError("unknown elicitation '" + s + "' (expected signal|prediction)");
}

int check_binary(int value, const char* what) {
  if (value != 0 && value != 1) {
    throw ValidationError(std::string(what) + " must be 0 or 1");
  }
  return value;
}

double check_unit(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0, 1]");
  }
  return value;
}

const Response* Task::find(std::size_t agent) const {
  for (const auto& r : responses) {
    if (r.agent == agent) return &r;
  }
  return nullptr;
}

bool ReportTable::has_truth() const {
  if (tasks.empty()) return false;
  for (const auto& t : tasks) {
    if (!t.truth) return false;
  }
  return true;
}

Report report_of(const Response& r, Elicitation e) {
  if (e == Elicitation::signal) {
    if (!r.signal) throw ValidationError("signal elicitation needs a signal on every report");
    return Signal{*r.signal};
  }
  if (!r.prediction) {
    throw ValidationError("prediction elicitation needs a prediction on every report");
  }
  return Prediction{*r.prediction};
}

}  // namespace serum
