#pragma once

// Estimation of a reference pool's aggregate error rates from
// matching-on-1 statistics.
//
// Convention: u = Pr[report = 1 | y = 0] = e0, v = Pr[report = 1 | y = 1] = 1 - e1,
// and c_k = p0 u^k + p1 v^k is the probability that k reports on the same
// task (from distinct reference agents) are all 1.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "serum/types.hpp"

namespace serum {

struct Moments {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  /// c2 - c1^2: zero exactly when the pool is independent of y.
  double spread() const { return c2 - c1 * c1; }
};

/// Three binary reports on one task, in assignee order r1, r2, r3.
using Triple = std::array<std::uint8_t, 3>;

Moments forward_moments(const Prior& prior, double u, double v);

/// Pool-level convenience: forward_moments with u = e0, v = 1 - e1.
Moments forward_moments(const Prior& prior, const ErrorRates& pool);

inline constexpr std::size_t kDefaultMinTasks = 30;

/// Positional estimators: c1 from r1, c2 from r1 = r2 = 1, c3 from all three.
/// Throws ValidationError for fewer than `min_tasks` triples or a non-binary entry.
Moments estimate_moments(std::span<const Triple> tasks, std::size_t min_tasks = kDefaultMinTasks);

/// Symmetric estimators: c1 averages all three positions and c2 all three
/// pairs. Same expectation as the positional form, lower variance.
Moments estimate_moments_symmetric(std::span<const Triple> tasks,
                                   std::size_t min_tasks = kDefaultMinTasks);

struct SolverOptions {
  double kappa = 0.05;             // informativeness margin on |e1 + e0 - 1|
  double degeneracy = 1e-9;        // floor on |c2 - c1^2|
  double discriminant_tol = 1e-9;  // negative discriminants above -tol clamp to 0
  double uniform_prior_tol = 1e-9; // |p0 - p1| at or below this is "uniform"
  double ambiguity_tol = 1e-6;     // recovered p0 within this of 0.5 is ambiguous
};

enum class SolveStatus {
  ok,            // unique solution found
  degenerate,    // c2 ~ c1^2: pool independent of y (includes collusion)
  no_real_root,  // discriminant clearly negative (sampling noise)
  ambiguous,     // recovered prior too close to 0.5 to use the majority bit
};

const char* to_string(SolveStatus s);

struct Diagnostics {
  SolveStatus status = SolveStatus::ok;
  double spread = 0.0;        // c2 - c1^2
  double ratio_a = 0.0;       // (c3 - c1 c2) / (c2 - c1^2) = u + v
  double ratio_b = 0.0;       // (c1 c3 - c2^2) / (c2 - c1^2) = u v
  double discriminant = 0.0;  // a^2 - 4b
  bool clamped = false;       // a solved rate or prior left [0, 1]
  std::size_t sample_count = 0;
};

struct EstimationResult {
  ErrorRates rates;  // e1z, e0z of the reference pool, clamped to [0, 1]
  std::optional<Prior> prior_recovered;
  bool informative = false;
  Diagnostics diagnostics;
};

/// |e1 + e0 - 1| > kappa.
bool informativeness(const ErrorRates& e, double kappa);

/// Closed-form solution with a known prior. Throws ValidationError when the
/// prior is (near) uniform. Degenerate moments return the unique
/// e0 + e1 = 1 solution (e0 = c1) flagged uninformative.
EstimationResult solve_known_prior(const Moments& m, const Prior& prior,
                                   const SolverOptions& opts = {});

/// Recovers (p0, e0, e1) from the moments and the single bit 1(p0 > 0.5).
/// Never throws on data-driven failures; those come back uninformative with
/// a non-ok status.
EstimationResult solve_unknown_prior(const Moments& m, bool p0_majority,
                                     const SolverOptions& opts = {});

/// Fourth matching moment implied by the first three:
/// c4 = c3 (u + v) - c2 u v. Throws DegenerateError when c2 ~ c1^2.
double predict_c4(const Moments& m, double degeneracy = 1e-9);

}  // namespace serum
