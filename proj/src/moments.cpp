#include "serum/moments.hpp"

#include <algorithm>
#include <cmath>

#include "serum/error.hpp"

namespace serum {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::ok: return "ok";
    case SolveStatus::degenerate: return "degenerate";
    case SolveStatus::no_real_root: return "no_real_root";
    case SolveStatus::ambiguous: return "ambiguous";
  }
  return "?";
}

Moments forward_moments(const Prior& prior, double u, double v) {
  check_unit(u, "u");
  check_unit(v, "v");
  return Moments{prior.p0 * u + prior.p1 * v, prior.p0 * u * u + prior.p1 * v * v,
                 prior.p0 * u * u * u + prior.p1 * v * v * v};
}

Moments forward_moments(const Prior& prior, const ErrorRates& pool) {
  return forward_moments(prior, pool.e0, 1.0 - pool.e1);
}

namespace {

void check_sample(std::span<const Triple> tasks, std::size_t min_tasks) {
  if (tasks.empty() || tasks.size() < min_tasks) {
    throw ValidationError("moment estimation needs at least " + std::to_string(min_tasks) +
                          " tasks, got " + std::to_string(tasks.size()));
  }
  for (const auto& t : tasks) {
    for (auto x : t) {
      if (x > 1) throw ValidationError("malformed triple: reports must be 0 or 1");
    }
  }
}

}  // namespace

Moments estimate_moments(std::span<const Triple> tasks, std::size_t min_tasks) {
  check_sample(tasks, min_tasks);
  std::size_t n1 = 0, n2 = 0, n3 = 0;
  for (const auto& t : tasks) {
    n1 += t[0];
    n2 += t[0] & t[1];
    n3 += t[0] & t[1] & t[2];
  }
  const auto k = static_cast<double>(tasks.size());
  return Moments{n1 / k, n2 / k, n3 / k};
}

Moments estimate_moments_symmetric(std::span<const Triple> tasks, std::size_t min_tasks) {
  check_sample(tasks, min_tasks);
  std::size_t n1 = 0, n2 = 0, n3 = 0;
  for (const auto& t : tasks) {
    n1 += t[0] + t[1] + t[2];
    n2 += (t[0] & t[1]) + (t[0] & t[2]) + (t[1] & t[2]);
    n3 += t[0] & t[1] & t[2];
  }
  const auto k = static_cast<double>(tasks.size());
  return Moments{n1 / (3.0 * k), n2 / (3.0 * k), n3 / k};
}

bool informativeness(const ErrorRates& e, double kappa) {
  if (kappa < 0.0) throw ValidationError("kappa must be nonnegative");
  return std::abs(e.e1 + e.e0 - 1.0) > kappa;
}

namespace {

double clamp_unit(double x, bool& clamped) {
  const double c = std::clamp(x, 0.0, 1.0);
  if (c != x) clamped = true;
  return c;
}

/// The unique solution on the e0 + e1 = 1 line: u = v = c1.
EstimationResult independent_pool(const Moments& m, Diagnostics diag) {
  EstimationResult r;
  const double u = clamp_unit(m.c1, diag.clamped);
  r.rates = ErrorRates{1.0 - u, u};
  r.informative = false;
  r.diagnostics = diag;
  return r;
}

}  // namespace

EstimationResult solve_known_prior(const Moments& m, const Prior& prior,
                                   const SolverOptions& opts) {
  if (prior.near_uniform(opts.uniform_prior_tol)) {
    throw ValidationError("known-prior solver needs p0 != p1");
  }
  Diagnostics diag;
  diag.spread = m.spread();
  if (std::abs(diag.spread) <= opts.degeneracy) {
    diag.status = SolveStatus::degenerate;
    return independent_pool(m, diag);
  }
  const double a = (m.c3 - m.c2 * m.c1) / diag.spread;
  diag.ratio_a = a;
  diag.ratio_b = (m.c1 * m.c3 - m.c2 * m.c2) / diag.spread;
  diag.discriminant = a * a - 4.0 * diag.ratio_b;

  const double gap = prior.p1 - prior.p0;
  const double u = (a * prior.p1 - m.c1) / gap;
  const double v = (m.c1 - a * prior.p0) / gap;

  EstimationResult r;
  r.rates.e0 = clamp_unit(u, diag.clamped);
  r.rates.e1 = clamp_unit(1.0 - v, diag.clamped);
  r.informative = informativeness(r.rates, opts.kappa);
  r.diagnostics = diag;
  return r;
}

EstimationResult solve_unknown_prior(const Moments& m, bool p0_majority,
                                     const SolverOptions& opts) {
  Diagnostics diag;
  diag.spread = m.spread();
  if (std::abs(diag.spread) <= opts.degeneracy) {
    diag.status = SolveStatus::degenerate;
    return independent_pool(m, diag);
  }
  const double a = (m.c3 - m.c1 * m.c2) / diag.spread;
  const double b = (m.c1 * m.c3 - m.c2 * m.c2) / diag.spread;
  diag.ratio_a = a;
  diag.ratio_b = b;
  double disc = a * a - 4.0 * b;
  diag.discriminant = disc;
  if (disc < 0.0) {
    if (disc < -opts.discriminant_tol) {
      diag.status = SolveStatus::no_real_root;
      return independent_pool(m, diag);
    }
    disc = 0.0;
  }
  const double root = std::sqrt(disc);
  const double hi = 0.5 * (a + root);
  const double lo = 0.5 * (a - root);
  if (hi - lo <= opts.degeneracy) {
    diag.status = SolveStatus::degenerate;
    return independent_pool(m, diag);
  }

  // Candidate with u = lo, v = hi; its mirror has p0' = 1 - p0 and u, v swapped.
  const double p0_lo = (m.c1 - hi) / (lo - hi);
  if (std::abs(p0_lo - 0.5) <= opts.ambiguity_tol) {
    diag.status = SolveStatus::ambiguous;
    return independent_pool(m, diag);
  }
  const bool take_lo = (p0_lo > 0.5) == p0_majority;
  const double u = take_lo ? lo : hi;
  const double v = take_lo ? hi : lo;
  double p0 = take_lo ? p0_lo : 1.0 - p0_lo;

  constexpr double kPriorFloor = 1e-6;
  if (p0 < kPriorFloor || p0 > 1.0 - kPriorFloor) {
    p0 = std::clamp(p0, kPriorFloor, 1.0 - kPriorFloor);
    diag.clamped = true;
  }

  EstimationResult r;
  r.rates.e0 = clamp_unit(u, diag.clamped);
  r.rates.e1 = clamp_unit(1.0 - v, diag.clamped);
  r.prior_recovered = Prior{p0, 1.0 - p0};
  r.informative = informativeness(r.rates, opts.kappa);
  r.diagnostics = diag;
  return r;
}

double predict_c4(const Moments& m, double degeneracy) {
  const double spread = m.spread();
  if (std::abs(spread) <= degeneracy) {
    throw DegenerateError("moments are degenerate (c2 = c1^2); c4 is not identified");
  }
  const double a = (m.c3 - m.c1 * m.c2) / spread;
  const double b = (m.c1 * m.c3 - m.c2 * m.c2) / spread;
  return m.c3 * a - m.c2 * b;
}

}  // namespace serum
