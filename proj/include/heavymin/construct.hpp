#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "heavymin/risk.hpp"
#include "heavymin/targets.hpp"

namespace heavymin {

// How the next breakpoint is chosen.
//
//   kPaperMinimal: increment max{1, exp(R_F(ginv(a_l)))}, the conservative
//     recursion driven by the target risk alone.  For family plans the
//     increment is additionally floored at the frozen-set requirement
//     (see ConstructionPlan notes); for pair plans the floor is never
//     active, so the recursion is exactly the one above.
//   kExactMinimal: increment max{1, exp(sum of frozen risks at ginv(a_l))},
//     the tightest choice honoring the per-interval certificate; every
//     certificate equals 1.
//   kExplicit: breakpoints supplied by the caller; certificates are
//     computed, not enforced.
enum class Policy { kExactMinimal, kPaperMinimal, kExplicit };

const char* to_string(Policy p);
Policy policy_from_string(const std::string& s);

struct Horizon {
  int intervals = 0;     // build this many intervals (when > 0)
  double x_bound = 0.0;  // or extend until a_L >= x_bound (when > 0)
};

struct PlanInterval {
  std::vector<int> frozen;  // 0-based component indices flat on (a_l, a_{l+1}]
  WideReal gap;             // a_{l+1} - a_l
  // log of (gap * exp(-S_l)) where S_l is the frozen-risk sum at
  // ginv(a_l), taken exactly when ginv(a_l) <= a_l and as a conservative
  // upper bound otherwise (so the stored value is a guaranteed lower
  // bound on the finished-plan certificate).  Exactly 0.0 under
  // kExactMinimal.  +inf when the certificate overflows double range.
  double log_certificate = 0.0;
};

// A freeze/track construction: breakpoints 0 = a_0 < a_1 < ..., one frozen
// index set per interval cycling through all (k-1)-subsets of {1..n} in
// lexicographic order, everything else tracking the target risk.
//
// Immutable after construction; share freely across threads.  extend()
// requires exclusive access.
class ConstructionPlan {
 public:
  int n() const { return n_; }
  int k() const { return k_; }
  Policy policy() const { return policy_; }
  const TargetDistribution& target() const { return target_; }
  const GrowthFunction& gauge() const { return gauge_; }
  const std::vector<std::vector<int>>& subset_cycle() const { return cycle_; }
  const std::vector<WideReal>& breakpoints() const { return breakpoints_; }
  const std::vector<PlanInterval>& intervals() const { return intervals_; }
  // values()[i][l] = R_i(a_l); segments()[i][l] covers (a_l, a_{l+1}]
  const std::vector<std::vector<WideReal>>& values() const { return values_; }
  const std::vector<std::vector<RiskSegment>>& segments() const {
    return segments_;
  }
  bool overflow_truncated() const { return overflow_truncated_; }
  std::size_t interval_count() const { return intervals_.size(); }

  // Component risks as standalone evaluable functions.
  std::vector<RiskFunction> component_risks() const;

  void extend(int more_intervals);

 private:
  friend class PlanBuilder;
  ConstructionPlan(TargetDistribution t, GrowthFunction g)
      : target_(std::move(t)), gauge_(std::move(g)) {}

  TargetDistribution target_;
  GrowthFunction gauge_;
  Policy policy_ = Policy::kExactMinimal;
  int n_ = 0, k_ = 0;
  std::vector<std::vector<int>> cycle_;
  std::vector<WideReal> breakpoints_;
  std::vector<PlanInterval> intervals_;
  std::vector<std::vector<WideReal>> values_;
  std::vector<std::vector<RiskSegment>> segments_;
  std::vector<double> explicit_seq_;  // kExplicit only
  bool overflow_truncated_ = false;
};

// n component distributions plus the plan that produced them.  For the
// square-root split there is no plan (both components are closed forms).
struct HeavyFamily {
  int n = 0, k = 0;
  TargetDistribution target;
  GrowthFunction gauge;
  std::shared_ptr<const ConstructionPlan> plan;  // null for sqrt_split
  std::vector<RiskFunction> risks;
  std::string note;
};

// Two components alternating freeze/track so that R_1 + R_2 = R_F exactly
// while each frozen stretch keeps its certificate at or above 1.
HeavyFamily construct_pair(const TargetDistribution& target,
                           const GrowthFunction& gauge, Policy policy,
                           Horizon horizon);

// n components, frozen sets cycling through all C(n, k-1) subsets; every
// k-subset of the results is dominated by F and every (k-1)-subset carries
// divergence certificates.  Requires 1 < k <= n.
HeavyFamily construct_family(const TargetDistribution& target,
                             const GrowthFunction& gauge, int n, int k,
                             Policy policy, Horizon horizon);

// Explicit breakpoints (kExplicit policy); seq must start at 0 and be
// strictly increasing.
HeavyFamily construct_explicit(const TargetDistribution& target,
                               const GrowthFunction& gauge, int n, int k,
                               const std::vector<double>& seq);

// The conservative breakpoint recursion by itself:
//   a_0 = 0, a_{j+1} = a_j + max{1, exp(R_F(ginv(a_j)))}.
// Returns up to `count` terms; stops early only if the representation
// saturates.
std::vector<WideReal> minimal_sequence(const TargetDistribution& target,
                                       const GrowthFunction& gauge, int count);

// Closed-form breakpoint sequences for the three worked (target, gauge)
// pairings, indexed from k = 1:
//   kExponential: F tail e^(-alpha x),  g = e^(beta x),   needs beta < alpha;
//                 log a_k = log(2) * sum_{j<=k} (alpha/beta)^j
//   kPolynomial:  F tail (1+x)^-alpha,  g = x^beta,       needs beta+1 < alpha;
//                 same log formula
//   kWeibull:     F tail e^(-x^alpha),  g = e^(x^beta),   needs 0<beta<alpha<1;
//                 log log a_k = sum_{j<=k} (alpha/beta)^j
enum class ExampleFamily { kExponential, kPolynomial, kWeibull };

std::vector<WideReal> example_sequence(ExampleFamily family, double alpha,
                                       double beta, int count);

// Matching (target, gauge) pair for an example family.
TargetDistribution example_target(ExampleFamily family, double alpha);
GrowthFunction example_gauge(ExampleFamily family, double beta);

struct SequenceValidation {
  struct Interval {
    int index = 0;
    std::vector<int> frozen;
    double gap = 0.0;          // +inf when beyond double
    bool gap_ok = false;       // gap >= 1
    double log_certificate = 0.0;
    bool certificate_ok = false;  // certificate >= 1 - kRelTol
  };
  std::vector<Interval> intervals;
  bool all_ok = false;
};

// Checks a user-supplied breakpoint sequence against the coverage and
// certificate constraints under the (n, k) freeze cycle.  Pair rule is
// n = k = 2.  Rejects non-monotone input.
SequenceValidation validate_explicit_sequence(const TargetDistribution& target,
                                              const GrowthFunction& gauge,
                                              const std::vector<double>& seq,
                                              int n = 2, int k = 2);

// Two independent copies of the square-root tail split: both components
// have risk R_F/2, so their minimum has distribution F.  The components
// are generally *not* gauge-heavy; for an exponential target with gauge
// e^(beta x) they are heavy precisely when beta > alpha/2.
HeavyFamily sqrt_split(const TargetDistribution& target);

// Lexicographic (k-1)-subsets of {0..n-1}.
std::vector<std::vector<int>> subset_cycle(int n, int k);

// Partial sums sum_{j<=k} (alpha/beta)^j behind the closed-form sequences
// (the native domain of the log / log-log columns).
std::vector<double> example_sequence_sums(ExampleFamily family, double alpha,
                                          double beta, int count);

// Rebuild a plan from stored breakpoints and gaps (deserialization);
// segment state is replayed, certificates are adopted as stored.
std::shared_ptr<const ConstructionPlan> rebuild_plan(
    const TargetDistribution& target, const GrowthFunction& gauge,
    Policy policy, int n, int k, const std::vector<WideReal>& breakpoints,
    const std::vector<WideReal>& gaps,
    const std::vector<double>& log_certificates, bool overflow_truncated);

// Recompute interval l's certificate from the plan's own state, using the
// same evaluation the builder used; on an untampered plan this reproduces
// the stored value bit-for-bit.
double recompute_log_certificate(const ConstructionPlan& plan, std::size_t l);

}  // namespace heavymin
