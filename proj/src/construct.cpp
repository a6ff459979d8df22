#include "heavymin/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace heavymin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxIntervals = 1u << 20;

WideReal wide_max(const WideReal& a, const WideReal& b) {
  return a < b ? b : a;
}

// R_i(y) from the state built so far; valid for y <= current right bound.
WideReal partial_risk(const TargetDistribution& target,
                      const std::vector<WideReal>& breakpoints,
                      const std::vector<RiskSegment>& segments,
                      const WideReal& y) {
  if (!(y > breakpoints.front())) return WideReal::zero();
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), y);
  std::size_t l = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  const RiskSegment& seg = segments[l];
  if (seg.flat) return seg.level;
  return sub_clamped(target.risk_wide(y), seg.level);
}

}  // namespace

const char* to_string(Policy p) {
  switch (p) {
    case Policy::kExactMinimal:
      return "exact-minimal";
    case Policy::kPaperMinimal:
      return "paper-minimal";
    case Policy::kExplicit:
      return "explicit";
  }
  return "?";
}

Policy policy_from_string(const std::string& s) {
  if (s == "exact-minimal") return Policy::kExactMinimal;
  if (s == "paper-minimal") return Policy::kPaperMinimal;
  if (s == "explicit") return Policy::kExplicit;
  throw std::invalid_argument("unknown policy '" + s +
                              "' (expected exact-minimal, paper-minimal or "
                              "explicit)");
}

std::vector<std::vector<int>> subset_cycle(int n, int k) {
  int r = k - 1;
  std::vector<std::vector<int>> out;
  std::vector<int> cur(r);
  for (int i = 0; i < r; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    int i = r - 1;
    while (i >= 0 && cur[i] == n - r + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < r; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

namespace detail {

// The frozen-risk sum S_l entering interval l's certificate.
//
// With y = ginv(a_l) <= a_l the built prefix already determines every
// frozen risk at y, so S_l is exact and final.  With y > a_l (slow gauges)
// later intervals may still grow those risks at y, so we bound the final
// sum from above by "current value plus (k-1) times the target increment
// beyond a_l"; certificates computed against this bound are guaranteed
// lower bounds for the finished plan.
WideReal frozen_sum(const TargetDistribution& target,
                    const std::vector<int>& frozen,
                    const std::vector<WideReal>& breakpoints,
                    const std::vector<std::vector<RiskSegment>>& segments,
                    const std::vector<std::vector<WideReal>>& values,
                    const WideReal& a, const WideReal& y, int k) {
  WideReal s = WideReal::zero();
  if (y.is_neg_infinity() || !(y > breakpoints.front())) return s;
  if (y <= a) {
    for (int i : frozen)
      s += partial_risk(target, breakpoints, segments[i], y);
    return s;
  }
  std::size_t at = breakpoints.size() - 1;
  for (int i : frozen) s += values[i][at];
  WideReal excess = sub_clamped(target.risk_wide(y), target.risk_wide(a));
  if (!excess.is_zero()) s += excess.scaled(static_cast<double>(k - 1));
  return s;
}

// log(gap * exp(-S)).  The minimal policies choose gap = max(1, e^S) (or
// larger), so equality short-circuits to an exact 0.
double log_certificate(Policy policy, const WideReal& gap, const WideReal& s) {
  WideReal tight = wide_max(WideReal::from_double(1.0), exp_of(s));
  if (policy != Policy::kExplicit && gap == tight) return 0.0;
  WideReal lg = log_of(gap);
  if (lg == s) return 0.0;
  if (lg > s) return sub_clamped(lg, s).as_double();
  return -sub_clamped(s, lg).as_double();
}

}  // namespace detail

class PlanBuilder {
 public:
  static std::shared_ptr<ConstructionPlan> make(
      const TargetDistribution& target, const GrowthFunction& gauge, int n,
      int k, Policy policy, Horizon horizon,
      const std::vector<double>* explicit_seq) {
    if (!(k > 1) || !(k <= n))
      throw HypothesisError("requires 1 < k <= n (got n=" + std::to_string(n) +
                            ", k=" + std::to_string(k) + ")");
    auto plan = std::shared_ptr<ConstructionPlan>(
        new ConstructionPlan(target, gauge));
    plan->policy_ = policy;
    plan->n_ = n;
    plan->k_ = k;
    plan->cycle_ = subset_cycle(n, k);
    plan->breakpoints_ = {WideReal::zero()};
    plan->values_.assign(n, {WideReal::zero()});
    plan->segments_.assign(n, {});
    if (policy == Policy::kExplicit) {
      if (!explicit_seq)
        throw std::invalid_argument("explicit policy requires a sequence");
      validate_sequence(*explicit_seq);
      plan->explicit_seq_ = *explicit_seq;
      horizon.intervals = static_cast<int>(explicit_seq->size()) - 1;
      horizon.x_bound = 0.0;
    } else {
      if (explicit_seq)
        throw std::invalid_argument("sequence given without explicit policy");
      if (horizon.intervals <= 0 && !(horizon.x_bound > 0.0))
        throw std::invalid_argument("horizon must request >= 1 interval or a "
                                    "positive x bound");
    }
    run(*plan, horizon);
    return plan;
  }

  static void extend(ConstructionPlan& plan, int more) {
    if (more <= 0) throw std::invalid_argument("extend requires more > 0");
    if (plan.policy_ == Policy::kExplicit)
      throw std::invalid_argument("explicit plans cannot be extended");
    Horizon h;
    h.intervals = static_cast<int>(plan.interval_count()) + more;
    run(plan, h);
  }

  // Rebuild segment/value state from stored breakpoints and gaps; the
  // stored certificates are adopted verbatim (verification recomputes and
  // compares them).
  static std::shared_ptr<ConstructionPlan> rebuild(
      const TargetDistribution& target, const GrowthFunction& gauge,
      Policy policy, int n, int k, const std::vector<WideReal>& breakpoints,
      const std::vector<WideReal>& gaps,
      const std::vector<double>& log_certificates, bool overflow_truncated) {
    if (!(k > 1) || !(k <= n))
      throw HypothesisError("requires 1 < k <= n (got n=" + std::to_string(n) +
                            ", k=" + std::to_string(k) + ")");
    if (breakpoints.size() < 2 || gaps.size() + 1 != breakpoints.size() ||
        log_certificates.size() != gaps.size())
      throw std::invalid_argument("inconsistent plan document");
    auto plan = std::shared_ptr<ConstructionPlan>(
        new ConstructionPlan(target, gauge));
    plan->policy_ = policy;
    plan->n_ = n;
    plan->k_ = k;
    plan->cycle_ = subset_cycle(n, k);
    plan->breakpoints_ = {breakpoints.front()};
    plan->values_.assign(n, {WideReal::zero()});
    plan->segments_.assign(n, {});
    if (!breakpoints.front().is_zero())
      throw std::invalid_argument("plan must start at a_0 = 0");
    for (std::size_t l = 0; l + 1 < breakpoints.size(); ++l) {
      if (!(breakpoints[l + 1] > breakpoints[l]))
        throw std::invalid_argument("plan breakpoints must increase");
      append_interval(*plan, breakpoints[l + 1], gaps[l],
                      log_certificates[l]);
    }
    plan->overflow_truncated_ = overflow_truncated;
    return plan;
  }

  // Certificate recomputation against the plan's own state (shared with
  // the builder so stored and recomputed values agree bit-for-bit).
  static double recompute_log_certificate(const ConstructionPlan& plan,
                                          std::size_t l) {
    const auto& frozen = plan.intervals_[l].frozen;
    std::vector<WideReal> prefix(plan.breakpoints_.begin(),
                                 plan.breakpoints_.begin() + l + 1);
    // frozen_sum only reads segments below index l, so passing the full
    // segment vectors with a truncated breakpoint list reproduces the
    // builder's view at step l.
    std::vector<std::vector<RiskSegment>> segs;
    segs.reserve(plan.segments_.size());
    for (const auto& s : plan.segments_)
      segs.emplace_back(s.begin(), s.begin() + l);
    std::vector<std::vector<WideReal>> vals;
    vals.reserve(plan.values_.size());
    for (const auto& v : plan.values_)
      vals.emplace_back(v.begin(), v.begin() + l + 1);
    const WideReal& a = plan.breakpoints_[l];
    WideReal y = plan.gauge_.inverse_wide(a);
    WideReal s = detail::frozen_sum(plan.target_, frozen, prefix, segs, vals,
                                    a, y, plan.k_);
    return detail::log_certificate(plan.policy_, plan.intervals_[l].gap, s);
  }

 private:
  static void validate_sequence(const std::vector<double>& seq) {
    if (seq.size() < 2)
      throw std::invalid_argument("explicit sequence needs >= 2 points");
    if (seq.front() != 0.0)
      throw std::invalid_argument("explicit sequence must start at 0");
    for (std::size_t i = 1; i < seq.size(); ++i) {
      if (!std::isfinite(seq[i]) || !(seq[i] > seq[i - 1]))
        throw std::invalid_argument(
            "explicit sequence must be finite and strictly increasing");
    }
  }

  static bool horizon_done(const ConstructionPlan& plan, const Horizon& h) {
    std::size_t l = plan.intervals_.size();
    bool more = false;
    if (h.intervals > 0 && l < static_cast<std::size_t>(h.intervals))
      more = true;
    if (h.x_bound > 0.0 &&
        plan.breakpoints_.back() < WideReal::from_double(h.x_bound))
      more = true;
    return !more;
  }

  static void run(ConstructionPlan& plan, const Horizon& horizon) {
    while (!horizon_done(plan, horizon)) {
      std::size_t l = plan.intervals_.size();
      if (l >= kMaxIntervals) {
        plan.overflow_truncated_ = true;
        break;
      }
      const WideReal& a = plan.breakpoints_.back();
      const std::vector<int>& frozen = plan.cycle_[l % plan.cycle_.size()];
      WideReal y = plan.gauge_.inverse_wide(a);
      WideReal s = detail::frozen_sum(plan.target_, frozen, plan.breakpoints_,
                                      plan.segments_, plan.values_, a, y,
                                      plan.k_);
      WideReal gap, a_next;
      if (plan.policy_ == Policy::kExplicit) {
        double lo = plan.explicit_seq_[l], hi = plan.explicit_seq_[l + 1];
        gap = WideReal::from_double(hi - lo);
        a_next = WideReal::from_double(hi);
      } else {
        gap = wide_max(WideReal::from_double(1.0), exp_of(s));
        if (plan.policy_ == Policy::kPaperMinimal)
          gap = wide_max(gap, exp_of(plan.target_.risk_wide(y)));
        a_next = a + gap;
      }
      if (a_next.is_infinity() || !(a_next > a)) {
        // representation exhausted: stop with what is built
        plan.overflow_truncated_ = true;
        break;
      }
      double log_cert = detail::log_certificate(plan.policy_, gap, s);
      append_interval(plan, a_next, gap, log_cert);
    }
  }

  static void append_interval(ConstructionPlan& plan, const WideReal& a_next,
                              const WideReal& gap, double log_cert) {
    std::size_t l = plan.intervals_.size();
    const std::vector<int>& frozen = plan.cycle_[l % plan.cycle_.size()];
    const WideReal& a = plan.breakpoints_.back();
    WideReal rf_a = plan.target_.risk_wide(a);
    WideReal rf_next = plan.target_.risk_wide(a_next);
    std::vector<bool> is_frozen(plan.n_, false);
    for (int i : frozen) is_frozen[i] = true;
    for (int i = 0; i < plan.n_; ++i) {
      WideReal cur = plan.values_[i].back();
      if (is_frozen[i]) {
        plan.segments_[i].push_back({true, cur});
        plan.values_[i].push_back(cur);
      } else {
        WideReal deficit = sub_clamped(rf_a, cur);
        plan.segments_[i].push_back({false, deficit});
        plan.values_[i].push_back(sub_clamped(rf_next, deficit));
      }
    }
    plan.breakpoints_.push_back(a_next);
    plan.intervals_.push_back({frozen, gap, log_cert});
  }
};

std::vector<RiskFunction> ConstructionPlan::component_risks() const {
  std::vector<RiskFunction> out;
  out.reserve(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    auto core = std::make_shared<PiecewiseRiskCore>();
    core->target = target_;
    core->breakpoints = breakpoints_;
    core->segments = segments_[static_cast<std::size_t>(i)];
    core->values = values_[static_cast<std::size_t>(i)];
    out.push_back(RiskFunction::piecewise(std::move(core)));
  }
  return out;
}

void ConstructionPlan::extend(int more_intervals) {
  PlanBuilder::extend(*this, more_intervals);
}

namespace {

HeavyFamily family_from_plan(std::shared_ptr<ConstructionPlan> plan) {
  HeavyFamily fam;
  fam.n = plan->n();
  fam.k = plan->k();
  fam.target = plan->target();
  fam.gauge = plan->gauge();
  fam.risks = plan->component_risks();
  fam.plan = std::move(plan);
  return fam;
}

}  // namespace

HeavyFamily construct_pair(const TargetDistribution& target,
                           const GrowthFunction& gauge, Policy policy,
                           Horizon horizon) {
  return construct_family(target, gauge, 2, 2, policy, horizon);
}

HeavyFamily construct_family(const TargetDistribution& target,
                             const GrowthFunction& gauge, int n, int k,
                             Policy policy, Horizon horizon) {
  if (policy == Policy::kExplicit)
    throw std::invalid_argument(
        "use construct_explicit to supply a breakpoint sequence");
  return family_from_plan(
      PlanBuilder::make(target, gauge, n, k, policy, horizon, nullptr));
}

HeavyFamily construct_explicit(const TargetDistribution& target,
                               const GrowthFunction& gauge, int n, int k,
                               const std::vector<double>& seq) {
  return family_from_plan(PlanBuilder::make(target, gauge, n, k,
                                            Policy::kExplicit, Horizon{},
                                            &seq));
}

std::shared_ptr<const ConstructionPlan> rebuild_plan(
    const TargetDistribution& target, const GrowthFunction& gauge,
    Policy policy, int n, int k, const std::vector<WideReal>& breakpoints,
    const std::vector<WideReal>& gaps,
    const std::vector<double>& log_certificates, bool overflow_truncated) {
  return PlanBuilder::rebuild(target, gauge, policy, n, k, breakpoints, gaps,
                              log_certificates, overflow_truncated);
}

double recompute_log_certificate(const ConstructionPlan& plan, std::size_t l) {
  if (l >= plan.interval_count())
    throw std::out_of_range("interval index beyond plan");
  return PlanBuilder::recompute_log_certificate(plan, l);
}

std::vector<WideReal> minimal_sequence(const TargetDistribution& target,
                                       const GrowthFunction& gauge,
                                       int count) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  std::vector<WideReal> seq{WideReal::zero()};
  while (static_cast<int>(seq.size()) < count) {
    const WideReal& a = seq.back();
    WideReal y = gauge.inverse_wide(a);
    WideReal gap = wide_max(WideReal::from_double(1.0),
                            exp_of(target.risk_wide(y)));
    WideReal a_next = a + gap;
    if (a_next.is_infinity() || !(a_next > a)) break;  // saturated
    seq.push_back(a_next);
  }
  return seq;
}

namespace {

void check_example_params(ExampleFamily family, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw HypothesisError("requires alpha > 0 and beta > 0");
  switch (family) {
    case ExampleFamily::kExponential:
      if (!(beta < alpha))
        throw HypothesisError("exponential example requires beta < alpha");
      break;
    case ExampleFamily::kPolynomial:
      if (!(beta + 1.0 < alpha))
        throw HypothesisError("polynomial example requires beta + 1 < alpha");
      break;
    case ExampleFamily::kWeibull:
      if (!(beta < alpha) || !(alpha < 1.0))
        throw HypothesisError(
            "weibull example requires 0 < beta < alpha < 1");
      break;
  }
}

}  // namespace

TargetDistribution example_target(ExampleFamily family, double alpha) {
  switch (family) {
    case ExampleFamily::kExponential:
      return TargetDistribution::exponential(alpha);
    case ExampleFamily::kPolynomial:
      return TargetDistribution::polynomial(alpha);
    case ExampleFamily::kWeibull:
      return TargetDistribution::weibull(alpha);
  }
  throw std::invalid_argument("unknown example family");
}

GrowthFunction example_gauge(ExampleFamily family, double beta) {
  switch (family) {
    case ExampleFamily::kExponential:
      return GrowthFunction::exp(beta);
    case ExampleFamily::kPolynomial:
      return GrowthFunction::power(beta);
    case ExampleFamily::kWeibull:
      return GrowthFunction::exp_power(beta);
  }
  throw std::invalid_argument("unknown example family");
}

std::vector<double> example_sequence_sums(ExampleFamily family, double alpha,
                                          double beta, int count) {
  check_example_params(family, alpha, beta);
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  double rho = alpha / beta;
  std::vector<double> sums;
  sums.reserve(static_cast<std::size_t>(count));
  double s = 0.0;
  for (int j = 1; j <= count; ++j) {
    s += std::pow(rho, j);
    sums.push_back(s);  // +inf once the partial sum overflows
  }
  return sums;
}

std::vector<WideReal> example_sequence(ExampleFamily family, double alpha,
                                       double beta, int count) {
  std::vector<double> sums = example_sequence_sums(family, alpha, beta, count);
  double rho = alpha / beta;
  double log_rho = std::log(rho);
  std::vector<WideReal> out;
  out.reserve(sums.size());
  double log_sum = -kInf;  // log of the partial sum, for overflowed sums
  for (int j = 1; j <= count; ++j) {
    log_sum = WideReal::logaddexp(log_sum, j * log_rho);
    double s = sums[static_cast<std::size_t>(j - 1)];
    WideReal a;
    if (family == ExampleFamily::kWeibull) {
      // log log a_k equals the partial sum itself
      if (std::isinf(s)) break;  // beyond the log-log domain
      a = WideReal::from_loglog(s);
    } else {
      // log a_k = log(2) * partial sum
      if (std::isfinite(s) && std::isfinite(std::numbers::ln2 * s))
        a = WideReal::from_log(std::numbers::ln2 * s);
      else
        a = WideReal::from_loglog(std::log(std::numbers::ln2) + log_sum);
    }
    if (a.is_infinity()) break;
    out.push_back(a);
  }
  return out;
}

SequenceValidation validate_explicit_sequence(const TargetDistribution& target,
                                              const GrowthFunction& gauge,
                                              const std::vector<double>& seq,
                                              int n, int k) {
  HeavyFamily fam = construct_explicit(target, gauge, n, k, seq);
  const ConstructionPlan& plan = *fam.plan;
  SequenceValidation out;
  out.all_ok = true;
  double cert_floor = std::log1p(-kRelTol);
  for (std::size_t l = 0; l < plan.interval_count(); ++l) {
    const PlanInterval& iv = plan.intervals()[l];
    SequenceValidation::Interval rep;
    rep.index = static_cast<int>(l);
    rep.frozen = iv.frozen;
    rep.gap = iv.gap.as_double();
    rep.gap_ok = iv.gap >= WideReal::from_double(1.0);
    rep.log_certificate = iv.log_certificate;
    rep.certificate_ok = iv.log_certificate >= cert_floor;
    out.all_ok = out.all_ok && rep.gap_ok && rep.certificate_ok;
    out.intervals.push_back(std::move(rep));
  }
  return out;
}

HeavyFamily sqrt_split(const TargetDistribution& target) {
  HeavyFamily fam;
  fam.n = 2;
  fam.k = 2;
  fam.target = target;
  fam.gauge = GrowthFunction::identity_plus();
  fam.risks = {RiskFunction::scaled_target(target, 0.5),
               RiskFunction::scaled_target(target, 0.5)};
  fam.note =
      "square-root tail split: both components carry half the target risk; "
      "they are not gauge-heavy in general (for an exponential target with "
      "gauge e^(beta x), only when beta > alpha/2)";
  return fam;
}

}  // namespace heavymin
