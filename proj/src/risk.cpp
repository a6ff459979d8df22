#include "heavymin/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace heavymin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Index of the interval (a_l, a_{l+1}] containing x; requires
// a_0 < x <= a_L.
std::size_t interval_index(const std::vector<WideReal>& bps, const WideReal& x) {
  auto it = std::lower_bound(bps.begin(), bps.end(), x);
  return static_cast<std::size_t>(it - bps.begin()) - 1;
}

}  // namespace

WideReal PiecewiseRiskCore::eval_wide(const WideReal& x) const {
  if (!(x > breakpoints.front())) return WideReal::zero();
  if (x > breakpoints.back()) {
    std::ostringstream os;
    os << "risk evaluation at x beyond the built horizon (last breakpoint ";
    if (breakpoints.back().fits_double())
      os << breakpoints.back().as_double();
    else
      os << "log " << breakpoints.back().log_as_double();
    os << "); extend the plan";
    throw std::out_of_range(os.str());
  }
  std::size_t l = interval_index(breakpoints, x);
  const RiskSegment& seg = segments[l];
  if (seg.flat) return seg.level;
  return sub_clamped(target.risk_wide(x), seg.level);
}

RiskFunction RiskFunction::scaled_target(TargetDistribution target,
                                         double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::domain_error("risk scale must be positive (a zero risk never "
                            "reaches infinity and is inadmissible)");
  return RiskFunction(Closed{std::move(target), scale});
}

RiskFunction RiskFunction::piecewise(
    std::shared_ptr<const PiecewiseRiskCore> core) {
  if (!core || core->segments.empty() ||
      core->breakpoints.size() != core->segments.size() + 1 ||
      core->values.size() != core->breakpoints.size())
    throw std::invalid_argument("malformed piecewise risk core");
  return RiskFunction(std::move(core));
}

RiskFunction RiskFunction::sum(std::vector<RiskFunction> parts) {
  if (parts.empty())
    throw std::invalid_argument("sum of risks requires at least one input");
  return RiskFunction(Sum{std::move(parts)});
}

double RiskFunction::eval(double x) const {
  return eval_wide(WideReal::from_double(x)).as_double();
}

WideReal RiskFunction::eval_wide(const WideReal& x) const {
  if (const auto* c = std::get_if<Closed>(&impl_))
    return c->target.risk_wide(x).scaled(c->scale);
  if (const auto* p =
          std::get_if<std::shared_ptr<const PiecewiseRiskCore>>(&impl_))
    return (*p)->eval_wide(x);
  const auto& s = std::get<Sum>(impl_);
  WideReal acc = WideReal::zero();
  for (const auto& part : s.parts) acc += part.eval_wide(x);
  return acc;
}

double RiskFunction::inverse(double r) const {
  if (r <= 0.0) return -kInf;
  if (const auto* c = std::get_if<Closed>(&impl_))
    return c->target.risk_inverse(r / c->scale);

  if (const auto* pp =
          std::get_if<std::shared_ptr<const PiecewiseRiskCore>>(&impl_)) {
    const PiecewiseRiskCore& p = **pp;
    WideReal rw = WideReal::from_double(r);
    if (rw > p.values.back()) {
      std::ostringstream os;
      os << "quantile requires risk level " << r
         << " but the built horizon only reaches "
         << p.values.back().as_double() << "; extend the plan";
      throw std::out_of_range(os.str());
    }
    // first breakpoint value >= r; the crossing is in (a_{j-1}, a_j]
    auto it = std::lower_bound(p.values.begin(), p.values.end(), rw);
    std::size_t j = static_cast<std::size_t>(it - p.values.begin());
    if (j == 0) return p.breakpoints.front().as_double();
    const RiskSegment& seg = p.segments[j - 1];
    auto as_linear = [&](const WideReal& a) {
      if (!a.fits_double())
        throw std::out_of_range(
            "quantile lands beyond double range; risk level " +
            std::to_string(r) + " is out of the linear horizon");
      return a.as_double();
    };
    if (seg.flat) {
      // the flat value meets r: the infimum is the segment's left endpoint
      // (a jump there, if any, is absorbed by right-continuity)
      return as_linear(p.breakpoints[j - 1]);
    }
    if (p.values[j] == rw) return as_linear(p.breakpoints[j]);
    // strictly inside a tracking stretch: R(x) = R_target(x) - deficit.
    // The interval may straddle the double range; only the crossing point
    // itself has to be representable.
    double x = p.target.risk_inverse(r + seg.level.as_double());
    if (!(x <= WideReal::kLinCap))
      throw std::out_of_range(
          "quantile lands beyond double range; risk level " +
          std::to_string(r) + " is out of the linear horizon");
    double lo = p.breakpoints[j - 1].fits_double()
                    ? p.breakpoints[j - 1].as_double()
                    : x;
    double hi =
        p.breakpoints[j].fits_double() ? p.breakpoints[j].as_double() : x;
    return std::clamp(x, lo, hi);
  }

  // generic monotone bisection for sums
  double lo = support_start();
  if (!std::isfinite(lo)) lo = 0.0;
  double hi = std::max(1.0, lo + 1.0);
  while (eval(hi) < r) {
    hi *= 2.0;
    if (hi > WideReal::kLinCap)
      throw std::out_of_range("sum-risk quantile beyond double range");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi));
       ++i) {
    double mid = 0.5 * (lo + hi);
    (eval(mid) >= r ? hi : lo) = mid;
  }
  return hi;
}

double RiskFunction::support_start() const {
  if (const auto* c = std::get_if<Closed>(&impl_))
    return c->target.support_start();
  if (const auto* p =
          std::get_if<std::shared_ptr<const PiecewiseRiskCore>>(&impl_))
    return (*p)->breakpoints.front().as_double();
  const auto& s = std::get<Sum>(impl_);
  double m = kInf;
  for (const auto& part : s.parts) m = std::min(m, part.support_start());
  return m;
}

double RiskFunction::max_risk_reachable() const {
  if (std::get_if<Closed>(&impl_)) return kInf;
  if (const auto* pp =
          std::get_if<std::shared_ptr<const PiecewiseRiskCore>>(&impl_)) {
    const PiecewiseRiskCore& p = **pp;
    // risk attained at the edge of the double-representable x range
    WideReal hi = WideReal::from_double(WideReal::kLinCap);
    if (p.breakpoints.back() < hi) hi = p.breakpoints.back();
    return p.eval_wide(hi).as_double();
  }
  const auto& s = std::get<Sum>(impl_);
  double acc = 0.0;
  for (const auto& part : s.parts) {
    double m = part.max_risk_reachable();
    if (std::isinf(m)) return kInf;
    acc += m;
  }
  return acc;
}

bool RiskFunction::is_piecewise() const {
  return std::holds_alternative<std::shared_ptr<const PiecewiseRiskCore>>(
      impl_);
}

const PiecewiseRiskCore* RiskFunction::piecewise_core() const {
  if (const auto* p =
          std::get_if<std::shared_ptr<const PiecewiseRiskCore>>(&impl_))
    return p->get();
  return nullptr;
}

bool RiskFunction::is_scaled_target() const {
  return std::holds_alternative<Closed>(impl_);
}

const TargetDistribution* RiskFunction::scaled_target_ref(double* scale) const {
  if (const auto* c = std::get_if<Closed>(&impl_)) {
    if (scale) *scale = c->scale;
    return &c->target;
  }
  return nullptr;
}

RiskFunction risk_from_tail(const TargetDistribution& target) {
  return RiskFunction::scaled_target(target, 1.0);
}

RiskFunction risk_from_tail(const std::vector<double>& xs,
                            const std::vector<double>& tails) {
  if (xs.size() != tails.size() || xs.size() < 2)
    throw std::invalid_argument("tabulated tail needs >= 2 (x, tail) nodes");
  std::vector<double> risks(tails.size());
  for (std::size_t i = 0; i < tails.size(); ++i) {
    if (tails[i] > 1.0)
      throw std::domain_error("tail value > 1 at x=" + std::to_string(xs[i]));
    if (!(tails[i] > 0.0))
      throw std::domain_error(
          "tail value 0 at finite x=" + std::to_string(xs[i]) +
          ": bounded support has no admissible risk function");
    risks[i] = -std::log(tails[i]);
  }
  return RiskFunction::scaled_target(
      TargetDistribution::tabulated(xs, std::move(risks)), 1.0);
}

double tail_from_risk(const RiskFunction& risk, double x, bool* underflow) {
  if (underflow) *underflow = false;
  double r = risk.eval(x);
  if (r > kTailUnderflowRisk) {
    if (underflow) *underflow = true;
    return 0.0;
  }
  return std::exp(-r);
}

RiskFunction sum_risks(std::vector<RiskFunction> parts) {
  return RiskFunction::sum(std::move(parts));
}

double quantile_from_risk(const RiskFunction& risk, double u) {
  if (!(u > 0.0) || !(u < 1.0))
    throw std::invalid_argument("quantile requires u in (0, 1)");
  double r = -std::log1p(-u);
  double x = risk.inverse(r);
  // u -> 0+ resolves to the support start rather than -infinity
  double s = risk.support_start();
  if (std::isfinite(s)) x = std::max(x, s);
  return x;
}

TailClassification classify_tail(const RiskFunction& risk,
                                 TailProbeConfig cfg) {
  const PiecewiseRiskCore* core = risk.piecewise_core();
  if (!core)
    return classify_hazard_ratios([&](double x) { return risk.eval(x); },
                                  cfg);

  // Freeze/track risks oscillate: the ratio R(x)/x rides back up to the
  // target's hazard on every tracking stretch, so generic log-spaced
  // probes miss the point.  Probe the frozen-interval right endpoints
  // (where the ratio is locally smallest), which may sit far beyond
  // double range.
  TailClassification out;
  std::vector<double> neg_logs;  // -log of each ratio; +inf past underflow
  for (std::size_t l = 0; l < core->segments.size() &&
                          neg_logs.size() < static_cast<std::size_t>(cfg.count);
       ++l) {
    if (!core->segments[l].flat) continue;
    const WideReal& value = core->values[l + 1];
    if (value.is_zero()) continue;
    const WideReal& x = core->breakpoints[l + 1];
    double neg;
    double ratio;
    if (value.fits_double() && x.fits_double()) {
      ratio = value.as_double() / x.as_double();
      neg = std::log(x.as_double()) - std::log(value.as_double());
    } else {
      // deep probes: the frozen value sits far below the breakpoint
      neg = sub_clamped(log_of(x), log_of(value)).as_double();
      ratio = std::exp(-neg);
    }
    out.trace.push_back({x.as_double(), ratio});
    neg_logs.push_back(neg);
  }
  if (neg_logs.size() < 2)
    throw std::invalid_argument(
        "tail classification: fewer than 2 frozen probes carry positive "
        "risk");
  out.min_ratio = out.trace.front().ratio;
  out.max_ratio = out.trace.front().ratio;
  for (const auto& p : out.trace) {
    out.min_ratio = std::min(out.min_ratio, p.ratio);
    out.max_ratio = std::max(out.max_ratio, p.ratio);
  }
  // ratio_min <= eps * ratio_max, compared as -log ratios so that probes
  // past double underflow still register
  double lo = neg_logs[0], hi = neg_logs[0];
  for (double n : neg_logs) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  bool heavy = hi - lo > -std::log(cfg.epsilon) || (std::isinf(hi) && hi > 0);
  out.verdict = heavy ? TailClassification::Verdict::kHeavyEvidence
                      : TailClassification::Verdict::kLightEvidence;
  return out;
}

}  // namespace heavymin
