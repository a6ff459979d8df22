#include "heavymin/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace heavymin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) +
                                " must be positive and finite");
}

// Piecewise-linear evaluation of a non-decreasing table with linear
// extrapolation of the final segment.  Repeated x nodes encode jumps;
// the value at the repeated abscissa is the upper one (right-continuity).
double table_eval(const std::vector<double>& xs, const std::vector<double>& ys,
                  double final_slope, double x) {
  if (x < xs.front()) return 0.0;
  if (x >= xs.back()) return ys.back() + final_slope * (x - xs.back());
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t j = static_cast<std::size_t>(it - xs.begin());
  double x0 = xs[j - 1], x1 = xs[j];
  double y0 = ys[j - 1], y1 = ys[j];
  if (x1 == x0) return y1;
  return y0 + (y1 - y0) * ((x - x0) / (x1 - x0));
}

// inf{x : table(x) >= r}.  Flat stretches resolve to their left endpoint,
// jumps to the jump abscissa.
double table_inverse(const std::vector<double>& xs,
                     const std::vector<double>& ys, double final_slope,
                     double r) {
  if (r <= ys.front()) return xs.front();
  if (r > ys.back()) return xs.back() + (r - ys.back()) / final_slope;
  auto it = std::lower_bound(ys.begin(), ys.end(), r);
  std::size_t j = static_cast<std::size_t>(it - ys.begin());
  // ys[j] >= r > ys[j-1]
  double y0 = ys[j - 1], y1 = ys[j];
  double x0 = xs[j - 1], x1 = xs[j];
  if (x1 == x0) return x1;        // jump
  if (y1 == y0) return x0;        // flat: infimum at the left endpoint
  if (ys[j] == r) return x1;      // exact node hit after a strict rise
  return x0 + (x1 - x0) * ((r - y0) / (y1 - y0));
}

}  // namespace

TargetDistribution TargetDistribution::exponential(double alpha) {
  check_positive(alpha, "exponential alpha");
  return TargetDistribution(TargetFamily::kExponential, alpha);
}

TargetDistribution TargetDistribution::polynomial(double alpha) {
  check_positive(alpha, "polynomial alpha");
  return TargetDistribution(TargetFamily::kPolynomial, alpha);
}

TargetDistribution TargetDistribution::weibull(double alpha) {
  check_positive(alpha, "weibull alpha");
  return TargetDistribution(TargetFamily::kWeibull, alpha);
}

TargetDistribution TargetDistribution::tabulated(std::vector<double> x,
                                                 std::vector<double> risk) {
  if (x.size() != risk.size() || x.size() < 2)
    throw std::invalid_argument("tabulated target needs >= 2 (x, risk) nodes");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(risk[i]))
      throw std::invalid_argument("tabulated target nodes must be finite");
    if (risk[i] < 0.0)
      throw std::domain_error("tabulated risk must be non-negative");
    if (i > 0 && (x[i] < x[i - 1] || risk[i] < risk[i - 1]))
      throw std::domain_error("tabulated target must be non-decreasing");
  }
  std::size_t last = x.size() - 1;
  double dx = x[last] - x[last - 1];
  double dr = risk[last] - risk[last - 1];
  if (!(dx > 0.0) || !(dr > 0.0))
    throw std::domain_error(
        "tabulated target: final segment must rise so the risk is unbounded");
  TargetDistribution t(TargetFamily::kTabulated, 0.0);
  t.support_start_ = x.front();
  t.final_slope_ = dr / dx;
  t.xs_ = std::move(x);
  t.risks_ = std::move(risk);
  return t;
}

double TargetDistribution::risk(double x) const {
  switch (family_) {
    case TargetFamily::kExponential:
      return x > 0.0 ? alpha_ * x : 0.0;
    case TargetFamily::kPolynomial:
      return x > 0.0 ? alpha_ * std::log1p(x) : 0.0;
    case TargetFamily::kWeibull:
      return x > 0.0 ? std::pow(x, alpha_) : 0.0;
    case TargetFamily::kTabulated:
      return table_eval(xs_, risks_, final_slope_, x);
  }
  return 0.0;  // unreachable
}

WideReal TargetDistribution::risk_wide(const WideReal& x) const {
  if (x.negative() || x.is_zero()) return WideReal::zero();
  if (x.fits_double()) return WideReal::from_double(risk(x.as_double()));
  switch (family_) {
    case TargetFamily::kExponential:
      return x.scaled(alpha_);
    case TargetFamily::kPolynomial:
      // log(1+x) == log x to double precision at these magnitudes
      return log_of(x).scaled(alpha_);
    case TargetFamily::kWeibull:
      return x.powed(alpha_);
    case TargetFamily::kTabulated: {
      // final-segment extrapolation: risk = c + slope * x
      double c = risks_.back() - final_slope_ * xs_.back();
      return x.scaled(final_slope_) + WideReal::from_double(c);
    }
  }
  return WideReal::zero();  // unreachable
}

double TargetDistribution::tail(double x) const {
  return std::exp(-risk(x));
}

double TargetDistribution::cdf(double x) const {
  return -std::expm1(-risk(x));
}

double TargetDistribution::risk_inverse(double r) const {
  if (r <= 0.0) return support_start_;
  switch (family_) {
    case TargetFamily::kExponential:
      return r / alpha_;
    case TargetFamily::kPolynomial:
      return std::expm1(r / alpha_);
    case TargetFamily::kWeibull:
      return std::pow(r, 1.0 / alpha_);
    case TargetFamily::kTabulated:
      return table_inverse(xs_, risks_, final_slope_, r);
  }
  return 0.0;  // unreachable
}

double TargetDistribution::quantile(double u) const {
  if (!(u > 0.0) || !(u < 1.0))
    throw std::invalid_argument("quantile requires u in (0, 1)");
  return risk_inverse(-std::log1p(-u));
}

std::string TargetDistribution::describe() const {
  std::ostringstream os;
  switch (family_) {
    case TargetFamily::kExponential:
      os << "exponential(alpha=" << alpha_ << ")";
      break;
    case TargetFamily::kPolynomial:
      os << "polynomial(alpha=" << alpha_ << ")";
      break;
    case TargetFamily::kWeibull:
      os << "weibull(alpha=" << alpha_ << ")";
      break;
    case TargetFamily::kTabulated:
      os << "tabulated(" << xs_.size() << " nodes)";
      break;
  }
  return os.str();
}

GrowthFunction GrowthFunction::power(double beta) {
  check_positive(beta, "power beta");
  return GrowthFunction(GaugeFamily::kPower, beta);
}

GrowthFunction GrowthFunction::exp(double beta) {
  check_positive(beta, "exp beta");
  return GrowthFunction(GaugeFamily::kExp, beta);
}

GrowthFunction GrowthFunction::exp_power(double beta) {
  check_positive(beta, "exp_power beta");
  return GrowthFunction(GaugeFamily::kExpPower, beta);
}

GrowthFunction GrowthFunction::identity_plus() {
  return GrowthFunction(GaugeFamily::kIdentityPlus, 0.0);
}

GrowthFunction GrowthFunction::tabulated(std::vector<double> x,
                                         std::vector<double> g) {
  if (x.size() != g.size() || x.size() < 2)
    throw std::invalid_argument("tabulated gauge needs >= 2 (x, g) nodes");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(g[i]) || g[i] < 0.0)
      throw std::invalid_argument("tabulated gauge nodes must be finite, g >= 0");
    if (i > 0 && (x[i] <= x[i - 1] || g[i] < g[i - 1]))
      throw std::domain_error("tabulated gauge must be non-decreasing");
  }
  std::size_t last = x.size() - 1;
  double slope = (g[last] - g[last - 1]) / (x[last] - x[last - 1]);
  if (!(slope > 0.0))
    throw std::domain_error(
        "tabulated gauge: final segment must rise so g is unbounded");
  GrowthFunction gf(GaugeFamily::kTabulated, 0.0);
  gf.final_slope_ = slope;
  gf.xs_ = std::move(x);
  gf.gs_ = std::move(g);
  return gf;
}

double GrowthFunction::eval(double x) const {
  switch (family_) {
    case GaugeFamily::kPower:
      return x > 0.0 ? std::pow(x, beta_) : 0.0;
    case GaugeFamily::kExp:
      return std::exp(beta_ * x);
    case GaugeFamily::kExpPower:
      return x > 0.0 ? std::exp(std::pow(x, beta_)) : 1.0;
    case GaugeFamily::kIdentityPlus:
      return x > 0.0 ? x : 0.0;
    case GaugeFamily::kTabulated:
      if (x < xs_.front()) return gs_.front();
      return table_eval(xs_, gs_, final_slope_, x);
  }
  return 0.0;  // unreachable
}

double GrowthFunction::inverse(double t) const {
  if (t < 0.0) throw std::invalid_argument("gauge inverse requires t >= 0");
  // -inf sentinel passes through; +inf when beyond double range
  return inverse_wide(WideReal::from_double(t)).as_double();
}

WideReal GrowthFunction::inverse_wide(const WideReal& t) const {
  if (t.negative()) throw std::invalid_argument("gauge inverse requires t >= 0");
  switch (family_) {
    case GaugeFamily::kPower:
      if (t.is_zero()) return WideReal::neg_infinity();
      return t.powed(1.0 / beta_);
    case GaugeFamily::kExp:
      if (t.is_zero()) return WideReal::neg_infinity();
      return log_of(t).scaled(1.0 / beta_);
    case GaugeFamily::kExpPower: {
      // g >= 1 everywhere, so t <= 1 lies below the range
      if (!(t > WideReal::from_double(1.0))) return WideReal::neg_infinity();
      return log_of(t).powed(1.0 / beta_);
    }
    case GaugeFamily::kIdentityPlus:
      if (t.is_zero()) return WideReal::neg_infinity();
      return t;
    case GaugeFamily::kTabulated: {
      if (!(t > WideReal::from_double(gs_.front())))
        return WideReal::neg_infinity();
      if (t.fits_double() && t.as_double() <= gs_.back())
        return WideReal::from_double(
            table_inverse(xs_, gs_, final_slope_, t.as_double()));
      // beyond the table: x = x_last + (t - g_last)/slope
      WideReal excess = sub_clamped(t, WideReal::from_double(gs_.back()));
      return excess.scaled(1.0 / final_slope_) +
             WideReal::from_double(xs_.back());
    }
  }
  return WideReal::neg_infinity();  // unreachable
}

std::string GrowthFunction::describe() const {
  std::ostringstream os;
  switch (family_) {
    case GaugeFamily::kPower:
      os << "power(beta=" << beta_ << ")";
      break;
    case GaugeFamily::kExp:
      os << "exp(beta=" << beta_ << ")";
      break;
    case GaugeFamily::kExpPower:
      os << "exp_power(beta=" << beta_ << ")";
      break;
    case GaugeFamily::kIdentityPlus:
      os << "identity_plus";
      break;
    case GaugeFamily::kTabulated:
      os << "tabulated(" << xs_.size() << " nodes)";
      break;
  }
  return os.str();
}

TailClassification classify_hazard_ratios(
    const std::function<double(double)>& risk_at, const TailProbeConfig& cfg) {
  if (cfg.count < 2)
    throw std::invalid_argument("tail classification needs >= 2 probes");
  if (!(cfg.x_lo > 0.0) || !(cfg.x_hi > cfg.x_lo))
    throw std::invalid_argument("probe range must satisfy 0 < x_lo < x_hi");

  TailClassification out;
  double llo = std::log(cfg.x_lo), lhi = std::log(cfg.x_hi);
  for (int i = 0; i < cfg.count; ++i) {
    double x = std::exp(llo + (lhi - llo) * i / (cfg.count - 1));
    double r = risk_at(x);
    if (r <= 0.0) continue;  // no tail information below the support
    out.trace.push_back({x, r / x});
  }
  if (out.trace.size() < 2)
    throw std::invalid_argument(
        "tail classification: fewer than 2 probes carry positive risk");

  out.min_ratio = kInf;
  out.max_ratio = 0.0;
  for (const auto& p : out.trace) {
    out.min_ratio = std::min(out.min_ratio, p.ratio);
    out.max_ratio = std::max(out.max_ratio, p.ratio);
  }
  double first = out.trace.front().ratio;
  double last = out.trace.back().ratio;
  // is the ratio still strictly falling across the last quarter of probes?
  std::size_t q = out.trace.size() - out.trace.size() / 4;
  bool tail_falling = true;
  double tail_min = kInf;
  for (std::size_t i = q > 0 ? q - 1 : 0; i < out.trace.size(); ++i) {
    if (i > 0 && !(out.trace[i].ratio < out.trace[i - 1].ratio))
      tail_falling = false;
    tail_min = std::min(tail_min, out.trace[i].ratio);
  }
  // the running minimum at the largest probe is the global minimum; a
  // sustained fall that has not yet crossed epsilon (slow decay like a
  // Weibull exponent near 1) still counts as heavy evidence
  bool fell_below = out.min_ratio <= cfg.epsilon * out.max_ratio;
  bool sustained_fall = tail_falling && out.min_ratio <= 0.5 * out.max_ratio;
  if (last < first && (fell_below || sustained_fall)) {
    out.verdict = TailClassification::Verdict::kHeavyEvidence;
  } else if (last >= first || tail_min >= 0.5 * out.max_ratio) {
    out.verdict = TailClassification::Verdict::kLightEvidence;
  } else {
    out.verdict = TailClassification::Verdict::kInconclusive;
  }
  return out;
}

TailClassification classify_tail(const TargetDistribution& target,
                                 const TailProbeConfig& cfg) {
  return classify_hazard_ratios([&](double x) { return target.risk(x); }, cfg);
}

const char* to_string(TailClassification::Verdict v) {
  switch (v) {
    case TailClassification::Verdict::kHeavyEvidence:
      return "heavy-evidence";
    case TailClassification::Verdict::kLightEvidence:
      return "light-evidence";
    case TailClassification::Verdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

}  // namespace heavymin
