#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "heavymin/targets.hpp"
#include "heavymin/wide_real.hpp"

namespace heavymin {

// Relative tolerance for exact arithmetic identities.
inline constexpr double kRelTol = 1e-12;

// Risk level above which tails are reported as 0 with an underflow flag
// instead of evaluating exp(-R).
inline constexpr double kTailUnderflowRisk = 700.0;

// One interval (a_lo, a_hi] of a freeze/track risk.
//
// flat:  R(x) = level                      (level = the frozen value)
// track: R(x) = R_target(x) - level        (level = deficit below the target)
//
// Storing the tracker's *deficit* rather than its absolute offset keeps the
// pair identity R1 + R2 = R_target exact: at every stitch the new deficit
// and the new frozen value are produced by the same subtraction, so they
// agree bit-for-bit at any magnitude.
struct RiskSegment {
  bool flat;
  WideReal level;
};

// Piecewise freeze/track risk over a reference target.  Shared between a
// plan and the RiskFunction views onto its components; immutable once
// built (plans rebuild a fresh core when extended).
struct PiecewiseRiskCore {
  TargetDistribution target;
  std::vector<WideReal> breakpoints;  // a_0 .. a_L (size = segments+1)
  std::vector<RiskSegment> segments;  // segment l covers (a_l, a_{l+1}]
  std::vector<WideReal> values;       // R(a_l), cached, same size as breakpoints

  WideReal eval_wide(const WideReal& x) const;
};

// A cumulative risk function R(x) = -log(tail(x)): non-decreasing,
// right-continuous, 0 at -infinity, unbounded at +infinity.  Evaluation is
// exact (closed forms everywhere; no interpolation between breakpoints).
class RiskFunction {
 public:
  // scale * R_target; scale must be positive so the result is admissible.
  static RiskFunction scaled_target(TargetDistribution target,
                                    double scale = 1.0);
  static RiskFunction piecewise(std::shared_ptr<const PiecewiseRiskCore> core);
  static RiskFunction sum(std::vector<RiskFunction> parts);

  double eval(double x) const;
  double operator()(double x) const { return eval(x); }
  WideReal eval_wide(const WideReal& x) const;

  // inf{x : R(x) >= r}.  Flat segments resolve to the segment's left
  // endpoint (generalized-inverse convention).  Throws std::out_of_range,
  // naming the required risk level, when r exceeds the built horizon.
  double inverse(double r) const;

  double support_start() const;

  // Largest risk level reachable at a double-representable x (infinity for
  // closed forms).  Sampling horizons are validated against this.
  double max_risk_reachable() const;

  bool is_piecewise() const;
  const PiecewiseRiskCore* piecewise_core() const;  // null unless piecewise
  bool is_scaled_target() const;
  const TargetDistribution* scaled_target_ref(double* scale = nullptr) const;

 private:
  struct Closed {
    TargetDistribution target;
    double scale;
  };
  struct Sum {
    std::vector<RiskFunction> parts;
  };
  using Impl =
      std::variant<Closed, std::shared_ptr<const PiecewiseRiskCore>, Sum>;

  explicit RiskFunction(Impl impl) : impl_(std::move(impl)) {}
  Impl impl_;
};

// R_F as a RiskFunction (closed form).
RiskFunction risk_from_tail(const TargetDistribution& target);

// Tabulated tail points (x, tail) -> piecewise-linear risk in x.
// Rejects tail values outside (0, 1] (a zero tail at finite x means
// bounded support, which has no admissible risk function).
RiskFunction risk_from_tail(const std::vector<double>& xs,
                            const std::vector<double>& tails);

// exp(-R(x)); risks above kTailUnderflowRisk report 0 and set *underflow.
double tail_from_risk(const RiskFunction& risk, double x,
                      bool* underflow = nullptr);

// Pointwise sum = risk of the minimum of independent variables with the
// given risks.  Rejects an empty list.
RiskFunction sum_risks(std::vector<RiskFunction> parts);

// inf{x : R(x) >= -log(1-u)} for u in (0,1) (inverse-transform sampling).
double quantile_from_risk(const RiskFunction& risk, double u);

// For piecewise risks the probes are the frozen-interval right endpoints
// (the ratio rides back to the target's hazard on every tracking stretch,
// so log-spaced probes would miss the dips); cfg.count and cfg.epsilon
// still apply.  Closed forms use the log-spaced probe grid.
TailClassification classify_tail(const RiskFunction& risk,
                                 TailProbeConfig cfg = {});

}  // namespace heavymin
