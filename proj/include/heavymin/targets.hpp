#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heavymin/wide_real.hpp"

namespace heavymin {

// Thrown when named admissibility hypotheses on parameters are violated
// (distinct from plain argument errors so the CLI can report it separately).
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TargetFamily { kExponential, kPolynomial, kWeibull, kTabulated };

// A right-unbounded target distribution F given by its cumulative risk
// R(x) = -log(1 - F(x)).  Parametric families have exact closed forms for
// the risk, tail, and their inverses; tabulated targets interpolate the
// risk linearly in x between nodes and extrapolate the final segment.
class TargetDistribution {
 public:
  // defaults to the unit exponential
  TargetDistribution() : family_(TargetFamily::kExponential), alpha_(1.0) {}

  static TargetDistribution exponential(double alpha);  // tail e^(-alpha x), x >= 0
  static TargetDistribution polynomial(double alpha);   // tail (1+x)^(-alpha), x >= 0
  static TargetDistribution weibull(double alpha);      // tail e^(-x^alpha), x >= 0

  // Nodes (x[i], risk[i]) with x non-decreasing (repeats encode jumps,
  // right-continuous upper value) and risk non-decreasing.  The final
  // segment must rise so that R -> infinity under linear extrapolation.
  static TargetDistribution tabulated(std::vector<double> x,
                                      std::vector<double> risk);

  TargetFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double support_start() const { return support_start_; }
  const std::vector<double>& grid_x() const { return xs_; }
  const std::vector<double>& grid_risk() const { return risks_; }

  double risk(double x) const;
  WideReal risk_wide(const WideReal& x) const;

  double tail(double x) const;  // e^(-risk)
  double cdf(double x) const;   // 1 - tail, computed as -expm1(-risk)

  // inf{x : R(x) >= r}.  Flat tabulated stretches resolve to their left
  // endpoint; r <= 0 resolves to the support start.
  double risk_inverse(double r) const;

  // inf{x : F(x) >= u}, u in (0,1).
  double quantile(double u) const;

  std::string describe() const;

 private:
  TargetDistribution(TargetFamily f, double a) : family_(f), alpha_(a) {}

  TargetFamily family_;
  double alpha_ = 0.0;
  double support_start_ = 0.0;
  std::vector<double> xs_, risks_;  // tabulated only
  double final_slope_ = 0.0;        // tabulated extrapolation slope
};

enum class GaugeFamily { kPower, kExp, kExpPower, kIdentityPlus, kTabulated };

// A non-negative non-decreasing gauge g with g(x) -> infinity, queried
// through its generalized inverse ginv(t) = inf{x : g(x) >= t}.  The
// inverse returns -infinity when t is at or below inf g; risks evaluate
// to 0 there.
class GrowthFunction {
 public:
  GrowthFunction() : family_(GaugeFamily::kIdentityPlus), beta_(0.0) {}

  static GrowthFunction power(double beta);      // x^beta on x>=0, else 0
  static GrowthFunction exp(double beta);        // e^(beta x)
  static GrowthFunction exp_power(double beta);  // e^(x^beta) on x>=0, else 1
  static GrowthFunction identity_plus();         // max(x, 0)
  static GrowthFunction tabulated(std::vector<double> x, std::vector<double> g);

  GaugeFamily family() const { return family_; }
  double beta() const { return beta_; }
  const std::vector<double>& grid_x() const { return xs_; }
  const std::vector<double>& grid_g() const { return gs_; }

  double eval(double x) const;

  // Generalized inverse; t < 0 is rejected.
  double inverse(double t) const;
  WideReal inverse_wide(const WideReal& t) const;

  std::string describe() const;

 private:
  GrowthFunction(GaugeFamily f, double b) : family_(f), beta_(b) {}

  GaugeFamily family_;
  double beta_ = 0.0;
  std::vector<double> xs_, gs_;  // tabulated only
  double final_slope_ = 0.0;
};

// Hazard-ratio heaviness diagnostic over a set of probe points.
//
// The reported verdict is evidence, not proof: heaviness is a liminf
// statement that no finite probe set can decide.  "Heavy evidence" means
// the running minimum of R(x)/x at the largest probes fell below
// epsilon * (peak observed ratio) while trending down; "light evidence"
// means the ratio stayed bounded away from zero relative to its peak.
struct TailProbeConfig {
  double x_lo = 1e-2;
  double x_hi = 1e10;
  int count = 40;
  double epsilon = 0.01;  // relative to the peak observed ratio
};

struct TailClassification {
  enum class Verdict { kHeavyEvidence, kLightEvidence, kInconclusive };
  struct Probe {
    double x;
    double ratio;  // R(x)/x
  };
  std::vector<Probe> trace;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  Verdict verdict = Verdict::kInconclusive;
};

// Shared implementation over any risk evaluator; zero-risk probes are
// skipped (the ratio 0/x carries no tail information).
TailClassification classify_hazard_ratios(
    const std::function<double(double)>& risk_at, const TailProbeConfig& cfg);

TailClassification classify_tail(const TargetDistribution& target,
                                 const TailProbeConfig& cfg = {});

const char* to_string(TailClassification::Verdict v);

}  // namespace heavymin
