#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heavymin/construct.hpp"
#include "heavymin/risk.hpp"

namespace heavymin {

// Required component risk coverage for n samples: log(n) plus this margin
// (the chance any of n uniform draws needs more is about e^(-margin)).
inline constexpr double kSampleRiskMargin = 16.0;

// Component-major sample matrix: one stream of draws per component, plus
// the per-draw minimum across components.
struct SampleMatrix {
  std::size_t components = 0;
  std::size_t count = 0;
  std::vector<double> data;  // component-major: data[c * count + j]

  double at(std::size_t c, std::size_t j) const {
    return data[c * count + j];
  }
  double min_at(std::size_t j) const;
  std::vector<double> component(std::size_t c) const;
  std::vector<double> subset_min(const std::vector<int>& subset) const;
};

// Inverse-transform samples for every component, one independent derived
// stream per component (see rng.hpp for the derivation contract).
// Reproducible: same family, n, seed give identical output.
SampleMatrix sample_family(const HeavyFamily& family, std::size_t n_samples,
                           std::uint64_t seed);

// Two-sided one-sample Kolmogorov-Smirnov statistic
//   D = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n).
double ks_statistic(std::vector<double> samples,
                    const TargetDistribution& target);

// One-sided statistic sup_x (F(x) - F_emp(x)): positive deviations mean
// the sample is lighter-tailed at the bottom than F allows.
double ks_statistic_one_sided(std::vector<double> samples,
                              const TargetDistribution& target);

// Asymptotic critical values.  Two-sided is tabulated at significance
// 0.01 / 0.05 / 0.10 (1.628, 1.358, 1.224 over sqrt(n)); one-sided uses
// sqrt(-log(significance)/2)/sqrt(n) at any significance.
double ks_critical_value(std::size_t n, double significance = 0.01,
                         bool two_sided = true);

struct MinimumCheck {
  bool exact_mode = false;       // n = k = 2: the sum law is an identity
  double sup_rel_residual = 0.0; // exact mode: sup |sum R_i - R_F| / max(1,R_F)
  double min_slack = 0.0;        // dominance mode: min (sum R_i - R_F),
                                 // over the double-representable range
  bool structural_ok = true;     // breakpoint comparisons beyond that range
  std::size_t intervals_checked = 0;
  std::size_t grid_points = 0;
};

// Exactness (pair) or dominance (family) of a k-subset's minimum against
// the target, swept structurally over every interval (any magnitude) and
// numerically over a grid in the double-representable range.
// Subsets are 0-based; a (k-1)-subset is rejected with a pointer to
// divergence_certificate.
MinimumCheck check_minimum_distribution(const HeavyFamily& family,
                                        const std::vector<int>& subset,
                                        const std::vector<double>& grid = {});

// Lower bound on the truncated expectation of g of the subset minimum:
// the sum of certificates over intervals j <= L with j = m (mod M), where
// m is the subset's position in the frozen cycle.  At least the number of
// qualifying intervals whenever the plan is valid, and non-decreasing
// in L.  Requires the plan to contain more than L intervals.
double divergence_certificate(const HeavyFamily& family,
                              const std::vector<int>& subset, int L);

// Hazard-ratio trace R(x)/x for one risk.  Default probes sit at the right
// endpoints of the risk's frozen intervals (where the ratio is locally
// smallest), skipping any zero-risk prefix.  Ratios beyond double range
// compare in log space so strict monotonicity of the running minimum stays
// meaningful past underflow.
struct HazardDiagnostic {
  struct Point {
    WideReal x;
    WideReal risk;
    double ratio;  // 0.0 once the true ratio underflows doubles
  };
  std::vector<Point> points;
  std::vector<double> running_min;
  bool strictly_decreasing_running_min = false;
  int clipped_probes = 0;  // probes beyond the horizon, dropped with warning

  static bool ratio_less(const Point& a, const Point& b);
};

HazardDiagnostic hazard_ratio_diagnostic(const RiskFunction& risk,
                                         const std::vector<double>& probes = {},
                                         int max_default_probes = 32);

struct VerificationConfig {
  std::size_t ks_samples = 100000;
  std::uint64_t seed = 12345;
  double significance = 0.01;
  int grid_points = 10000;
  int divergence_L = -1;  // default: last interval index
  bool run_ks = true;
};

// Everything cmd_verify reports; all verdicts are recomputable from the
// stored numbers and thresholds.
struct VerificationReport {
  int n = 0, k = 0;
  std::string policy;
  std::size_t intervals = 0;
  bool truncated = false;

  bool certificates_match_stored = true;
  std::ptrdiff_t first_certificate_mismatch = -1;

  bool gaps_ok = true;
  std::ptrdiff_t first_bad_gap = -1;

  double min_log_certificate = 0.0;
  std::ptrdiff_t argmin_certificate = -1;
  bool certificates_ok = true;

  bool per_risk_bound_ok = true;
  double per_risk_bound_worst = 0.0;  // max over (i, l) of R_i - R_F at a_l

  bool has_exactness = false;
  double exactness_sup_residual = 0.0;

  struct Dominance {
    std::vector<int> subset;  // 0-based
    double min_slack = 0.0;
  };
  std::vector<Dominance> dominance;

  struct Certificate {
    std::vector<int> subset;  // 0-based, size k-1
    int residue = 0;
    double min_log_certificate = 0.0;
    int L = 0;
    double divergence_bound = 0.0;
  };
  std::vector<Certificate> certificates;

  struct Ks {
    std::vector<int> subset;
    double statistic = 0.0;
    std::size_t samples = 0;
    double critical = 0.0;
    double significance = 0.0;
    bool two_sided = true;
    bool accept = false;
  };
  std::vector<Ks> ks;

  struct Hazard {
    int component = 0;
    std::size_t probes = 0;
    double last_ratio = 0.0;
    bool strictly_decreasing = false;
  };
  std::vector<Hazard> hazard;

  bool pass = false;
  std::vector<std::string> failures;
};

VerificationReport verify_family(const HeavyFamily& family,
                                 const VerificationConfig& config = {});

// Log-spaced grid over the double-representable part of the horizon,
// with breakpoints and midpoints mixed in.
std::vector<double> default_grid(const HeavyFamily& family, int points);

}  // namespace heavymin
