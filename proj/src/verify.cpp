#include "heavymin/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "heavymin/rng.hpp"

namespace heavymin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wide_diff(const WideReal& a, const WideReal& b) {
  if (a >= b) return sub_clamped(a, b).as_double();
  return -sub_clamped(b, a).as_double();
}

std::string subset_str(const std::vector<int>& s) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < s.size(); ++i)
    os << (i ? "," : "") << s[i] + 1;  // 1-based in messages
  os << "}";
  return os.str();
}

}  // namespace

double SampleMatrix::min_at(std::size_t j) const {
  double m = kInf;
  for (std::size_t c = 0; c < components; ++c) m = std::min(m, at(c, j));
  return m;
}

std::vector<double> SampleMatrix::component(std::size_t c) const {
  return std::vector<double>(data.begin() + c * count,
                             data.begin() + (c + 1) * count);
}

std::vector<double> SampleMatrix::subset_min(
    const std::vector<int>& subset) const {
  std::vector<double> out(count, kInf);
  for (int c : subset)
    for (std::size_t j = 0; j < count; ++j)
      out[j] = std::min(out[j], at(static_cast<std::size_t>(c), j));
  return out;
}

SampleMatrix sample_family(const HeavyFamily& family, std::size_t n_samples,
                           std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("n_samples must be >= 1");
  double required =
      std::log(static_cast<double>(n_samples)) + kSampleRiskMargin;
  for (std::size_t i = 0; i < family.risks.size(); ++i) {
    double reach = family.risks[i].max_risk_reachable();
    if (reach < required) {
      std::ostringstream os;
      os << "sampling " << n_samples << " draws needs component " << i + 1
         << " risk coverage up to " << required << " but the horizon reaches "
         << reach << "; extend the plan";
      throw std::out_of_range(os.str());
    }
  }
  SampleMatrix m;
  m.components = family.risks.size();
  m.count = n_samples;
  m.data.resize(m.components * m.count);
  for (std::size_t c = 0; c < m.components; ++c) {
    UniformOpen01 stream(derive_stream_seed(seed, c));
    for (std::size_t j = 0; j < n_samples; ++j)
      m.data[c * n_samples + j] =
          quantile_from_risk(family.risks[c], stream.next());
  }
  return m;
}

double ks_statistic(std::vector<double> samples,
                    const TargetDistribution& target) {
  if (samples.empty()) throw std::invalid_argument("KS needs samples");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = target.cdf(samples[i]);
    double hi = (static_cast<double>(i) + 1.0) / n - f;
    double lo = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

double ks_statistic_one_sided(std::vector<double> samples,
                              const TargetDistribution& target) {
  if (samples.empty()) throw std::invalid_argument("KS needs samples");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = target.cdf(samples[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double ks_critical_value(std::size_t n, double significance, bool two_sided) {
  if (n == 0) throw std::invalid_argument("KS needs samples");
  double rn = std::sqrt(static_cast<double>(n));
  if (!two_sided) return std::sqrt(-std::log(significance) / 2.0) / rn;
  if (significance == 0.01) return 1.628 / rn;
  if (significance == 0.05) return 1.358 / rn;
  if (significance == 0.10) return 1.224 / rn;
  throw std::invalid_argument(
      "two-sided critical values tabulated at 0.01/0.05/0.10 only");
}

std::vector<double> default_grid(const HeavyFamily& family, int points) {
  double lo = 1e-9, hi = 1.0;
  if (family.plan) {
    for (const auto& b : family.plan->breakpoints())
      if (b.fits_double()) hi = std::max(hi, b.as_double());
  } else {
    hi = 1e12;  // closed-form components: span the sampling-relevant range
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points) + 128);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i)
    grid.push_back(std::exp(llo + (lhi - llo) * i / (points - 1)));
  if (family.plan) {
    const auto& bps = family.plan->breakpoints();
    for (std::size_t j = 1; j < bps.size(); ++j) {
      if (!bps[j].fits_double()) break;
      double b = bps[j].as_double();
      double prev = bps[j - 1].as_double();
      grid.push_back(b);
      grid.push_back(prev + 0.5 * (b - prev));
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

MinimumCheck check_minimum_distribution(const HeavyFamily& family,
                                        const std::vector<int>& subset,
                                        const std::vector<double>& grid_in) {
  std::vector<int> s = subset;
  std::sort(s.begin(), s.end());
  if (std::unique(s.begin(), s.end()) != s.end() || s.empty() ||
      s.front() < 0 || s.back() >= family.n)
    throw std::invalid_argument("subset must hold distinct indices in range");
  if (static_cast<int>(s.size()) == family.k - 1)
    throw std::invalid_argument(
        "subset of size k-1: use divergence_certificate for the heaviness "
        "bound");
  if (static_cast<int>(s.size()) != family.k)
    throw std::invalid_argument("subset size must equal k");

  MinimumCheck out;
  // The sum law is an exact identity only for the alternating pair; larger
  // families give one-sided dominance.
  out.exact_mode = (family.n == 2 && family.k == 2);
  out.min_slack = kInf;
  std::vector<double> grid =
      grid_in.empty() ? default_grid(family, 2000) : grid_in;

  if (family.plan) {
    const ConstructionPlan& plan = *family.plan;
    out.intervals_checked = plan.interval_count();
    if (out.exact_mode) {
      // Exactness sweep at breakpoints, every magnitude: each component is
      // flat or tracks the target, so R1+R2-R_F is constant per interval
      // and pinned by the breakpoint values.
      for (std::size_t l = 0; l < plan.breakpoints().size(); ++l) {
        WideReal sum = plan.values()[0][l] + plan.values()[1][l];
        WideReal rf = plan.target().risk_wide(plan.breakpoints()[l]);
        if (sum == rf) continue;
        if (rf.fits_double()) {
          double rel =
              std::abs(wide_diff(sum, rf)) / std::max(1.0, rf.as_double());
          out.sup_rel_residual = std::max(out.sup_rel_residual, rel);
        } else {
          // with the risk itself beyond double range the pair identity is
          // maintained bit-for-bit (the lagging component is below one ulp)
          out.structural_ok = false;
          out.sup_rel_residual = kInf;
        }
      }
    } else {
      // Dominance sweep in increment form:
      //   slack(a_l) = sum_{m<l} (tau_m - 1) * (R_F(a_{m+1}) - R_F(a_m))
      // with tau_m the trackers of S on interval m.  A sum of non-negative
      // terms: no cancellation at any risk scale, unlike sum-minus-target.
      WideReal slack = WideReal::zero();
      WideReal rf_prev = WideReal::zero();
      for (std::size_t l = 0; l < plan.interval_count(); ++l) {
        if (slack.fits_double())
          out.min_slack = std::min(out.min_slack, slack.as_double());
        int tau = 0;
        for (int i : s) {
          bool frozen = false;
          for (int f : plan.intervals()[l].frozen) frozen = frozen || f == i;
          if (!frozen) ++tau;
        }
        if (tau < 1) out.structural_ok = false;  // cycle must leave a tracker
        WideReal rf_next =
            plan.target().risk_wide(plan.breakpoints()[l + 1]);
        if (tau > 1) slack += sub_clamped(rf_next, rf_prev).scaled(tau - 1.0);
        rf_prev = rf_next;
      }
      if (slack.fits_double())
        out.min_slack = std::min(out.min_slack, slack.as_double());
    }
  }

  // numeric confirmation over the double-representable range; the absolute
  // tolerance only resolves where the evaluated risks are small enough for
  // doubles to carry it
  double hi_linear = kInf;
  if (family.plan) {
    hi_linear = 0.0;
    for (const auto& b : family.plan->breakpoints())
      if (b.fits_double()) hi_linear = std::max(hi_linear, b.as_double());
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  for (double x : grid) {
    if (!(x > 0.0) || x > hi_linear) continue;
    ++out.grid_points;
    double rf = family.target.risk(x);
    double sum = 0.0;
    for (int i : s) sum += family.risks[static_cast<std::size_t>(i)].eval(x);
    double res = sum - rf;
    if (out.exact_mode) {
      out.sup_rel_residual =
          std::max(out.sup_rel_residual, std::abs(res) / std::max(1.0, rf));
    } else if (res < 0.0) {
      if (res < -(kRelTol + 16.0 * kEps * rf)) out.structural_ok = false;
      if (rf <= 1e3) out.min_slack = std::min(out.min_slack, res);
    }
  }
  if (std::isinf(out.min_slack)) out.min_slack = 0.0;
  return out;
}

double divergence_certificate(const HeavyFamily& family,
                              const std::vector<int>& subset, int L) {
  if (!family.plan)
    throw std::invalid_argument("divergence certificates need a plan");
  const ConstructionPlan& plan = *family.plan;
  std::vector<int> s = subset;
  std::sort(s.begin(), s.end());
  if (static_cast<int>(s.size()) != family.k - 1)
    throw std::invalid_argument("subset size must equal k-1");
  const auto& cycle = plan.subset_cycle();
  int m = -1;
  for (std::size_t i = 0; i < cycle.size(); ++i)
    if (cycle[i] == s) {
      m = static_cast<int>(i);
      break;
    }
  if (m < 0)
    throw std::invalid_argument("subset " + subset_str(s) +
                                " not in the frozen cycle");
  if (L < 0 || static_cast<std::size_t>(L) >= plan.interval_count())
    throw std::invalid_argument(
        "plan horizon (" + std::to_string(plan.interval_count()) +
        " intervals) too short for L=" + std::to_string(L));
  double sum = 0.0;
  int M = static_cast<int>(cycle.size());
  for (int j = m; j <= L; j += M)
    sum +=
        std::exp(plan.intervals()[static_cast<std::size_t>(j)].log_certificate);
  return sum;
}

bool HazardDiagnostic::ratio_less(const Point& a, const Point& b) {
  bool az = a.risk.is_zero(), bz = b.risk.is_zero();
  if (az || bz) return az && !bz;
  // R_a/x_a < R_b/x_b  <=>  log R_a + log x_b < log R_b + log x_a
  return log_of(a.risk) + log_of(b.x) < log_of(b.risk) + log_of(a.x);
}

HazardDiagnostic hazard_ratio_diagnostic(const RiskFunction& risk,
                                         const std::vector<double>& probes,
                                         int max_default_probes) {
  HazardDiagnostic out;
  std::vector<WideReal> xs;
  const PiecewiseRiskCore* core = risk.piecewise_core();
  if (!probes.empty()) {
    for (double p : probes) {
      if (core && WideReal::from_double(p) > core->breakpoints.back()) {
        ++out.clipped_probes;  // beyond the horizon: dropped with warning
        continue;
      }
      xs.push_back(WideReal::from_double(p));
    }
  } else if (core) {
    // default: right endpoints of frozen intervals carrying positive risk
    for (std::size_t l = 0; l < core->segments.size(); ++l) {
      if (!core->segments[l].flat) continue;
      if (core->values[l + 1].is_zero()) continue;  // degenerate prefix
      xs.push_back(core->breakpoints[l + 1]);
      if (static_cast<int>(xs.size()) >= max_default_probes) break;
    }
  } else {
    TailProbeConfig cfg;
    double llo = std::log(cfg.x_lo), lhi = std::log(cfg.x_hi);
    for (int i = 0; i < cfg.count; ++i)
      xs.push_back(WideReal::from_double(
          std::exp(llo + (lhi - llo) * i / (cfg.count - 1))));
  }
  if (xs.size() < 2)
    throw std::invalid_argument(
        "hazard diagnostic: fewer than 2 usable probes");

  for (const auto& x : xs) {
    HazardDiagnostic::Point p;
    p.x = x;
    p.risk = risk.eval_wide(x);
    if (p.risk.fits_double() && x.fits_double()) {
      p.ratio = p.risk.as_double() / x.as_double();
    } else {
      double lr = p.risk.log_as_double() - x.log_as_double();
      p.ratio = std::isnan(lr) ? 0.0 : std::exp(lr);
    }
    out.points.push_back(std::move(p));
  }

  out.strictly_decreasing_running_min = out.points.size() >= 2;
  std::size_t best = 0;
  out.running_min.push_back(out.points[0].ratio);
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    if (HazardDiagnostic::ratio_less(out.points[i], out.points[best]))
      best = i;
    else
      out.strictly_decreasing_running_min = false;
    out.running_min.push_back(out.points[best].ratio);
  }
  return out;
}

VerificationReport verify_family(const HeavyFamily& family,
                                 const VerificationConfig& config) {
  VerificationReport rep;
  rep.n = family.n;
  rep.k = family.k;
  rep.pass = true;
  auto fail = [&rep](std::string msg) {
    rep.pass = false;
    rep.failures.push_back(std::move(msg));
  };

  std::vector<double> grid =
      default_grid(family, std::max(16, config.grid_points));

  if (family.plan) {
    const ConstructionPlan& plan = *family.plan;
    rep.policy = to_string(plan.policy());
    rep.intervals = plan.interval_count();
    rep.truncated = plan.overflow_truncated();

    double cert_floor = std::log1p(-kRelTol);
    rep.min_log_certificate = kInf;
    for (std::size_t l = 0; l < plan.interval_count(); ++l) {
      const PlanInterval& iv = plan.intervals()[l];
      double replayed = recompute_log_certificate(plan, l);
      bool both_nan = std::isnan(replayed) && std::isnan(iv.log_certificate);
      if (replayed != iv.log_certificate && !both_nan &&
          rep.certificates_match_stored) {
        rep.certificates_match_stored = false;
        rep.first_certificate_mismatch = static_cast<std::ptrdiff_t>(l);
        std::ostringstream os;
        os << "interval " << l << ": stored certificate (log "
           << iv.log_certificate << ") does not match the plan (log "
           << replayed << ")";
        fail(os.str());
      }
      if (!(iv.gap >= WideReal::from_double(1.0)) && rep.gaps_ok) {
        rep.gaps_ok = false;
        rep.first_bad_gap = static_cast<std::ptrdiff_t>(l);
        fail("interval " + std::to_string(l) +
             ": gap below 1 breaks coverage");
      }
      if (iv.log_certificate < rep.min_log_certificate) {
        rep.min_log_certificate = iv.log_certificate;
        rep.argmin_certificate = static_cast<std::ptrdiff_t>(l);
      }
    }
    if (rep.min_log_certificate < cert_floor) {
      rep.certificates_ok = false;
      fail("interval " + std::to_string(rep.argmin_certificate) +
           ": certificate below 1 (log " +
           std::to_string(rep.min_log_certificate) + ")");
    }

    // each component stays at or below the target risk
    for (int i = 0; i < plan.n(); ++i) {
      for (std::size_t l = 0; l < plan.breakpoints().size(); ++l) {
        double over = wide_diff(plan.values()[static_cast<std::size_t>(i)][l],
                                plan.target().risk_wide(plan.breakpoints()[l]));
        rep.per_risk_bound_worst = std::max(rep.per_risk_bound_worst, over);
      }
    }
    if (rep.per_risk_bound_worst > kRelTol) {
      rep.per_risk_bound_ok = false;
      fail("a component risk exceeds the target risk by " +
           std::to_string(rep.per_risk_bound_worst));
    }
  } else {
    rep.policy = "closed-form";
  }

  // subset sweeps over all size-k subsets
  auto k_subsets = subset_cycle(family.n, family.k + 1);
  for (const auto& s : k_subsets) {
    MinimumCheck mc = check_minimum_distribution(family, s, grid);
    if (mc.exact_mode) {
      rep.has_exactness = true;
      rep.exactness_sup_residual = mc.sup_rel_residual;
      if (mc.sup_rel_residual > kRelTol || !mc.structural_ok)
        fail("exactness residual " + std::to_string(mc.sup_rel_residual) +
             " above tolerance");
    } else {
      rep.dominance.push_back({s, mc.min_slack});
      if (mc.min_slack < -kRelTol || !mc.structural_ok)
        fail("dominance violated for subset " + subset_str(s) + " (slack " +
             std::to_string(mc.min_slack) + ")");
    }
  }

  if (family.plan) {
    int last = static_cast<int>(family.plan->interval_count()) - 1;
    int L = config.divergence_L >= 0 ? std::min(config.divergence_L, last)
                                     : last;
    int M = static_cast<int>(family.plan->subset_cycle().size());
    for (int m = 0; m < M; ++m) {
      const auto& s = family.plan->subset_cycle()[static_cast<std::size_t>(m)];
      VerificationReport::Certificate c;
      c.subset = s;
      c.residue = m;
      c.L = L;
      c.min_log_certificate = kInf;
      for (int j = m; j <= L; j += M)
        c.min_log_certificate = std::min(
            c.min_log_certificate,
            family.plan->intervals()[static_cast<std::size_t>(j)]
                .log_certificate);
      c.divergence_bound = divergence_certificate(family, s, L);
      double expected = static_cast<double>((L - m) / M + 1);
      if (c.divergence_bound < expected - kRelTol)
        fail("divergence bound for subset " + subset_str(s) +
             " below the qualifying-interval count");
      rep.certificates.push_back(std::move(c));
    }
  }

  if (config.run_ks) {
    SampleMatrix samples = sample_family(family, config.ks_samples,
                                         config.seed);
    bool exact_law = (family.n == 2 && family.k == 2);
    for (const auto& s : k_subsets) {
      VerificationReport::Ks ks;
      ks.subset = s;
      ks.samples = config.ks_samples;
      ks.significance = config.significance;
      ks.two_sided = exact_law;
      std::vector<double> mins = samples.subset_min(s);
      ks.statistic = exact_law ? ks_statistic(mins, family.target)
                               : ks_statistic_one_sided(mins, family.target);
      ks.critical = ks_critical_value(config.ks_samples, config.significance,
                                      exact_law);
      ks.accept = ks.statistic <= ks.critical;
      if (!ks.accept)
        fail(std::string(exact_law ? "two-sided" : "one-sided") +
             " KS rejected for subset " + subset_str(s));
      rep.ks.push_back(std::move(ks));
    }
  }

  for (std::size_t i = 0; i < family.risks.size(); ++i) {
    if (!family.risks[i].is_piecewise()) continue;
    try {
      HazardDiagnostic hd = hazard_ratio_diagnostic(family.risks[i]);
      VerificationReport::Hazard h;
      h.component = static_cast<int>(i);
      h.probes = hd.points.size();
      h.last_ratio = hd.running_min.empty() ? 0.0 : hd.running_min.back();
      h.strictly_decreasing = hd.strictly_decreasing_running_min;
      rep.hazard.push_back(h);
    } catch (const std::invalid_argument&) {
      // too few frozen intervals for a trace; informational only
    }
  }

  return rep;
}

}  // namespace heavymin
