#include "heavymin/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace heavymin {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

Json wide_to_json(const WideReal& w) {
  Json j;
  j["dec"] = w.fits_double() ? Json(format_double(w.as_double())) : Json();
  double lg = w.log_as_double();
  j["log"] = std::isfinite(lg) || lg < 0 ? Json(format_double(lg)) : Json();
  double ll = w.loglog_as_double();
  j["loglog"] = std::isnan(ll) ? Json() : Json(format_double(ll));
  // power-tower levels past log-log: value = exp^height(rep)
  if (w.height() >= 3 && !w.is_infinity()) {
    j["tower_height"] = w.height();
    j["tower_rep"] = format_double(w.rep());
  } else {
    j["tower_height"] = Json();
    j["tower_rep"] = Json();
  }
  return j;
}

WideReal wide_from_json(const Json& j) {
  if (j.contains("tower_height") && !j.at("tower_height").is_null())
    return WideReal::from_tower(
        j.at("tower_height").get<std::int32_t>(),
        parse_double(j.at("tower_rep").get<std::string>()));
  if (!j.at("dec").is_null())
    return WideReal::from_double(parse_double(j.at("dec").get<std::string>()));
  if (!j.at("log").is_null())
    return WideReal::from_log(parse_double(j.at("log").get<std::string>()));
  if (!j.at("loglog").is_null())
    return WideReal::from_loglog(
        parse_double(j.at("loglog").get<std::string>()));
  throw std::invalid_argument("empty wide value");
}

namespace {

Json double_list(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(format_double(x));
  return a;
}

std::vector<double> double_list_from(const Json& j) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(parse_double(e.get<std::string>()));
  return v;
}

const char* target_family_name(TargetFamily f) {
  switch (f) {
    case TargetFamily::kExponential:
      return "exponential";
    case TargetFamily::kPolynomial:
      return "polynomial";
    case TargetFamily::kWeibull:
      return "weibull";
    case TargetFamily::kTabulated:
      return "tabulated";
  }
  return "?";
}

const char* gauge_family_name(GaugeFamily f) {
  switch (f) {
    case GaugeFamily::kPower:
      return "power";
    case GaugeFamily::kExp:
      return "exp";
    case GaugeFamily::kExpPower:
      return "exp_power";
    case GaugeFamily::kIdentityPlus:
      return "identity_plus";
    case GaugeFamily::kTabulated:
      return "tabulated";
  }
  return "?";
}

}  // namespace

Json target_to_json(const TargetDistribution& t) {
  Json j;
  j["family"] = target_family_name(t.family());
  if (t.family() == TargetFamily::kTabulated) {
    j["x"] = double_list(t.grid_x());
    j["risk"] = double_list(t.grid_risk());
  } else {
    j["alpha"] = format_double(t.alpha());
  }
  return j;
}

TargetDistribution target_from_json(const Json& j) {
  std::string fam = j.at("family").get<std::string>();
  if (fam == "exponential")
    return TargetDistribution::exponential(
        parse_double(j.at("alpha").get<std::string>()));
  if (fam == "polynomial")
    return TargetDistribution::polynomial(
        parse_double(j.at("alpha").get<std::string>()));
  if (fam == "weibull")
    return TargetDistribution::weibull(
        parse_double(j.at("alpha").get<std::string>()));
  if (fam == "tabulated")
    return TargetDistribution::tabulated(double_list_from(j.at("x")),
                                         double_list_from(j.at("risk")));
  throw std::invalid_argument("unknown target family '" + fam + "'");
}

Json gauge_to_json(const GrowthFunction& g) {
  Json j;
  j["family"] = gauge_family_name(g.family());
  if (g.family() == GaugeFamily::kTabulated) {
    j["x"] = double_list(g.grid_x());
    j["g"] = double_list(g.grid_g());
  } else if (g.family() != GaugeFamily::kIdentityPlus) {
    j["beta"] = format_double(g.beta());
  }
  return j;
}

GrowthFunction gauge_from_json(const Json& j) {
  std::string fam = j.at("family").get<std::string>();
  if (fam == "power")
    return GrowthFunction::power(parse_double(j.at("beta").get<std::string>()));
  if (fam == "exp")
    return GrowthFunction::exp(parse_double(j.at("beta").get<std::string>()));
  if (fam == "exp_power")
    return GrowthFunction::exp_power(
        parse_double(j.at("beta").get<std::string>()));
  if (fam == "identity_plus") return GrowthFunction::identity_plus();
  if (fam == "tabulated")
    return GrowthFunction::tabulated(double_list_from(j.at("x")),
                                     double_list_from(j.at("g")));
  throw std::invalid_argument("unknown gauge family '" + fam + "'");
}

Json risk_to_json(const RiskFunction& r) {
  Json j;
  double scale = 1.0;
  if (const TargetDistribution* t = r.scaled_target_ref(&scale)) {
    j["type"] = "scaled_target";
    j["target"] = target_to_json(*t);
    j["scale"] = format_double(scale);
    return j;
  }
  if (const PiecewiseRiskCore* core = r.piecewise_core()) {
    j["type"] = "piecewise";
    j["target"] = target_to_json(core->target);
    Json bps = Json::array();
    for (const auto& b : core->breakpoints) bps.push_back(wide_to_json(b));
    j["breakpoints"] = std::move(bps);
    Json segs = Json::array();
    for (const auto& s : core->segments) {
      Json e;
      e["flat"] = s.flat;
      e["level"] = wide_to_json(s.level);
      segs.push_back(std::move(e));
    }
    j["segments"] = std::move(segs);
    return j;
  }
  throw std::invalid_argument("sum risks serialize via their parts");
}

RiskFunction risk_from_json(const Json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "scaled_target")
    return RiskFunction::scaled_target(
        target_from_json(j.at("target")),
        parse_double(j.at("scale").get<std::string>()));
  if (type == "piecewise") {
    auto core = std::make_shared<PiecewiseRiskCore>();
    core->target = target_from_json(j.at("target"));
    for (const auto& b : j.at("breakpoints"))
      core->breakpoints.push_back(wide_from_json(b));
    for (const auto& s : j.at("segments"))
      core->segments.push_back(
          {s.at("flat").get<bool>(), wide_from_json(s.at("level"))});
    // rebuild cached breakpoint values
    core->values.reserve(core->breakpoints.size());
    for (std::size_t i = 0; i < core->breakpoints.size(); ++i) {
      if (i == 0) {
        core->values.push_back(WideReal::zero());
        continue;
      }
      const RiskSegment& seg = core->segments[i - 1];
      core->values.push_back(
          seg.flat ? seg.level
                   : sub_clamped(core->target.risk_wide(core->breakpoints[i]),
                                 seg.level));
    }
    return RiskFunction::piecewise(std::move(core));
  }
  throw std::invalid_argument("unknown risk type '" + type + "'");
}

Json plan_to_json(const ConstructionPlan& plan) {
  Json j;
  j["schema"] = "heavymin.plan.v1";
  j["target"] = target_to_json(plan.target());
  j["gauge"] = gauge_to_json(plan.gauge());
  j["policy"] = to_string(plan.policy());
  j["n"] = plan.n();
  j["k"] = plan.k();
  Json cyc = Json::array();
  for (const auto& s : plan.subset_cycle()) {
    Json e = Json::array();
    for (int i : s) e.push_back(i + 1);  // 1-based on the wire
    cyc.push_back(std::move(e));
  }
  j["subset_order"] = std::move(cyc);
  j["overflow_truncated"] = plan.overflow_truncated();
  Json bps = Json::array();
  for (const auto& b : plan.breakpoints()) bps.push_back(wide_to_json(b));
  j["breakpoints"] = std::move(bps);
  Json ivs = Json::array();
  for (std::size_t l = 0; l < plan.interval_count(); ++l) {
    const PlanInterval& iv = plan.intervals()[l];
    Json e;
    e["index"] = static_cast<int>(l);
    Json fr = Json::array();
    for (int i : iv.frozen) fr.push_back(i + 1);
    e["frozen"] = std::move(fr);
    e["gap"] = wide_to_json(iv.gap);
    e["log_certificate"] = format_double(iv.log_certificate);
    e["certificate"] = format_double(std::exp(iv.log_certificate));
    ivs.push_back(std::move(e));
  }
  j["intervals"] = std::move(ivs);
  return j;
}

std::shared_ptr<const ConstructionPlan> plan_from_json(const Json& j) {
  if (j.at("schema").get<std::string>() != "heavymin.plan.v1")
    throw std::invalid_argument("unknown plan schema");
  TargetDistribution target = target_from_json(j.at("target"));
  GrowthFunction gauge = gauge_from_json(j.at("gauge"));
  Policy policy = policy_from_string(j.at("policy").get<std::string>());
  int n = j.at("n").get<int>();
  int k = j.at("k").get<int>();
  std::vector<WideReal> breakpoints;
  for (const auto& b : j.at("breakpoints"))
    breakpoints.push_back(wide_from_json(b));
  std::vector<WideReal> gaps;
  std::vector<double> log_certs;
  for (const auto& e : j.at("intervals")) {
    gaps.push_back(wide_from_json(e.at("gap")));
    log_certs.push_back(
        parse_double(e.at("log_certificate").get<std::string>()));
  }
  auto plan = rebuild_plan(target, gauge, policy, n, k, breakpoints, gaps,
                           log_certs,
                           j.at("overflow_truncated").get<bool>());
  // frozen sets in the document must agree with the lexicographic cycle
  std::size_t l = 0;
  for (const auto& e : j.at("intervals")) {
    std::vector<int> frozen;
    for (const auto& v : e.at("frozen")) frozen.push_back(v.get<int>() - 1);
    if (frozen != plan->intervals()[l].frozen)
      throw std::invalid_argument("interval " + std::to_string(l) +
                                  ": frozen set does not follow the cycle");
    ++l;
  }
  return plan;
}

Json family_to_json(const HeavyFamily& family) {
  Json j;
  j["schema"] = "heavymin.family.v1";
  j["n"] = family.n;
  j["k"] = family.k;
  j["target"] = target_to_json(family.target);
  j["gauge"] = gauge_to_json(family.gauge);
  j["note"] = family.note;
  if (family.plan) {
    j["plan"] = plan_to_json(*family.plan);
  } else {
    Json risks = Json::array();
    for (const auto& r : family.risks) risks.push_back(risk_to_json(r));
    j["risks"] = std::move(risks);
  }
  return j;
}

HeavyFamily family_from_json(const Json& j) {
  if (j.contains("schema") &&
      j.at("schema").get<std::string>() == "heavymin.plan.v1") {
    // bare plan documents load as families
    HeavyFamily fam;
    auto plan = plan_from_json(j);
    fam.n = plan->n();
    fam.k = plan->k();
    fam.target = plan->target();
    fam.gauge = plan->gauge();
    fam.risks = plan->component_risks();
    fam.plan = std::move(plan);
    return fam;
  }
  if (j.at("schema").get<std::string>() != "heavymin.family.v1")
    throw std::invalid_argument("unknown family schema");
  HeavyFamily fam;
  fam.n = j.at("n").get<int>();
  fam.k = j.at("k").get<int>();
  fam.target = target_from_json(j.at("target"));
  fam.gauge = gauge_from_json(j.at("gauge"));
  fam.note = j.at("note").get<std::string>();
  if (j.contains("plan")) {
    auto plan = plan_from_json(j.at("plan"));
    fam.risks = plan->component_risks();
    fam.plan = std::move(plan);
  } else {
    for (const auto& r : j.at("risks")) fam.risks.push_back(risk_from_json(r));
  }
  return fam;
}

namespace {

Json subset_json(const std::vector<int>& s) {
  Json a = Json::array();
  for (int i : s) a.push_back(i + 1);
  return a;
}

}  // namespace

Json report_to_json(const VerificationReport& r) {
  Json j;
  j["schema"] = "heavymin.report.v1";
  j["n"] = r.n;
  j["k"] = r.k;
  j["policy"] = r.policy;
  j["intervals"] = static_cast<int>(r.intervals);
  j["truncated"] = r.truncated;
  j["certificates_match_stored"] = r.certificates_match_stored;
  j["first_certificate_mismatch"] =
      static_cast<int>(r.first_certificate_mismatch);
  j["gaps_ok"] = r.gaps_ok;
  j["min_log_certificate"] = format_double(r.min_log_certificate);
  j["argmin_certificate"] = static_cast<int>(r.argmin_certificate);
  j["certificates_ok"] = r.certificates_ok;
  j["per_risk_bound_ok"] = r.per_risk_bound_ok;
  j["per_risk_bound_worst"] = format_double(r.per_risk_bound_worst);
  j["has_exactness"] = r.has_exactness;
  j["exactness_sup_residual"] = format_double(r.exactness_sup_residual);
  Json dom = Json::array();
  for (const auto& d : r.dominance) {
    Json e;
    e["subset"] = subset_json(d.subset);
    e["min_slack"] = format_double(d.min_slack);
    dom.push_back(std::move(e));
  }
  j["dominance"] = std::move(dom);
  Json certs = Json::array();
  for (const auto& c : r.certificates) {
    Json e;
    e["subset"] = subset_json(c.subset);
    e["residue"] = c.residue;
    e["min_log_certificate"] = format_double(c.min_log_certificate);
    e["L"] = c.L;
    e["divergence_bound"] = format_double(c.divergence_bound);
    certs.push_back(std::move(e));
  }
  j["certificates"] = std::move(certs);
  Json ks = Json::array();
  for (const auto& k : r.ks) {
    Json e;
    e["subset"] = subset_json(k.subset);
    e["statistic"] = format_double(k.statistic);
    e["samples"] = static_cast<int>(k.samples);
    e["critical"] = format_double(k.critical);
    e["significance"] = format_double(k.significance);
    e["two_sided"] = k.two_sided;
    e["accept"] = k.accept;
    ks.push_back(std::move(e));
  }
  j["ks"] = std::move(ks);
  Json hz = Json::array();
  for (const auto& h : r.hazard) {
    Json e;
    e["component"] = h.component + 1;
    e["probes"] = static_cast<int>(h.probes);
    e["last_ratio"] = format_double(h.last_ratio);
    e["strictly_decreasing"] = h.strictly_decreasing;
    hz.push_back(std::move(e));
  }
  j["hazard"] = std::move(hz);
  j["pass"] = r.pass;
  j["failures"] = r.failures;
  return j;
}

std::string to_document(const Json& j) { return j.dump(2) + "\n"; }

Json from_document(const std::string& text) { return Json::parse(text); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace heavymin
