// heavymin: build families of heavy-tailed distributions whose minimum
// reproduces (or is dominated by) a chosen target, then verify every
// claim the construction makes numerically.
//
// Exit codes: 0 all checks pass, 2 configuration error, 3 admissibility
// hypothesis violated, 4 a verification check failed, 5 I/O error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heavymin/construct.hpp"
#include "heavymin/risk.hpp"
#include "heavymin/serialize.hpp"
#include "heavymin/verify.hpp"

namespace hm = heavymin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitCheckFailed = 4;
constexpr int kExitIo = 5;

std::vector<double> load_number_list(const std::string& path) {
  std::string text = hm::read_file(path);
  std::vector<double> out;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    out.push_back(hm::parse_double(tok));
    tok.clear();
  };
  for (char c : text) {
    if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t')
      flush();
    else
      tok.push_back(c);
  }
  flush();
  return out;
}

// "family:param" or "family" or "tabulated:file.csv" (x,value per line)
std::pair<std::string, std::string> split_spec(const std::string& spec) {
  auto pos = spec.find(':');
  if (pos == std::string::npos) return {spec, ""};
  return {spec.substr(0, pos), spec.substr(pos + 1)};
}

void load_table(const std::string& path, std::vector<double>* xs,
                std::vector<double>* ys) {
  std::istringstream in(hm::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("table line without comma: " + line);
    xs->push_back(hm::parse_double(line.substr(0, comma)));
    ys->push_back(hm::parse_double(line.substr(comma + 1)));
  }
}

hm::TargetDistribution parse_target(const std::string& spec) {
  auto [family, param] = split_spec(spec);
  if (family == "exponential")
    return hm::TargetDistribution::exponential(hm::parse_double(param));
  if (family == "polynomial")
    return hm::TargetDistribution::polynomial(hm::parse_double(param));
  if (family == "weibull")
    return hm::TargetDistribution::weibull(hm::parse_double(param));
  if (family == "tabulated") {
    std::vector<double> xs, rs;
    load_table(param, &xs, &rs);
    return hm::TargetDistribution::tabulated(std::move(xs), std::move(rs));
  }
  throw std::invalid_argument("unknown target family '" + family +
                              "' (exponential, polynomial, weibull, "
                              "tabulated)");
}

hm::GrowthFunction parse_gauge(const std::string& spec) {
  auto [family, param] = split_spec(spec);
  if (family == "power") return hm::GrowthFunction::power(hm::parse_double(param));
  if (family == "exp") return hm::GrowthFunction::exp(hm::parse_double(param));
  if (family == "exp_power")
    return hm::GrowthFunction::exp_power(hm::parse_double(param));
  if (family == "identity_plus") return hm::GrowthFunction::identity_plus();
  if (family == "tabulated") {
    std::vector<double> xs, gs;
    load_table(param, &xs, &gs);
    return hm::GrowthFunction::tabulated(std::move(xs), std::move(gs));
  }
  throw std::invalid_argument("unknown gauge family '" + family +
                              "' (power, exp, exp_power, identity_plus, "
                              "tabulated)");
}

hm::ExampleFamily parse_example_family(const std::string& s) {
  if (s == "exp") return hm::ExampleFamily::kExponential;
  if (s == "poly") return hm::ExampleFamily::kPolynomial;
  if (s == "weibull") return hm::ExampleFamily::kWeibull;
  throw std::invalid_argument("unknown figures family '" + s +
                              "' (exp, poly, weibull)");
}

struct ConstructArgs {
  std::string target, gauge, mode = "pair", policy = "exact-minimal";
  std::string output;
  int n = 2, k = 2, horizon = 0;
  double x_bound = 0.0;
};

int run_construct(const ConstructArgs& a) {
  hm::TargetDistribution target = parse_target(a.target);
  hm::GrowthFunction gauge = parse_gauge(a.gauge);

  if (a.mode == "sqrt-split") {
    hm::HeavyFamily fam = hm::sqrt_split(target);
    fam.gauge = gauge;
    std::cout << "sqrt-split of " << target.describe()
              << ": both components carry risk R_F/2\n";
    if (target.family() == hm::TargetFamily::kExponential &&
        gauge.family() == hm::GaugeFamily::kExp) {
      double alpha = target.alpha(), beta = gauge.beta();
      if (beta > alpha / 2) {
        std::cout << "shortcut: components are exponential(alpha/2 = "
                  << alpha / 2 << ") and E g is already infinite for this "
                  << "gauge (beta = " << beta << " > alpha/2)\n";
        fam.note += "; exponential shortcut applies: beta > alpha/2";
      } else {
        std::cout << "note: beta <= alpha/2, the split components are NOT "
                  << "heavy for this gauge; use the pair construction\n";
      }
    } else {
      std::cout << "note: split components are not gauge-heavy in general\n";
    }
    hm::write_file(a.output, hm::to_document(hm::family_to_json(fam)));
    std::cout << "wrote " << a.output << "\n";
    return kExitOk;
  }

  if (a.mode != "pair" && a.mode != "family")
    throw std::invalid_argument("unknown mode '" + a.mode +
                                "' (pair, family, sqrt-split)");
  int n = a.mode == "pair" ? 2 : a.n;
  int k = a.mode == "pair" ? 2 : a.k;
  hm::Horizon horizon{a.horizon, a.x_bound};
  hm::HeavyFamily fam;
  auto [pol_name, pol_param] = split_spec(a.policy);
  if (pol_name == "explicit") {
    if (pol_param.empty())
      throw std::invalid_argument("--policy explicit:<file> needs a file");
    fam = hm::construct_explicit(target, gauge, n, k,
                                 load_number_list(pol_param));
  } else {
    hm::Policy policy = hm::policy_from_string(a.policy);
    if (a.mode == "pair")
      fam = hm::construct_pair(target, gauge, policy, horizon);
    else
      fam = hm::construct_family(target, gauge, n, k, policy, horizon);
  }

  const hm::ConstructionPlan& plan = *fam.plan;
  double min_log_cert = std::numeric_limits<double>::infinity();
  for (const auto& iv : plan.intervals())
    min_log_cert = std::min(min_log_cert, iv.log_certificate);
  std::cout << "constructed " << plan.interval_count() << " intervals (n="
            << plan.n() << ", k=" << plan.k() << ", policy "
            << hm::to_string(plan.policy()) << ")\n"
            << "min certificate = " << std::exp(min_log_cert) << " (log "
            << min_log_cert << ")\n";
  if (plan.overflow_truncated())
    std::cout << "note: horizon truncated at the representable range\n";
  hm::write_file(a.output, hm::to_document(hm::plan_to_json(plan)));
  std::cout << "wrote " << a.output << "\n";
  return kExitOk;
}

struct VerifyArgs {
  std::string plan_file, output;
  std::size_t ks_samples = 100000;
  std::uint64_t seed = 12345;
  bool seed_given = false;
  double significance = 0.01;
  int grid_points = 10000;
  int divergence_L = -1;
  bool no_ks = false;
};

int run_verify(const VerifyArgs& a) {
  hm::HeavyFamily fam =
      hm::family_from_json(hm::from_document(hm::read_file(a.plan_file)));
  hm::VerificationConfig cfg;
  cfg.ks_samples = a.ks_samples;
  cfg.seed = a.seed;
  cfg.significance = a.significance;
  cfg.grid_points = a.grid_points;
  cfg.divergence_L = a.divergence_L;
  cfg.run_ks = !a.no_ks;
  if (!a.seed_given && cfg.run_ks)
    std::cout << "seed = " << cfg.seed << " (default)\n";

  hm::VerificationReport rep = hm::verify_family(fam, cfg);

  std::cout << "plan: n=" << rep.n << " k=" << rep.k << " policy="
            << rep.policy << " intervals=" << rep.intervals << "\n";
  std::cout << "certificates match stored: "
            << (rep.certificates_match_stored ? "ok" : "MISMATCH") << "\n";
  std::cout << "gaps >= 1: " << (rep.gaps_ok ? "ok" : "FAIL") << "\n";
  std::cout << "certificates >= 1: "
            << (rep.certificates_ok ? "ok" : "FAIL") << " (min log "
            << rep.min_log_certificate << ")\n";
  std::cout << "component risks <= target risk: "
            << (rep.per_risk_bound_ok ? "ok" : "FAIL") << "\n";
  if (rep.has_exactness)
    std::cout << "exactness sup residual = " << rep.exactness_sup_residual
              << (rep.exactness_sup_residual <= hm::kRelTol ? " (ok)"
                                                            : " (FAIL)")
              << "\n";
  for (const auto& d : rep.dominance) {
    std::cout << "dominance subset {";
    for (std::size_t i = 0; i < d.subset.size(); ++i)
      std::cout << (i ? "," : "") << d.subset[i] + 1;
    std::cout << "}: min slack = " << d.min_slack
              << (d.min_slack >= -hm::kRelTol ? " (ok)" : " (FAIL)") << "\n";
  }
  for (const auto& c : rep.certificates) {
    std::cout << "divergence subset {";
    for (std::size_t i = 0; i < c.subset.size(); ++i)
      std::cout << (i ? "," : "") << c.subset[i] + 1;
    std::cout << "}: bound at L=" << c.L << " is " << c.divergence_bound
              << "\n";
  }
  for (const auto& k : rep.ks)
    std::cout << (k.two_sided ? "two-sided" : "one-sided") << " KS (n="
              << k.samples << "): D=" << k.statistic << " critical="
              << k.critical << (k.accept ? " (accept)" : " (REJECT)") << "\n";
  for (const auto& f : rep.failures) std::cout << "FAIL: " << f << "\n";
  std::cout << (rep.pass ? "all checks pass" : "verification FAILED") << "\n";

  if (!a.output.empty())
    hm::write_file(a.output, hm::to_document(hm::report_to_json(rep)));
  return rep.pass ? kExitOk : kExitCheckFailed;
}

struct SampleArgs {
  std::string plan_file, output;
  std::size_t n = 1000;
  std::uint64_t seed = 12345;
  bool seed_given = false;
};

int run_sample(const SampleArgs& a) {
  hm::HeavyFamily fam =
      hm::family_from_json(hm::from_document(hm::read_file(a.plan_file)));
  if (!a.seed_given) std::cout << "seed = " << a.seed << " (default)\n";
  hm::SampleMatrix m = hm::sample_family(fam, a.n, a.seed);
  std::ostringstream os;
  for (std::size_t c = 0; c < m.components; ++c)
    os << (c ? "," : "") << "component_" << c + 1;
  os << ",minimum\n";
  for (std::size_t j = 0; j < m.count; ++j) {
    for (std::size_t c = 0; c < m.components; ++c)
      os << (c ? "," : "") << hm::format_double(m.at(c, j));
    os << "," << hm::format_double(m.min_at(j)) << "\n";
  }
  hm::write_file(a.output, os.str());
  std::cout << "wrote " << m.count << " rows to " << a.output << "\n";
  return kExitOk;
}

struct FiguresArgs {
  std::string family, output;
  double alpha = 0.0, beta = 0.0;
  int count = 8;
};

int run_figures(const FiguresArgs& a) {
  hm::ExampleFamily fam = parse_example_family(a.family);
  if (a.count < 1) throw std::invalid_argument("-K must be >= 1");

  std::vector<double> sums =
      hm::example_sequence_sums(fam, a.alpha, a.beta, a.count);
  hm::TargetDistribution target = hm::example_target(fam, a.alpha);
  hm::GrowthFunction gauge = hm::example_gauge(fam, a.beta);
  std::vector<hm::WideReal> minimal =
      hm::minimal_sequence(target, gauge, a.count + 1);

  // explicit columns in their native domains; log-sum continuation keeps
  // the log-log column finite after the plain sum overflows
  double log_rho = std::log(a.alpha / a.beta);
  double log_sum = -std::numeric_limits<double>::infinity();

  std::ostringstream os;
  os << "# figures family=" << a.family << " alpha="
     << hm::format_double(a.alpha) << " beta=" << hm::format_double(a.beta)
     << "\n";
  os << "k,log_minimal,log_explicit,loglog_minimal,loglog_explicit\n";
  int truncated_at = 0;
  for (int k = 1; k <= a.count; ++k) {
    double s = sums[static_cast<std::size_t>(k - 1)];
    log_sum = hm::WideReal::logaddexp(log_sum, k * log_rho);
    double log_explicit, loglog_explicit;
    if (fam == hm::ExampleFamily::kWeibull) {
      log_explicit = std::exp(s);  // may overflow to inf
      loglog_explicit = s;
    } else {
      log_explicit = std::numbers::ln2 * s;
      loglog_explicit = std::log(std::numbers::ln2) + log_sum;
    }
    std::string log_min_cell, loglog_min_cell;
    if (k < static_cast<int>(minimal.size())) {
      const hm::WideReal& m = minimal[static_cast<std::size_t>(k)];
      log_min_cell = hm::format_double(m.log_as_double());
      loglog_min_cell = hm::format_double(m.loglog_as_double());
    } else if (!truncated_at) {
      truncated_at = k;
    }
    os << k << "," << log_min_cell << "," << hm::format_double(log_explicit)
       << "," << loglog_min_cell << ","
       << hm::format_double(loglog_explicit) << "\n";
  }
  if (truncated_at)
    os << "# minimal column truncated at k=" << truncated_at
       << " (beyond the representable range)\n";
  hm::write_file(a.output, os.str());
  std::cout << "wrote " << a.output;
  if (truncated_at)
    std::cout << " (minimal column truncated at k=" << truncated_at << ")";
  std::cout << "\n";
  return kExitOk;
}

struct ValidateArgs {
  std::string target, gauge, seq_file, output;
  int n = 2, k = 2;
};

int run_validate_seq(const ValidateArgs& a) {
  hm::TargetDistribution target = parse_target(a.target);
  hm::GrowthFunction gauge = parse_gauge(a.gauge);
  std::vector<double> seq = load_number_list(a.seq_file);
  hm::SequenceValidation v =
      hm::validate_explicit_sequence(target, gauge, seq, a.n, a.k);
  for (const auto& iv : v.intervals) {
    std::cout << "interval " << iv.index << ": gap=" << iv.gap
              << (iv.gap_ok ? "" : " (gap < 1: coverage violated)")
              << " certificate=" << std::exp(iv.log_certificate)
              << (iv.certificate_ok ? "" : " (below 1)") << "\n";
  }
  std::cout << (v.all_ok ? "sequence valid" : "sequence INVALID") << "\n";
  if (!a.output.empty()) {
    hm::Json j;
    j["schema"] = "heavymin.seq-validation.v1";
    j["all_ok"] = v.all_ok;
    hm::Json ivs = hm::Json::array();
    for (const auto& iv : v.intervals) {
      hm::Json e;
      e["index"] = iv.index;
      e["gap"] = hm::format_double(iv.gap);
      e["gap_ok"] = iv.gap_ok;
      e["log_certificate"] = hm::format_double(iv.log_certificate);
      e["certificate_ok"] = iv.certificate_ok;
      ivs.push_back(std::move(e));
    }
    j["intervals"] = std::move(ivs);
    hm::write_file(a.output, hm::to_document(j));
  }
  return v.all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heavy-tailed minimum construction toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  ConstructArgs ca;
  CLI::App* construct = app.add_subcommand(
      "construct", "build a plan and write it as a structured document");
  construct->add_option("--target", ca.target, "target, family:param")
      ->required();
  construct->add_option("--gauge", ca.gauge, "growth gauge, family:param")
      ->required();
  construct->add_option("--mode", ca.mode, "pair | family | sqrt-split");
  construct->add_option("--n", ca.n, "components (family mode)");
  construct->add_option("--k", ca.k, "dominated-minimum size (family mode)");
  construct->add_option("--policy", ca.policy,
                        "exact-minimal | paper-minimal | explicit:<file>");
  construct->add_option("--horizon", ca.horizon, "interval count");
  construct->add_option("--x-bound", ca.x_bound, "extend until a_L >= bound");
  construct->add_option("-o,--output", ca.output, "plan file")->required();

  VerifyArgs va;
  CLI::App* verify =
      app.add_subcommand("verify", "check a plan document end to end");
  verify->add_option("plan", va.plan_file, "plan file")->required();
  verify->add_option("-o,--output", va.output, "report file");
  verify->add_option("--ks-samples", va.ks_samples, "KS sample size");
  verify->add_option("--seed", va.seed, "root RNG seed")
      ->each([&va](const std::string&) { va.seed_given = true; });
  verify->add_option("--significance", va.significance, "KS significance");
  verify->add_option("--grid-points", va.grid_points, "sweep grid size");
  verify->add_option("--divergence-L", va.divergence_L,
                     "truncation index for divergence bounds");
  verify->add_flag("--no-ks", va.no_ks, "skip the statistical checks");

  SampleArgs sa;
  CLI::App* sample =
      app.add_subcommand("sample", "inverse-transform samples from a plan");
  sample->add_option("plan", sa.plan_file, "plan file")->required();
  sample->add_option("-n", sa.n, "sample count");
  sample->add_option("--seed", sa.seed, "root RNG seed")
      ->each([&sa](const std::string&) { sa.seed_given = true; });
  sample->add_option("-o,--output", sa.output, "CSV output")->required();

  FiguresArgs fa;
  CLI::App* figures = app.add_subcommand(
      "figures", "emit minimal vs explicit breakpoint columns as CSV");
  figures->add_option("--family", fa.family, "exp | poly | weibull")
      ->required();
  figures->add_option("--alpha", fa.alpha, "target parameter")->required();
  figures->add_option("--beta", fa.beta, "gauge parameter")->required();
  figures->add_option("-K,--count", fa.count, "number of terms");
  figures->add_option("-o,--output", fa.output, "CSV output")->required();

  ValidateArgs la;
  CLI::App* vseq = app.add_subcommand(
      "validate-seq", "check an explicit breakpoint sequence");
  vseq->add_option("--target", la.target, "target, family:param")->required();
  vseq->add_option("--gauge", la.gauge, "growth gauge, family:param")
      ->required();
  vseq->add_option("--n", la.n, "components");
  vseq->add_option("--k", la.k, "dominated-minimum size");
  vseq->add_option("--seq", la.seq_file, "file with breakpoints")->required();
  vseq->add_option("-o,--output", la.output, "report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*construct) return run_construct(ca);
    if (*verify) return run_verify(va);
    if (*sample) return run_sample(sa);
    if (*figures) return run_figures(fa);
    if (*vseq) return run_validate_seq(la);
  } catch (const hm::HypothesisError& e) {
    std::cerr << "hypothesis violated: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::domain_error& e) {
    std::cerr << "inadmissible input: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::out_of_range& e) {
    std::cerr << "out of range: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
