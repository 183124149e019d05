// Command-line frontend for the cornfield toolkit.
//
// Subcommands:
//   thresholds  print every applicable condition threshold for an observed association
//   assess      judge hypothesized confounder strengths against the thresholds
//   ingest      parse a delimited count table and print the observed measures
//   verify      run the necessity/sharpness verification suite
//
// Exit codes: 0 success (assess: necessary conditions met), 1 assess verdict
// "cannot explain away", 2 malformed input or usage, 3 necessity violation,
// 4 sharpness gap.

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cornfield/cornfield.hpp"

namespace {

using namespace cornfield;

// Measures may be quoted in percent; "0.012%" and "0.00012" are the same value.
double parse_measure(std::string s, const std::string& what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  bool percent = false;
  if (!s.empty() && s.back() == '%') {
    percent = true;
    s.pop_back();
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw parse_error("flag " + what + ": expected a number, got '" + s + "'", 0);
  return percent ? v / 100.0 : v;
}

std::uint64_t parse_seed(const std::string& s, const std::string& origin) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw parse_error(origin + ": expected an unsigned integer seed, got '" + s + "'", 0);
  return v;
}

// Flag value wins over the CORNFIELD_SEED environment variable, which wins
// over the built-in default.
std::uint64_t resolve_seed(const std::optional<std::string>& flag) {
  if (flag) return parse_seed(*flag, "--seed");
  if (const char* env = std::getenv("CORNFIELD_SEED")) return parse_seed(env, "CORNFIELD_SEED");
  return kDefaultSeed;
}

struct SpecFlags {
  std::string scale;
  std::string observed;
  int k = 2;
  bool average = false;
  bool conditional = false;
  bool monotone = false;
  bool machine = false;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
  cmd->add_option("--scale", f.scale, "association scale: rr or rd")->required();
  cmd->add_option("--observed", f.observed,
                  "observed association (rd values may carry a % suffix)")
      ->required();
  cmd->add_option("--k", f.k, "number of confounder levels (default 2)");
  cmd->add_flag("--average-null", f.average, "grant only a zero average effect");
  cmd->add_flag("--conditional-null", f.conditional,
                "grant a zero effect within every confounder level (default)");
  cmd->add_flag("--monotone", f.monotone,
                "grant that exposure never lowers any non-reference level's prevalence");
  cmd->add_flag("--machine", f.machine, "machine-readable output");
}

ThresholdSpec build_spec(const SpecFlags& f) {
  ThresholdSpec spec;
  if (f.scale == "rr")
    spec.scale = Scale::RelativeRisk;
  else if (f.scale == "rd")
    spec.scale = Scale::RiskDifference;
  else
    throw parse_error("--scale must be rr or rd, got '" + f.scale + "'", 0);
  if (f.average && f.conditional)
    throw parse_error("--average-null and --conditional-null are mutually exclusive", 0);
  spec.assumption.null = f.average ? NullKind::AverageNull : NullKind::ConditionalNull;
  spec.assumption.monotone = f.monotone;
  spec.k = f.k;

  // The conditions are stated for rr >= 1 and rd >= 0; an association in the
  // other direction is the same analysis with the coding reversed.
  double obs = parse_measure(f.observed, "--observed");
  if (spec.scale == Scale::RelativeRisk) {
    if (!(obs > 0.0)) throw parse_error("--observed: a relative risk must be positive", 0);
    if (obs < 1.0) obs = 1.0 / obs;
  } else {
    obs = std::abs(obs);
    if (obs > 1.0) throw parse_error("--observed: a risk difference cannot exceed 1", 0);
  }
  spec.observed = obs;
  spec.validate();
  return spec;
}

struct StrengthFlags {
  std::optional<std::string> rr_eu, rr_ud, rr_ud_e1, rr_ud_e0;
  std::optional<std::string> u_e, u_d, u_d_star, u_d_prime;
  std::optional<std::string> rd_eu, rd_ud, rd_ud_e1, rd_ud_e0;
  std::optional<std::string> a_max, b_max;
};

void add_strength_flags(CLI::App* cmd, StrengthFlags& f) {
  cmd->add_option("--rr-eu", f.rr_eu, "exposure-confounder relative risk (binary confounder)");
  cmd->add_option("--rr-ud", f.rr_ud, "confounder-outcome relative risk (conditional null)");
  cmd->add_option("--rr-ud-e1", f.rr_ud_e1, "confounder-outcome relative risk among the exposed");
  cmd->add_option("--rr-ud-e0", f.rr_ud_e0, "confounder-outcome relative risk among the unexposed");
  cmd->add_option("--u-e", f.u_e, "spread of exposure odds across confounder levels");
  cmd->add_option("--u-d", f.u_d, "spread of unexposed risks across levels");
  cmd->add_option("--u-d-star", f.u_d_star, "spread of exposed risks across levels");
  cmd->add_option("--u-d-prime", f.u_d_prime, "max of --u-d and --u-d-star");
  cmd->add_option("--rd-eu", f.rd_eu, "exposure-confounder risk difference (binary confounder)");
  cmd->add_option("--rd-ud", f.rd_ud, "confounder-outcome risk difference (conditional null)");
  cmd->add_option("--rd-ud-e1", f.rd_ud_e1, "confounder-outcome risk difference among the exposed");
  cmd->add_option("--rd-ud-e0", f.rd_ud_e0, "confounder-outcome risk difference among the unexposed");
  cmd->add_option("--a-max", f.a_max, "largest absolute prevalence shift across levels");
  cmd->add_option("--b-max", f.b_max, "largest absolute outcome-risk shift across levels");
}

HypothesizedStrengths build_strengths(const StrengthFlags& f) {
  HypothesizedStrengths s;
  const auto take = [](const std::optional<std::string>& raw, const char* name) {
    return raw ? std::optional<double>(parse_measure(*raw, name)) : std::nullopt;
  };
  s.rr_eu = take(f.rr_eu, "--rr-eu");
  s.rr_ud = take(f.rr_ud, "--rr-ud");
  s.rr_ud_e1 = take(f.rr_ud_e1, "--rr-ud-e1");
  s.rr_ud_e0 = take(f.rr_ud_e0, "--rr-ud-e0");
  s.u_e = take(f.u_e, "--u-e");
  s.u_d = take(f.u_d, "--u-d");
  s.u_d_star = take(f.u_d_star, "--u-d-star");
  s.u_d_prime = take(f.u_d_prime, "--u-d-prime");
  s.rd_eu = take(f.rd_eu, "--rd-eu");
  s.rd_ud = take(f.rd_ud, "--rd-ud");
  s.rd_ud_e1 = take(f.rd_ud_e1, "--rd-ud-e1");
  s.rd_ud_e0 = take(f.rd_ud_e0, "--rd-ud-e0");
  s.a_max = take(f.a_max, "--a-max");
  s.b_max = take(f.b_max, "--b-max");
  return s;
}

std::string measure_text(const std::optional<double>& v, bool machine) {
  if (!v) return "na";
  return machine ? format_full(*v) : format_short(*v);
}

std::string measure_list(const std::vector<std::optional<double>>& vs, bool machine) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += measure_text(vs[i], machine);
  }
  return out;
}

int run_ingest(const std::string& path, bool tab, bool machine) {
  const ParseOptions opts{tab ? '\t' : ','};
  const ParsedTable table = parse_table_file(path, opts);

  if (const TwoByTwo* t = std::get_if<TwoByTwo>(&table)) {
    const AssociationMeasures m = observed_from_table(*t);
    if (machine) {
      std::cout << "schema=cornfield.ingest.v1\n";
      std::cout << "table=2x2\n";
      std::cout << "exposed_cases=" << t->exposed_cases << "\n";
      std::cout << "exposed_noncases=" << t->exposed_noncases << "\n";
      std::cout << "unexposed_cases=" << t->unexposed_cases << "\n";
      std::cout << "unexposed_noncases=" << t->unexposed_noncases << "\n";
      std::cout << "rr_ed=" << measure_text(m.rr_ed, true) << "\n";
      std::cout << "rd_ed=" << format_full(m.rd_ed) << "\n";
    } else {
      std::cout << "2x2 table: exposed " << t->exposed_cases << "/" << t->exposed_total()
                << " cases, unexposed " << t->unexposed_cases << "/" << t->unexposed_total()
                << " cases\n";
      std::cout << "relative risk  (rr_ed): " << measure_text(m.rr_ed, false) << "\n";
      std::cout << "risk difference (rd_ed): " << format_short(m.rd_ed) << "\n";
    }
    return 0;
  }

  const StratifiedTable& st = std::get<StratifiedTable>(table);
  const StratifiedMeasures m = observed_from_table(st);
  if (machine) {
    std::cout << "schema=cornfield.ingest.v1\n";
    std::cout << "table=stratified\n";
    std::cout << "k=" << m.k << "\n";
    for (int j = 0; j < m.k; ++j) {
      const TwoByTwo& t = st.strata[j];
      std::cout << "stratum=" << j << "\texposed_cases=" << t.exposed_cases
                << "\texposed_noncases=" << t.exposed_noncases
                << "\tunexposed_cases=" << t.unexposed_cases
                << "\tunexposed_noncases=" << t.unexposed_noncases << "\n";
    }
    std::cout << "rr_ed=" << measure_text(m.pooled.rr_ed, true) << "\n";
    std::cout << "rd_ed=" << format_full(m.pooled.rd_ed) << "\n";
    if (m.k == 2) {
      std::cout << "rr_eu=" << measure_text(m.pooled.rr_eu, true) << "\n";
      std::cout << "rd_eu=" << measure_text(m.pooled.rd_eu, true) << "\n";
    }
    std::cout << "rd_ud_e1=" << measure_list(m.rd_ud_e1, true) << "\n";
    std::cout << "rd_ud_e0=" << measure_list(m.rd_ud_e0, true) << "\n";
    std::cout << "rr_ud_e1=" << measure_list(m.rr_ud_e1, true) << "\n";
    std::cout << "rr_ud_e0=" << measure_list(m.rr_ud_e0, true) << "\n";
  } else {
    std::cout << "stratified table over " << m.k << " confounder levels\n";
    std::cout << "pooled relative risk  (rr_ed): " << measure_text(m.pooled.rr_ed, false) << "\n";
    std::cout << "pooled risk difference (rd_ed): " << format_short(m.pooled.rd_ed) << "\n";
    if (m.k == 2) {
      std::cout << "exposure-confounder: rr_eu " << measure_text(m.pooled.rr_eu, false)
                << ", rd_eu " << measure_text(m.pooled.rd_eu, false) << "\n";
    }
    std::cout << "confounder-outcome contrasts against level 0:\n";
    for (int j = 1; j < m.k; ++j) {
      std::cout << "  level " << j << ": rd " << measure_text(m.rd_ud_e1[j], false)
                << " (exposed) / " << measure_text(m.rd_ud_e0[j], false) << " (unexposed), rr "
                << measure_text(m.rr_ud_e1[j], false) << " (exposed) / "
                << measure_text(m.rr_ud_e0[j], false) << " (unexposed)\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cornfield: necessary confounder strengths for explaining away an association"};
  app.require_subcommand(1);

  SpecFlags thr_flags;
  CLI::App* thresholds = app.add_subcommand(
      "thresholds", "print the strength thresholds an explaining confounder must reach");
  add_spec_flags(thresholds, thr_flags);

  SpecFlags assess_flags;
  StrengthFlags strength_flags;
  CLI::App* assess_cmd = app.add_subcommand(
      "assess", "judge hypothesized confounder strengths against the thresholds");
  add_spec_flags(assess_cmd, assess_flags);
  add_strength_flags(assess_cmd, strength_flags);

  std::string ingest_path;
  bool ingest_tab = false, ingest_machine = false;
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "parse a delimited count table and print observed measures");
  ingest_cmd->add_option("--input", ingest_path, "path to the delimited table")->required();
  ingest_cmd->add_flag("--tab", ingest_tab, "tab-delimited input (default comma)");
  ingest_cmd->add_flag("--machine", ingest_machine, "machine-readable output");

  VerifyConfig verify_cfg;
  std::optional<std::string> verify_seed;
  std::int64_t verify_boundary_n = -1;
  bool verify_machine = false;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the necessity and sharpness verification suite");
  verify_cmd->add_option("--k", verify_cfg.k, "confounder levels (default 2)");
  verify_cmd->add_option("--n", verify_cfg.n, "null laws per condition cell (default 100000)");
  verify_cmd->add_option("--seed", verify_seed, "RNG seed (default $CORNFIELD_SEED or 20140101)");
  verify_cmd->add_option("--budget", verify_cfg.budget,
                         "objective evaluations per sharpness search (default 100000)");
  verify_cmd->add_option("--boundary-n", verify_boundary_n,
                         "extra near-degenerate laws per cell (default n/5, 0 disables)");
  verify_cmd->add_option("--workers", verify_cfg.workers,
                         "worker threads, 0 = all cores (never affects results)");
  verify_cmd->add_flag("--machine", verify_machine, "machine-readable output");
  verify_cmd
      ->add_option("--selftest-threshold-scale", verify_cfg.threshold_scale,
                   "inflate thresholds to prove violations are detectable")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (thresholds->parsed()) {
      const ThresholdReport report = thresholds_report(build_spec(thr_flags));
      std::cout << (thr_flags.machine ? to_machine_text(report) : to_human_text(report));
      return 0;
    }
    if (assess_cmd->parsed()) {
      const ThresholdReport report =
          assess(build_spec(assess_flags), build_strengths(strength_flags));
      std::cout << (assess_flags.machine ? to_machine_text(report) : to_human_text(report));
      return report.overall == OverallVerdict::CannotExplainAway ? 1 : 0;
    }
    if (ingest_cmd->parsed()) return run_ingest(ingest_path, ingest_tab, ingest_machine);
    if (verify_cmd->parsed()) {
      verify_cfg.seed = resolve_seed(verify_seed);
      verify_cfg.boundary_n = verify_boundary_n >= 0 ? verify_boundary_n : verify_cfg.n / 5;
      const VerifySummary summary = run_verify_suite(verify_cfg);
      std::cout << (verify_machine ? to_machine_text(summary) : to_human_text(summary));
      if (summary.necessity_violated()) return 3;
      if (summary.sharpness_gap()) return 4;
      return 0;
    }
  } catch (const cornfield::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
