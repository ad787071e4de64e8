// Command-line front end.
//
// Exit codes: 0 success, 2 input error, 3 degenerate model or zero-measure
// condition, 4 reproduction failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bellising/boltzmann.hpp"
#include "bellising/builtin.hpp"
#include "bellising/chsh.hpp"
#include "bellising/freewill.hpp"
#include "bellising/independence.hpp"
#include "bellising/report.hpp"
#include "bellising/reproduce.hpp"
#include "bellising/sampling.hpp"
#include "bellising/search.hpp"
#include "bellising/series.hpp"
#include "bellising/series_check.hpp"
#include "bellising/spec_io.hpp"

namespace {

using namespace bellising;
using report::Precision;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitReproduction = 4;

struct Common {
  std::string spec;
  std::string out;
  std::string format = "csv";
  std::string precision = "display";

  Precision prec() const { return precision == "full" ? Precision::Full : Precision::Display; }
  bool json() const { return format == "json"; }
};

EnumerationOptions enumeration_options() {
  EnumerationOptions o;
  if (const char* cap = std::getenv("BELLISING_ENUM_CAP")) {
    try {
      const auto v = std::stoul(cap);
      if (v < 1 || v > kHardNodeLimit) throw std::out_of_range("cap");
      o.cap = v;
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, std::string("BELLISING_ENUM_CAP must be an integer in 1..62, got ") + cap);
    }
  }
  return o;
}

LatticeSpec resolve_spec(const std::string& s) {
  if (s.empty()) fail(ErrorKind::InvalidArgument, "--spec is required (file or built-in name)");
  if (auto b = builtin::by_name(s)) return *b;
  return load_lattice(s);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) fail(ErrorKind::InvalidArgument, "cannot write " + c.out);
  f << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

PartialAssignment parse_assignment(const LatticeSpec& spec, const std::string& text) {
  PartialAssignment p;
  if (text.empty() || text == "-") return p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorKind::InvalidArgument, "expected id=+ or id=-, got '" + item + "'");
    const auto id = item.substr(0, eq), v = item.substr(eq + 1);
    int s;
    if (v == "+" || v == "+1" || v == "1") {
      s = 1;
    } else if (v == "-" || v == "-1") {
      s = -1;
    } else {
      fail(ErrorKind::InvalidArgument, "spin value must be + or -, got '" + v + "'");
    }
    if (p.mask & bit(spec.require_index(id))) fail(ErrorKind::InvalidArgument, "node " + id + " assigned twice");
    p.set(spec, id, s);
  }
  return p;
}

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void add_common(CLI::App* app, Common& c, bool spec) {
  if (spec) app->add_option("--spec", c.spec, "lattice spec file or built-in name");
  app->add_option("--out", c.out, "write output to this file instead of stdout");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--precision", c.precision, "display (6 significant digits) or full")
      ->check(CLI::IsMember({"display", "full"}));
}

// ---------------------------------------------------------------------------

int cmd_eval(const Common& c, const std::string& which, const std::string& lambda_ids) {
  const auto model = BoltzmannModel::build(resolve_spec(c.spec), enumeration_options());
  const auto lambda = lambda_ids.empty() ? HiddenSubset::all(model.spec())
                                         : HiddenSubset::of(model.spec(), split_ids(lambda_ids));
  const bool all = which == "all";
  if (c.json()) {
    nlohmann::json j;
    if (all || which == "table") j["table"] = report::to_json(conditional_table(model));
    if (all || which == "chsh") j["chsh"] = report::to_json(chsh(model));
    if (all || which == "independence") j["independence"] = report::to_json(independence_report(model, lambda), lambda);
    emit(c, dump(j));
    return kExitOk;
  }
  std::string text;
  if (all || which == "table") text += report::table_csv(conditional_table(model), c.prec());
  if (all || which == "chsh") text += report::chsh_csv(chsh(model), c.prec());
  if (all || which == "independence") text += report::independence_csv(independence_report(model, lambda), c.prec());
  emit(c, text);
  return kExitOk;
}

int cmd_reproduce(const Common& c, const std::string& id) {
  const auto cases = reproduction_cases();
  const auto rows = run_reproduction(cases, id);
  if (c.json()) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"case", r.case_id},
                     {"lattice", r.row->lattice},
                     {"quantity", r.row->quantity},
                     {"comparison", r.row->comparison == Comparison::Within ? "within" : "above"},
                     {"expected", r.row->expected},
                     {"tolerance", r.row->tolerance},
                     {"computed", r.computed},
                     {"contingent", r.row->contingent},
                     {"source", r.row->source},
                     {"verdict", to_string(r.verdict)}});
    }
    emit(c, dump(arr));
  } else {
    std::string text = "case,lattice,quantity,expected,tolerance,computed,verdict\n";
    for (const auto& r : rows) {
      const std::string expected =
          (r.row->comparison == Comparison::Above ? ">" : "") + report::num(r.row->expected, c.prec());
      text += r.case_id + "," + r.row->lattice + "," + report::cell(r.row->quantity) + "," + expected + "," +
              report::num(r.row->tolerance, c.prec()) + "," + report::num(r.computed, c.prec()) + "," +
              to_string(r.verdict) + "\n";
    }
    emit(c, text);
  }
  return any_failure(rows) ? kExitReproduction : kExitOk;
}

int cmd_series(const Common& c, const std::vector<double>& ks, const std::vector<int>& ns) {
  const auto r = series::series_check(ks.empty() ? series::default_k_grid() : ks,
                                      ns.empty() ? std::vector<int>{5, 6, 7, 8, 9, 10} : ns);
  emit(c, c.json() ? dump(report::to_json(r)) : report::series_csv(r, c.prec()));
  return kExitOk;
}

int cmd_freewill(const Common& c) {
  const auto opts = enumeration_options();
  const auto model = BoltzmannModel::build(resolve_spec(c.spec), opts);
  const auto r = freewill_report(model, opts);
  if (c.json()) {
    emit(c, dump(report::to_json(r)));
  } else {
    emit(c, report::freewill_csv(r, c.prec()) + "max_discrepancy," + report::num(r.max_discrepancy, c.prec()) +
                "\npartition_defect," + report::num(r.partition_defect, c.prec()) + "\nmax_measure_discrepancy," +
                report::num(r.max_measure_discrepancy, c.prec()) + "\n");
  }
  return kExitOk;
}

struct SampleArgs {
  std::uint64_t seed = 42;
  std::uint64_t n = 100000;
  std::string sampler = "exact";
  std::uint64_t burn_in = 0;
  std::uint64_t thinning = 0;
  std::string event = "1=+,2=+";
  std::string given = "a=+,b=+";
};

int cmd_sample(const Common& c, const SampleArgs& a) {
  const auto model = BoltzmannModel::build(resolve_spec(c.spec), enumeration_options());
  SampleRun run;
  run.seed = a.seed;
  run.n = a.n;
  run.kind = *parse_sampler(a.sampler);
  run.burn_in = a.burn_in;
  run.thinning = a.thinning;
  const auto r = frequency_report(model, run, parse_assignment(model.spec(), a.event),
                                  parse_assignment(model.spec(), a.given));
  if (r.warning) std::cerr << "warning: " << *r.warning << "\n";
  emit(c, c.json() ? dump(report::to_json(r)) : report::trace_csv(r, c.prec()));
  return kExitOk;
}

struct OptimizeArgs {
  std::string config;
  std::size_t budget = 500;
  std::uint64_t seed = 1;
  std::size_t grid = 0;
  std::string objective = "x_bi";
  std::string placements;
  bool budget_set = false;
  bool seed_set = false;
};

int cmd_optimize(const Common& c, const OptimizeArgs& a) {
  if (a.placements == "corner") {
    const auto rows = chsh_placement_search();
    std::string text = "placement,x_uniform,x_fields,matches\n";
    for (const auto& r : rows) {
      text += report::cell(describe(r.placement)) + "," + report::num(r.x_uniform, c.prec()) + "," +
              report::num(r.x_fields, c.prec()) + "," + (r.matches ? "true" : "false") + "\n";
    }
    emit(c, text);
    return kExitOk;
  }
  if (a.placements == "crossed") {
    const auto rows = crossed_placement_search();
    std::string text = "placement,x_bi,md,od,pd,score\n";
    for (const auto& r : rows) {
      text += report::cell(describe(r.placement)) + "," + report::num(r.x_bi, c.prec()) + "," + report::num(r.md, c.prec()) + "," +
              report::num(r.od, c.prec()) + "," + report::num(r.pd, c.prec()) + "," + report::num(r.score, c.prec()) +
              "\n";
    }
    emit(c, text);
    return kExitOk;
  }
  if (!a.placements.empty()) fail(ErrorKind::InvalidArgument, "--placements must be corner or crossed");

  SearchConfig cfg;
  if (!a.config.empty()) {
    cfg = load_search_config(a.config);
  } else {
    cfg.space = mirror_space(resolve_spec(c.spec));
    cfg.space.objective = a.objective == "max_abs_x" ? Objective::MaxAbsX : Objective::XBi;
  }
  if (a.budget_set || a.config.empty()) cfg.budget = a.budget;
  if (a.seed_set || a.config.empty()) cfg.seed = a.seed;
  cfg.space.enumeration = enumeration_options();
  if (a.grid > 0) {
    const auto rows = grid_scan(cfg.space, a.grid);
    emit(c, report::scan_csv(cfg.space, rows, c.prec()));
    return kExitOk;
  }
  const auto r = maximize_chsh(cfg.space, cfg.budget, cfg.seed);
  if (c.json()) {
    emit(c, dump(report::to_json(cfg.space, r, cfg.budget, cfg.seed)));
  } else {
    emit(c, report::trajectory_csv(cfg.space, r, c.prec()));
  }
  return kExitOk;
}

struct ChainArgs {
  int n = 10;
  double k = 0.5;
  bool check = false;
  bool profile = false;
  int enumerate_up_to = 20;
};

int cmd_chain(const Common& c, const ChainArgs& a) {
  series::check_chain_length(a.n);
  if (!(std::abs(a.k) < 1.0)) fail(ErrorKind::InvalidArgument, "--k must satisfy |K| < 1");
  if (a.profile) {
    std::vector<int> ns;
    for (int n = builtin::kMinChainLength; n <= a.n; ++n) ns.push_back(n);
    const auto closed = series::chain_md_profile(ns, a.k);
    std::vector<std::optional<series::ChainMdPoint>> enumerated;
    const auto cap = enumeration_options().cap;
    for (int n : ns) {
      if (n <= a.enumerate_up_to && static_cast<std::size_t>(n + 2) <= cap) {
        enumerated.push_back(series::chain_md_enumerated(n, a.k));
      } else {
        enumerated.push_back(std::nullopt);
      }
    }
    emit(c, report::chain_md_csv(closed, enumerated, c.prec()));
    return kExitOk;
  }
  if (a.check) {
    const auto checks = series::check_chain(a.n, {a.k});
    series::SeriesCheckReport r;
    r.k_grid = {a.k};
    r.chain_lengths = {a.n};
    r.checks = checks;
    if (c.json()) {
      emit(c, dump(report::to_json(r)));
    } else {
      emit(c, report::series_csv(r, c.prec()) + "max_relative_deviation," +
                  report::num(r.max_relative_deviation(), c.prec()) + "\n");
    }
    return kExitOk;
  }
  const auto model = BoltzmannModel::build(builtin::chain(a.n, std::atanh(a.k)), enumeration_options());
  const auto lambda = HiddenSubset::all(model.spec());
  const auto ir = independence_report(model, lambda);
  if (c.json()) {
    emit(c, dump({{"chsh", report::to_json(chsh(model))}, {"independence", report::to_json(ir, lambda)}}));
  } else {
    emit(c, report::chsh_csv(chsh(model), c.prec()) + report::independence_csv(ir, c.prec()));
  }
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ZeroMeasure:
    case ErrorKind::Degenerate:
    case ErrorKind::NumericRange:
      return kExitDegenerate;
    default:
      return kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Ising-lattice models of Bell experiments"};
  app.require_subcommand(1);
  Common common;

  std::string report_kind = "all", lambda_ids;
  auto* eval = app.add_subcommand("eval", "conditional table, CHSH and independence measures of a lattice");
  add_common(eval, common, true);
  eval->add_option("--report", report_kind, "chsh, independence, table or all")
      ->check(CLI::IsMember({"chsh", "independence", "table", "all"}));
  eval->add_option("--lambda", lambda_ids, "comma-separated hidden node ids (default: all hidden)");

  std::string case_id = "all";
  auto* repro = app.add_subcommand("reproduce", "compare against the reference values");
  add_common(repro, common, false);
  repro->add_option("case", case_id, "case id or all");

  std::vector<double> ks;
  std::vector<int> ns;
  auto* ser = app.add_subcommand("series", "closed forms against exact enumeration");
  add_common(ser, common, false);
  ser->add_option("--k", ks, "K values (default 0, 0.1, ..., 0.9)");
  ser->add_option("--n", ns, "chain lengths (default 5..10)");

  auto* fw = app.add_subcommand("freewill", "postselected versus clamped analyzer tables");
  add_common(fw, common, true);

  SampleArgs sargs;
  auto* smp = app.add_subcommand("sample", "frequency convergence of a sampled event");
  add_common(smp, common, true);
  smp->add_option("--seed", sargs.seed);
  smp->add_option("--n", sargs.n, "number of samples")->check(CLI::PositiveNumber);
  smp->add_option("--sampler", sargs.sampler)->check(CLI::IsMember({"exact", "metropolis"}));
  smp->add_option("--burn-in", sargs.burn_in, "metropolis burn-in flips (default 10 * N * 1024)");
  smp->add_option("--thinning", sargs.thinning, "metropolis flips per sample (default N)");
  smp->add_option("--event", sargs.event, "e.g. 1=+,2=+");
  smp->add_option("--given", sargs.given, "e.g. a=+,b=+ or - for none");

  OptimizeArgs oargs;
  auto* opt = app.add_subcommand("optimize", "maximise X over fields and couplings");
  add_common(opt, common, true);
  opt->add_option("--config", oargs.config, "search config file");
  auto* budget_opt = opt->add_option("--budget", oargs.budget, "objective evaluations");
  auto* seed_opt = opt->add_option("--seed", oargs.seed);
  opt->add_option("--grid", oargs.grid, "grid scan with this many points per parameter instead of a search");
  opt->add_option("--objective", oargs.objective)->check(CLI::IsMember({"x_bi", "max_abs_x"}));
  opt->add_option("--placements", oargs.placements, "role-placement report: corner or crossed");

  ChainArgs cargs;
  auto* chn = app.add_subcommand("chain", "N-chain measures, series check and MD profile");
  add_common(chn, common, false);
  chn->add_option("--n", cargs.n, "chain length N (>= 5); upper end for --md-profile");
  chn->add_option("--k", cargs.k, "K = tanh(beta J)");
  chn->add_flag("--check", cargs.check, "compare the closed forms with enumeration");
  chn->add_flag("--md-profile", cargs.profile, "MD for N = 5..n, both readings");
  chn->add_option("--enumerate-up-to", cargs.enumerate_up_to, "largest N cross-checked by enumeration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*eval) return cmd_eval(common, report_kind, lambda_ids);
    if (*repro) return cmd_reproduce(common, case_id);
    if (*ser) return cmd_series(common, ks, ns);
    if (*fw) return cmd_freewill(common);
    if (*smp) return cmd_sample(common, sargs);
    if (*opt) {
      oargs.budget_set = budget_opt->count() > 0;
      oargs.seed_set = seed_opt->count() > 0;
      return cmd_optimize(common, oargs);
    }
    if (*chn) return cmd_chain(common, cargs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
