#pragma once

// CSV and JSON renderings of the library results.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bellising/chsh.hpp"
#include "bellising/freewill.hpp"
#include "bellising/independence.hpp"
#include "bellising/sampling.hpp"
#include "bellising/search.hpp"
#include "bellising/series_check.hpp"

namespace bellising::report {

enum class Precision { Display, Full };

/// 6 significant digits, or enough digits to round-trip.
inline std::string num(double v, Precision p = Precision::Display) {
  char buf[40];
  std::snprintf(buf, sizeof buf, p == Precision::Full ? "%.17g" : "%.6g", v);
  return buf;
}

/// Quotes a CSV cell that holds a comma or quote.
inline std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::string sign(int s) { return s > 0 ? "+" : "-"; }

inline nlohmann::json to_json(const ChshReport& r) {
  return {{"m_ab", r.m_ab},   {"m_apb", r.m_apb},         {"m_abp", r.m_abp},          {"m_apbp", r.m_apbp},
          {"x_bi", r.x_bi},   {"max_abs_x", r.max_abs_x}, {"convention", r.convention}};
}

inline std::string chsh_csv(const ChshReport& r, Precision p = Precision::Display) {
  return "m_ab,m_apb,m_abp,m_apbp,x_bi\n" + num(r.m_ab, p) + "," + num(r.m_apb, p) + "," + num(r.m_abp, p) + "," +
         num(r.m_apbp, p) + "," + num(r.x_bi, p) + "\n";
}

inline nlohmann::json to_json(const ConditionalTable& t) {
  auto rows = nlohmann::json::array();
  for (const auto& [sa, sb] : kSettingPairs) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        rows.push_back({{"s1", s1}, {"s2", s2}, {"sa", sa}, {"sb", sb}, {"p", t.at(s1, s2, sa, sb)}});
      }
    }
  }
  return rows;
}

inline std::string table_csv(const ConditionalTable& t, Precision p = Precision::Display) {
  std::string out = "s1,s2,sa,sb,p\n";
  for (const auto& [sa, sb] : kSettingPairs) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        out += sign(s1) + "," + sign(s2) + "," + sign(sa) + "," + sign(sb) + "," + num(t.at(s1, s2, sa, sb), p) + "\n";
      }
    }
  }
  return out;
}

inline nlohmann::json to_json(const IndependenceReport& r, const HiddenSubset& lambda) {
  nlohmann::json j = {{"lambda", r.lambda_ids},
                      {"tolerance", r.tolerance},
                      {"md", r.md.value},
                      {"od", r.od.value},
                      {"pd", r.pd.value},
                      {"mi_holds", r.mi_holds},
                      {"oi_holds", r.oi_holds},
                      {"pi_holds", r.pi_holds},
                      {"factorizable", r.factorizable},
                      {"factorization_max_defect", r.factorization.max_defect}};
  const auto& mw = r.md.witness;
  j["md_witness"] = {{"setting", setting_name(mw.sa, mw.sb)}, {"setting_prime", setting_name(mw.sap, mw.sbp)}};
  if (r.od.witness) {
    j["od_witness"] = {{"setting", setting_name(r.od.witness->sa, r.od.witness->sb)},
                       {"lambda", lambda.describe(r.od.witness->lambda)}};
  }
  if (r.pd.witness) {
    const auto& w = *r.pd.witness;
    j["pd_witness"] = {{"outcome_side", w.side},   {"fixed_setting", w.fixed_setting},
                       {"varied", w.varied},       {"varied_prime", w.varied_prime},
                       {"outcome", w.outcome},     {"lambda", lambda.describe(w.lambda)}};
  }
  j["skipped_cells"] = {{"od", r.od.skipped_cells}, {"pd", r.pd.skipped_cells}};
  return j;
}

inline std::string independence_csv(const IndependenceReport& r, Precision p = Precision::Display) {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return "md,od,pd,mi_holds,oi_holds,pi_holds,factorizable\n" + num(r.md.value, p) + "," + num(r.od.value, p) + "," +
         num(r.pd.value, p) + "," + b(r.mi_holds) + "," + b(r.oi_holds) + "," + b(r.pi_holds) + "," +
         b(r.factorizable) + "\n";
}

inline nlohmann::json to_json(const series::SeriesCheckReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"quantity", c.quantity},
                      {"geometry", c.geometry},
                      {"max_relative_deviation", c.max_relative_deviation},
                      {"cases", c.cases},
                      {"worst_k", c.worst_k}});
  }
  return {{"k_grid", r.k_grid},
          {"chain_lengths", r.chain_lengths},
          {"tolerance", r.tolerance},
          {"max_relative_deviation", r.max_relative_deviation()},
          {"passed", r.passed()},
          {"checks", checks}};
}

inline std::string series_csv(const series::SeriesCheckReport& r, Precision p = Precision::Display) {
  std::string out = "quantity,geometry,cases,max_relative_deviation,worst_k\n";
  for (const auto& c : r.checks) {
    out += c.quantity + "," + c.geometry + "," + std::to_string(c.cases) + "," + num(c.max_relative_deviation, p) +
           "," + num(c.worst_k, p) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const FreewillReport& r) {
  return {{"ex1", to_json(r.ex1)},
          {"ex2", to_json(r.ex2)},
          {"max_discrepancy", r.max_discrepancy},
          {"partition_defect", r.partition_defect},
          {"md", {r.md_ex1, r.md_ex2}},
          {"od", {r.od_ex1, r.od_ex2}},
          {"pd", {r.pd_ex1, r.pd_ex2}},
          {"max_measure_discrepancy", r.max_measure_discrepancy}};
}

inline std::string freewill_csv(const FreewillReport& r, Precision p = Precision::Display) {
  std::string out = "s1,s2,sa,sb,ex1,ex2,abs_diff\n";
  for (const auto& [sa, sb] : kSettingPairs) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        const double x = r.ex1.at(s1, s2, sa, sb), y = r.ex2.at(s1, s2, sa, sb);
        out += sign(s1) + "," + sign(s2) + "," + sign(sa) + "," + sign(sb) + "," + num(x, p) + "," + num(y, p) + "," +
               num(std::abs(x - y), p) + "\n";
      }
    }
  }
  return out;
}

inline std::string trace_csv(const ConvergenceReport& r, Precision p = Precision::Display) {
  std::string out = "n,freq,exact,se\n";
  for (const auto& t : r.trace) out += std::to_string(t.n) + "," + num(t.freq, p) + "," + num(t.exact, p) + "," + num(t.se, p) + "\n";
  return out;
}

inline nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"n", t.n}, {"matched", t.matched}, {"freq", t.freq}, {"exact", t.exact}, {"se", t.se}});
  }
  nlohmann::json j = {{"event", r.event},
                      {"given", r.given},
                      {"seed", r.seed},
                      {"sampler", to_string(r.kind)},
                      {"exact", r.exact},
                      {"postselected", r.postselected},
                      {"final_frequency", r.final_frequency},
                      {"final_deviation", r.final_deviation},
                      {"standard_error", r.standard_error},
                      {"trace", trace}};
  if (r.warning) j["warning"] = *r.warning;
  return j;
}

inline nlohmann::json to_json(const SearchSpace& space, const SearchResult& r, std::size_t budget, std::uint64_t seed) {
  nlohmann::json best = nlohmann::json::object();
  for (std::size_t i = 0; i < r.best.size(); ++i) best[space.params[i].name] = r.best[i];
  nlohmann::json traj = nlohmann::json::array();
  for (const auto& inc : r.trajectory) {
    traj.push_back({{"evaluation", inc.evaluation}, {"restart", inc.restart}, {"point", inc.point}, {"value", inc.value}});
  }
  return {{"objective", space.objective == Objective::XBi ? "x_bi" : "max_abs_x"},
          {"budget", budget},
          {"seed", seed},
          {"best", best},
          {"best_value", r.best_value},
          {"x_bi", r.best_x_bi},
          {"evaluations", r.evaluations},
          {"restarts", r.restarts},
          {"restart_seeds", r.restart_seeds},
          {"certified_local", r.certified_local},
          {"trajectory", traj}};
}

inline std::string trajectory_csv(const SearchSpace& space, const SearchResult& r, Precision p = Precision::Display) {
  std::string out = "evaluation,restart";
  for (const auto& prm : space.params) out += "," + prm.name;
  out += ",value\n";
  for (const auto& inc : r.trajectory) {
    out += std::to_string(inc.evaluation) + "," + std::to_string(inc.restart);
    for (double x : inc.point) out += "," + num(x, p);
    out += "," + num(inc.value, p) + "\n";
  }
  return out;
}

inline std::string scan_csv(const SearchSpace& space, const std::vector<ScanRow>& rows, Precision p = Precision::Display) {
  std::string out;
  for (const auto& prm : space.params) out += prm.name + ",";
  out += "x_bi,md,od,pd\n";
  for (const auto& r : rows) {
    for (double x : r.point) out += num(x, p) + ",";
    out += num(r.x_bi, p) + "," + num(r.md, p) + "," + num(r.od, p) + "," + num(r.pd, p) + "\n";
  }
  return out;
}

inline std::string chain_md_csv(const std::vector<series::ChainMdPoint>& closed,
                                const std::vector<std::optional<series::ChainMdPoint>>& enumerated,
                                Precision p = Precision::Display) {
  std::string out = "n,md_summed,md_per_configuration,md_summed_enum,md_per_configuration_enum\n";
  for (std::size_t i = 0; i < closed.size(); ++i) {
    out += std::to_string(closed[i].n) + "," + num(closed[i].md_summed, p) + "," +
           num(closed[i].md_per_configuration, p) + ",";
    if (i < enumerated.size() && enumerated[i]) {
      out += num(enumerated[i]->md_summed, p) + "," + num(enumerated[i]->md_per_configuration, p);
    } else {
      out += ",";
    }
    out += "\n";
  }
  return out;
}

}  // namespace bellising::report
