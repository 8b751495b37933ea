#include "ouedge/report_io.hpp"

#include <ostream>

#include <fmt/format.h>

namespace ouedge {

using nlohmann::json;

void write_validation_csv(std::ostream& os, const MCReport& report) {
  os << "T,a,p,empirical,se,psi_p,gap,informative\n";
  for (const auto& cell : report.cells)
    for (const auto& e : cell.psi)
      os << fmt::format("{},{},{},{},{},{},{},{}\n", cell.T, cell.a, e.p, cell.empirical, cell.se, e.psi, e.gap,
                        cell.informative ? 1 : 0);
}

void write_kstats_csv(std::ostream& os, const MCReport& report) {
  os << "T,r,k_stat,boot_se,chi\n";
  for (const auto& c : report.cumulants)
    os << fmt::format("{},{},{},{},{}\n", c.T, c.r, c.k_stat, c.boot_se, c.chi);
}

json report_to_json(const MCReport& report) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json psi = json::array();
    for (const auto& e : cell.psi) psi.push_back({{"p", e.p}, {"psi", e.psi}, {"gap", e.gap}});
    cells.push_back({{"T", cell.T},
                     {"a", cell.a},
                     {"empirical", cell.empirical},
                     {"se", cell.se},
                     {"psi_normal", cell.psi_normal},
                     {"informative", cell.informative},
                     {"psi", psi}});
  }
  json cumulants = json::array();
  for (const auto& c : report.cumulants)
    cumulants.push_back({{"T", c.T}, {"r", c.r}, {"k_stat", c.k_stat}, {"boot_se", c.boot_se}, {"chi", c.chi}});
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"cells", cells},
          {"cumulants", cumulants},
          {"checks", checks},
          {"all_checks_passed", report.all_checks_passed()},
          {"notes", report.notes},
          {"metadata",
           {{"config_hash", report.config_hash},
            {"degenerate", report.degenerate},
            {"wall_seconds", report.wall_seconds}}}};
}

json theta_hat_to_json(const ThetaHatResult& r) {
  return {{"T", r.T},
          {"n", r.n},
          {"theta0", r.theta0},
          {"mean_theta_hat", r.mean_theta_hat},
          {"bias", r.bias},
          {"bias_se", r.bias_se},
          {"scaled_variance", r.scaled_variance},
          {"scaled_variance_se", r.scaled_variance_se},
          {"chi2", r.chi2},
          {"scaled_k3", r.scaled_skewness_k3},
          {"chi3", r.chi3},
          {"ks_normal", r.ks_normal},
          {"ks_edgeworth3", r.ks_edgeworth3}};
}

void write_convergence_csv(std::ostream& os, const ConvergenceStudy& study) {
  os << "r,T,scaled_chi,limit,gap\n";
  for (const auto& row : study.rows)
    os << fmt::format("{},{},{},{},{}\n", row.r, row.T, row.scaled, row.limit, row.gap);
}

json convergence_to_json(const ConvergenceStudy& study) {
  json rows = json::array();
  for (const auto& row : study.rows)
    rows.push_back({{"r", row.r}, {"T", row.T}, {"scaled_chi", row.scaled}, {"limit", row.limit}, {"gap", row.gap}});
  json slopes = json::array();
  for (const auto& s : study.slopes)
    slopes.push_back({{"r", s.r}, {"slope", s.slope ? json(*s.slope) : json(nullptr)}});
  return {{"rows", rows}, {"slopes", slopes}};
}

}  // namespace ouedge
