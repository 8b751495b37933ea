#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

#include "ouedge/harness.hpp"

namespace ouedge {

// Flat CSV, one row per (T, a, p): `T,a,p,empirical,se,psi_p,gap,informative`.
void write_validation_csv(std::ostream& os, const MCReport& report);

// `T,r,k_stat,boot_se,chi`
void write_kstats_csv(std::ostream& os, const MCReport& report);

// Full report. Timing lives under "metadata.wall_seconds" only.
nlohmann::json report_to_json(const MCReport& report);

nlohmann::json theta_hat_to_json(const ThetaHatResult& result);

// `r,T,scaled_chi,limit,gap`
void write_convergence_csv(std::ostream& os, const ConvergenceStudy& study);
nlohmann::json convergence_to_json(const ConvergenceStudy& study);

}  // namespace ouedge
