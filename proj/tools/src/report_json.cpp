#include <fmt/format.h>

#include "qfock_cli/cli.hpp"

namespace qfock::cli {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

nlohmann::ordered_json to_json(const MomentReport& rep) {
  using nlohmann::ordered_json;
  const WDiagnostics& wd = rep.w_diagnostics;

  ordered_json w;
  w["check_order"] = wd.check_order;
  w["parity_max"] = wd.parity_max;
  w["convergence"] = wd.convergence;
  w["completed_gram_defect"] = wd.completed_gram_defect;
  w["completed_involution_defect"] = wd.completed_involution_defect;
  w["truncated_gram_defect"] = wd.truncated_gram_defect;
  w["truncated_involution_defect"] = wd.truncated_involution_defect;

  ordered_json op = nullptr;
  if (rep.operator_check) {
    const OperatorMoment& m = *rep.operator_check;
    op = ordered_json::object();
    op["level"] = m.level;
    op["value"] = m.value;
    op["first_piece"] = m.first_piece;
    op["second_piece"] = m.second_piece;
    op["decomposition_residual"] = m.decomposition_residual;
    op["cross_term"] = m.cross_term;
    op["matched_value"] = m.matched_value;
    op["tail_bound"] = m.tail_bound;
  }

  ordered_json diag;
  diag["K"] = rep.K;
  diag["nodes"] = rep.nodes;
  diag["captured_mass"] = rep.captured_mass;
  diag["error_budget"] = rep.error_budget;
  diag["w"] = std::move(w);
  diag["operator"] = std::move(op);
  if (!rep.operator_error.empty()) diag["operator_error"] = rep.operator_error;

  ordered_json j;
  j["q"] = rep.q;
  j["m4_sum"] = rep.m4_sum;
  j["m4_gamma"] = rep.m4_gamma;
  j["s_of_q"] = rep.s_of_q;
  j["tail_bound"] = rep.tail_bound;
  j["margin"] = rep.margin;
  j["method"] = to_string(rep.method);
  j["verdict"] = to_string(rep.verdict);
  j["diagnostics"] = std::move(diag);
  return j;
}

nlohmann::ordered_json to_json(const VerifyItem& item) {
  nlohmann::ordered_json j;
  j["name"] = item.name;
  j["residual"] = item.residual;
  j["tolerance"] = item.tolerance;
  j["pass"] = item.pass;
  j["gated"] = item.gated;
  return j;
}

}  // namespace qfock::cli
