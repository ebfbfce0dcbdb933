#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "qfock/moments.hpp"

namespace qfock::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // failed verification, inconclusive verdict
inline constexpr int kExitConfig = 2;  // bad flags, out-of-range q, unwritable output

/// Runs one command.  `args` excludes the program name.  Data goes to `out`
/// (or the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One line of the verify report.  Items with gated == false are reported but
/// do not decide the exit status: they compare a truncated quantity with the
/// value of the untruncated operator and cannot shrink below the truncation
/// error at any cutoff that fits in memory.
struct VerifyItem {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool gated = true;
};

struct VerifyOptions {
  int level = 6;         ///< Fock level cutoff of the structural checks
  int w_order = 24;      ///< K of the w-matrix suite
  int gamma_grid = 200;  ///< interior points for the involution checks
};

std::vector<VerifyItem> verify_suite(const QContext& ctx, const VerifyOptions& opt = {});

/// True when every gated item passes.
bool verify_passed(const std::vector<VerifyItem>& items);

nlohmann::ordered_json to_json(const MomentReport& rep);
nlohmann::ordered_json to_json(const VerifyItem& item);

/// 17 significant digits, the fixed number format of every CSV the tool writes.
std::string format_number(double v);

}  // namespace qfock::cli
