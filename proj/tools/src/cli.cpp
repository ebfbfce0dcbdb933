#include "qfock_cli/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>

namespace qfock::cli {
namespace {

constexpr double kQMin = 1e-6;
constexpr double kQMax = 1.0 - 1e-6;

// thrown for problems the user can fix by changing the invocation
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  double q = 0.5;
  double tol_quad = Tolerances{}.quad;
  double tol_product = Tolerances{}.product;
  int kmax = 0;  // 0: the context default
  std::string output;
  std::string format = "csv";

  QContext context(double at) const {
    std::optional<int> k;
    if (kmax > 0) k = kmax;
    return QContext(at, Tolerances{tol_product, tol_quad}, k);
  }
};

void add_q(CLI::App* sub, Common& c) {
  sub->add_option("--q", c.q, "deformation parameter")
      ->required()
      ->check(CLI::Range(kQMin, kQMax));
}

void add_tolerances(CLI::App* sub, Common& c) {
  sub->add_option("--tol-quad", c.tol_quad, "quadrature and root-finding tolerance")
      ->envname("QFOCK_TOL_QUAD")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--tol-product", c.tol_product, "truncation tolerance of infinite q-products")
      ->envname("QFOCK_TOL_PRODUCT")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_kmax(CLI::App* sub, Common& c, const char* what) {
  sub->add_option("--kmax", c.kmax, what)
      ->envname("QFOCK_KMAX")
      ->check(CLI::Range(0, 4000))
      ->capture_default_str();
}

void add_output(CLI::App* sub, Common& c, bool with_format) {
  sub->add_option("-o,--output", c.output, "output file (default: standard output)");
  if (with_format) {
    sub->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
}

// Output sink: the --output file when given, otherwise the data stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
    os_ = file_.get();
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

// Rows of doubles written either as CSV with the exact header or as a JSON
// array of objects keyed by the same names.
void write_table(std::ostream& os, const std::string& format,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < header.size(); ++i) o[header[i]] = r[i];
      arr.push_back(std::move(o));
    }
    os << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
    os << '\n';
  }
}

std::vector<double> support_grid(double L, int points) {
  std::vector<double> x(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) x[i] = -L + 2.0 * L * i / (points - 1);
  x.back() = L;
  return x;
}

int cmd_density(const Common& c, int points, std::ostream& out) {
  const DensityModel density(c.context(c.q));
  std::vector<std::vector<double>> rows;
  for (double x : support_grid(density.context().support(), points))
    rows.push_back({x, density.evaluate(x)});
  Sink sink(c.output, out);
  write_table(*sink, c.format, {"x", "pdf"}, rows);
  return kExitOk;
}

int cmd_gamma(const Common& c, int points, std::ostream& out) {
  const DensityModel density(c.context(c.q));
  const GammaMap g(std::make_shared<const CdfModel>(density));
  std::vector<std::vector<double>> rows;
  for (double x : support_grid(density.context().support(), points)) rows.push_back({x, g(x)});
  Sink sink(c.output, out);
  write_table(*sink, c.format, {"x", "gamma"}, rows);
  return kExitOk;
}

int cmd_wcoeff(const Common& c, std::ostream& out) {
  const QContext ctx = c.context(c.q);
  const DensityModel density(ctx);
  const GammaMap g(std::make_shared<const CdfModel>(density));
  const int K = ctx.series_cutoff();
  WOptions opt;
  opt.columns = 1;
  const WCoefficients w = w_matrix(g, K, opt);
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= K; ++k) {
    // [1]_q! = 1, so w_k1^2 [k]_q! is the squared orthonormal coefficient
    rows.push_back({static_cast<double>(k), w.w(k, 1), w.ortho(k, 1) * w.ortho(k, 1)});
  }
  Sink sink(c.output, out);
  write_table(*sink, c.format, {"k", "w_k1", "contrib"}, rows);
  return kExitOk;
}

int cmd_moment4(const Common& c, int operator_level, bool convergence, std::ostream& out,
                std::ostream& err) {
  TheoremOptions opt;
  opt.operator_level = operator_level;
  opt.convergence_check = convergence;
  const MomentReport rep = theorem_check(c.context(c.q), opt);
  Sink sink(c.output, out);
  *sink << to_json(rep).dump(2) << '\n';
  if (!rep.operator_error.empty()) err << "operator route skipped: " << rep.operator_error << '\n';
  if (rep.verdict != Verdict::strict) {
    err << "verdict inconclusive: margin " << format_number(rep.margin) << " within budget "
        << format_number(rep.error_budget) << "; raise --kmax\n";
    return kExitFailed;
  }
  return kExitOk;
}

int cmd_sweep(const Common& c, double qmin, double qmax, int steps, std::ostream& out,
              std::ostream& err) {
  if (!(qmin <= qmax)) throw ConfigError("sweep: --qmin must not exceed --qmax");
  std::optional<int> k;
  if (c.kmax > 0) k = c.kmax;
  const auto table = sweep(uniform_grid(qmin, qmax, steps), Tolerances{c.tol_product, c.tol_quad}, k);
  int status = kExitOk;
  std::vector<std::vector<double>> rows;
  for (const SweepRow& r : table) {
    if (!r.error.empty()) {
      err << "q = " << format_number(r.q) << ": " << r.error << '\n';
      status = kExitFailed;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rows.push_back({r.q, nan, nan, nan, nan, nan});
      continue;
    }
    if (r.verdict != Verdict::strict) {
      err << "q = " << format_number(r.q) << ": verdict inconclusive\n";
      status = kExitFailed;
    }
    rows.push_back({r.q, r.m4_sum, r.m4_gamma, r.s, r.margin, r.tail});
  }
  Sink sink(c.output, out);
  write_table(*sink, c.format, {"q", "m4_sum", "m4_gamma", "s", "margin", "tail"}, rows);
  return status;
}

int cmd_verify(const Common& c, int level, std::ostream& out, std::ostream& err) {
  VerifyOptions opt;
  opt.level = level;
  const auto items = verify_suite(c.context(c.q), opt);
  const bool ok = verify_passed(items);
  nlohmann::ordered_json j;
  j["q"] = c.q;
  j["level"] = level;
  j["pass"] = ok;
  j["items"] = nlohmann::ordered_json::array();
  for (const auto& it : items) {
    j["items"].push_back(to_json(it));
    if (it.gated && !it.pass) {
      err << "FAIL " << it.name << ": " << format_number(it.residual) << " > "
          << format_number(it.tolerance) << '\n';
    }
  }
  Sink sink(c.output, out);
  *sink << j.dump(2) << '\n';
  return ok ? kExitOk : kExitFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"q-Gaussian moments and the involution counterexample", "qfock"};
  app.require_subcommand(1);

  Common c;
  int points = 201;
  int operator_level = 12;
  bool convergence = false;
  double qmin = 0.02, qmax = 0.98;
  int steps = 50;
  int level = 6;

  auto* density = app.add_subcommand("density", "CSV x,pdf of the q-Gaussian density on [-L, L]");
  add_q(density, c);
  density->add_option("--points", points, "uniform grid points")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  add_tolerances(density, c);
  add_output(density, c, true);

  auto* gamma = app.add_subcommand("gamma", "CSV x,gamma of the involution on [-L, L]");
  add_q(gamma, c);
  gamma->add_option("--points", points, "uniform grid points")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  add_tolerances(gamma, c);
  add_output(gamma, c, true);

  auto* wcoeff = app.add_subcommand("wcoeff", "CSV k,w_k1,contrib of the first w column");
  add_q(wcoeff, c);
  add_kmax(wcoeff, c, "highest index k (0: max(24, log tol / log q))");
  add_tolerances(wcoeff, c);
  add_output(wcoeff, c, true);

  auto* moment4 = app.add_subcommand("moment4", "JSON fourth-moment report at one q");
  add_q(moment4, c);
  add_kmax(moment4, c, "series cutoff K (0: max(24, log tol / log q))");
  moment4->add_option("--operator-level", operator_level,
                      "level cutoff of the operator cross-check (0 skips it)")
      ->envname("QFOCK_OPERATOR_LEVEL")
      ->check(CLI::Range(0, 16))
      ->capture_default_str();
  moment4->add_flag("--convergence", convergence, "recompute w on a doubled quadrature rule");
  add_tolerances(moment4, c);
  add_output(moment4, c, false);

  auto* sweep_cmd = app.add_subcommand("sweep", "CSV q,m4_sum,m4_gamma,s,margin,tail over a q grid");
  sweep_cmd->add_option("--qmin", qmin, "first q")->check(CLI::Range(kQMin, kQMax))->capture_default_str();
  sweep_cmd->add_option("--qmax", qmax, "last q")->check(CLI::Range(kQMin, kQMax))->capture_default_str();
  sweep_cmd->add_option("--steps", steps, "grid points, endpoints included")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  add_kmax(sweep_cmd, c, "series cutoff K (0: per-q default)");
  add_tolerances(sweep_cmd, c);
  add_output(sweep_cmd, c, true);

  auto* verify = app.add_subcommand("verify", "JSON report of the invariant suites; exit 0 iff all pass");
  add_q(verify, c);
  verify->add_option("--level", level, "Fock level cutoff N")
      ->check(CLI::Range(4, 8))
      ->capture_default_str();
  add_tolerances(verify, c);
  add_output(verify, c, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (density->parsed()) return cmd_density(c, points, out);
    if (gamma->parsed()) return cmd_gamma(c, points, out);
    if (wcoeff->parsed()) return cmd_wcoeff(c, out);
    if (moment4->parsed()) return cmd_moment4(c, operator_level, convergence, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(c, qmin, qmax, steps, out, err);
    if (verify->parsed()) return cmd_verify(c, level, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitConfig;
}

}  // namespace qfock::cli
