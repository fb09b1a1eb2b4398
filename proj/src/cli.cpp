#include "superbroadcast/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <regex>
#include <sstream>

#include "superbroadcast/analysis.hpp"
#include "superbroadcast/oracle.hpp"
#include "superbroadcast/thresholds.hpp"

namespace superbroadcast::cli {

std::vector<int> IntRange::values() const {
  std::vector<int> v;
  for (int x = first; x <= last; x += step) v.push_back(x);
  return v;
}

IntRange parse_range(const std::string& text) {
  static const std::regex pattern(R"(\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*(?::\s*(\d+)\s*)?)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern))
    throw std::invalid_argument("expected a range A..B or A..B:STEP, got '" + text + "'");
  IntRange r{std::stoi(m[1]), std::stoi(m[2]), m[3].matched ? std::stoi(m[3]) : 1};
  if (r.step < 1) throw std::invalid_argument("range step must be positive in '" + text + "'");
  if (r.last < r.first) throw std::invalid_argument("empty range '" + text + "'");
  return r;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

std::string cap_sentinel(int cap) { return "≥" + std::to_string(cap); }

struct Config {
  int n = 0;
  int m = 0;
  std::string m_range;
  std::string n_range;
  double r = 0.5;
  double r_min = 0.0;
  double r_max = 1.0;
  int steps = 101;
  double tol = 1e-6;
  std::uint64_t cap = 0;
  std::uint64_t seed = 1;
  std::string out;
  bool inject_fault = false;
};

void check_purity_window(const Config& c) {
  require(c.r_min >= 0.0 && c.r_min < c.r_max && c.r_max <= 1.0,
          "need 0 <= --r-min < --r-max <= 1");
  require(c.steps >= 2, "--steps must be at least 2");
}

double grid_point(const Config& c, int i) {
  if (i == c.steps - 1) return c.r_max;
  return c.r_min + (c.r_max - c.r_min) * i / (c.steps - 1);
}

std::vector<int> output_counts(const Config& c) {
  if (!c.m_range.empty()) return parse_range(c.m_range).values();
  require(c.m >= 1, "--m or --m-range is required");
  return {c.m};
}

// -- commands ---------------------------------------------------------------

void cmd_scaling(const Config& c, std::ostream& os) {
  require(c.n >= 1, "--n must be at least 1");
  check_purity_window(c);
  const auto ms = output_counts(c);
  for (int m : ms) require(m >= 1, "output counts must be positive");
  os << "n,m,r,r_prime,p\n";
  for (int m : ms) {
    const auto scaling = OptimalScaling::build(c.n, m, c.cap);
    for (int i = 0; i < c.steps; ++i) {
      const double r = grid_point(c, i);
      os << c.n << ',' << m << ',' << format_number(r) << ',' << format_number(scaling.r_prime(r)) << ','
         << format_number(scaling.p(r)) << '\n';
    }
  }
}

void cmd_figure2(const Config& c, std::ostream& os) {
  check_purity_window(c);
  const auto left = parse_range(c.n_range.empty() ? "10..100:10" : c.n_range).values();
  const int right_n = c.n >= 1 ? c.n : 5;
  const auto right = parse_range(c.m_range.empty() ? "5..9" : c.m_range).values();
  for (int n : left) require(n >= 1, "input counts must be positive");
  for (int m : right) require(m >= 1, "output counts must be positive");

  os << "panel,n,m,r,p\n";
  auto emit = [&](const char* panel, int n, int m) {
    const auto scaling = OptimalScaling::build(n, m, c.cap);
    for (int i = 0; i < c.steps; ++i) {
      const double r = grid_point(c, i);
      os << panel << ',' << n << ',' << m << ',' << format_number(r) << ',' << format_number(scaling.p(r))
         << '\n';
    }
  };
  for (int n : left) emit("adjacent", n, n + 1);
  for (int m : right) emit("fixed_n", right_n, m);
}

void cmd_threshold(const Config& c, std::ostream& os) {
  require(c.n >= 1, "--n must be at least 1");
  require(c.tol >= 1e-10, "--tol must be at least 1e-10");
  const auto ms = output_counts(c);
  for (int m : ms) require(m > c.n, "threshold needs M > N");
  os << "n,m,r_star\n";
  for (int m : ms) {
    const auto t = r_star(c.n, m, {c.tol, c.cap});
    os << c.n << ',' << m << ',' << (t.r_star ? format_number(*t.r_star) : "none") << '\n';
  }
}

void cmd_mstar(const Config& c, std::ostream& os) {
  require(c.n >= 1, "--n must be at least 1");
  require(c.cap > static_cast<std::uint64_t>(c.n) && c.cap <= 100000, "--cap must exceed N");
  require(c.tol >= 1e-10, "--tol must be at least 1e-10");
  const auto ms = m_star(c.n, static_cast<int>(c.cap), {c.tol, ThresholdOptions{}.exhaustive_limit});
  os << "n,m_star\n" << c.n << ',';
  if (ms.at_least_cap)
    os << cap_sentinel(ms.cap);
  else if (ms.m_star)
    os << *ms.m_star;
  else
    os << "none";
  os << '\n';
}

void cmd_figure3(const Config& c, std::ostream& os) {
  require(c.tol >= 1e-10, "--tol must be at least 1e-10");
  require(c.cap >= 2 && c.cap <= 100000, "--cap out of range");
  const auto ns = parse_range(c.n_range.empty() ? "4..100" : c.n_range).values();
  const int cap = static_cast<int>(c.cap);
  for (int n : ns) require(n >= 1 && n < cap, "input counts must lie in 1..cap-1");

  const ThresholdOptions opts{c.tol, ThresholdOptions{}.exhaustive_limit};
  os << "n,gap_adjacent,gap_maximal,m_star\n";
  for (int n : ns) {
    const auto adjacent = r_star(n, n + 1, opts);
    const auto ms = m_star(n, cap, opts);
    std::optional<ThresholdResult> maximal;
    std::string m_label = "none";
    if (ms.at_least_cap) {
      maximal = r_star_limit(n, c.tol);
      m_label = cap_sentinel(cap);
    } else if (ms.m_star) {
      maximal = r_star(n, *ms.m_star, opts);
      m_label = std::to_string(*ms.m_star);
    }
    auto gap = [](const std::optional<double>& r) { return r ? format_number(1.0 - *r) : std::string("none"); };
    os << n << ',' << gap(adjacent.r_star) << ',' << (maximal ? gap(maximal->r_star) : "none") << ','
       << m_label << '\n';
  }
}

void cmd_optimal_map(const Config& c, std::ostream& os) {
  require(c.n >= 1 && c.m >= 1, "--n and --m must be positive");
  require(c.r > 0.0 && c.r <= 1.0, "--r must lie in (0, 1]");
  const auto res = optimal_map(c.n, c.m, c.r, {c.cap});
  os << "n,m,r,l,phi,big_phi,r_prime,p,exhaustive,matches_conjecture\n";
  const auto spins = spin_range(c.n);
  const std::string agree =
      res.matches_conjecture ? (*res.matches_conjecture ? "yes" : "no") : "unchecked";
  for (std::size_t i = 0; i < spins.size(); ++i)
    os << c.n << ',' << c.m << ',' << format_number(c.r) << ',' << spins[i] << ',' << res.map.phi[i] << ','
       << res.map.big_phi[i] << ',' << format_number(res.report.r_prime) << ','
       << format_number(res.report.p) << ',' << (res.exhaustive ? "yes" : "no") << ',' << agree << '\n';
}

// -- verify -----------------------------------------------------------------

class Checklist {
public:
  explicit Checklist(std::ostream& os) : os_(os) {}

  void check(const std::string& name, bool ok, const std::string& detail) {
    os_ << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    if (!ok) ++failures_;
  }
  void note(const std::string& text) { os_ << "NOTE " << text << '\n'; }
  int failures() const { return failures_; }

private:
  std::ostream& os_;
  int failures_ = 0;
};

std::string dev(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return std::string("max deviation ") + buf;
}

constexpr std::uint64_t kVerifyEnumerationLimit = 200000;
constexpr int kOracleAllMapsQubits = 8;
constexpr int kOracleQubits = 10;

int cmd_verify(const Config& c, std::ostream& os) {
  require(c.n >= 1 && c.m >= 1, "--n and --m must be positive");
  Checklist list(os);
  const int n = c.n, m = c.m;
  os << "verify N=" << n << " M=" << m << " seed=" << c.seed << '\n';

  const BigInt count = extremal_count(n, m);
  const bool enumerable = count <= BigInt(std::to_string(kVerifyEnumerationLimit));

  // trace preservation of every extremal map, in floating point and exactly
  {
    std::vector<ExtremalMap> maps =
        enumerable ? enumerate_extremal(n, m, kVerifyEnumerationLimit)
                   : std::vector<ExtremalMap>{conjectured_optimal_map(n, m)};
    std::string first_violation;
    double worst = 0.0;
    bool exact_ok = true;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      ChannelCoeffs coeffs = coefficients_for(maps[i]);
      if (c.inject_fault && i == 0) {
        for (auto& e : coeffs.entries())
          if (e.value != 0.0) {
            e.value *= 2.0;
            break;
          }
      }
      const auto rep = validate_trace_preserving(coeffs);
      for (const auto& r : rep.residuals) worst = std::max(worst, r.residual);
      if (!rep.ok() && first_violation.empty()) first_violation = rep.violations.front() + " in " + maps[i].str();
      const auto coeffs_exact = exact_coefficients(maps[i]);
      for (const auto& sum : exact_trace_sums(n, m, coeffs_exact)) exact_ok = exact_ok && sum == 1;
    }
    list.check("trace-preservation", first_violation.empty() && exact_ok,
               first_violation.empty() ? std::to_string(maps.size()) + " maps, " + dev(worst)
                                       : first_violation);
  }

  // exhaustive optimum against the conjectured map
  if (enumerable) {
    bool agree = true;
    std::string detail = "argmax equals phi(l)=M/2, Phi(l)=|l-M/2| at r=0.1,0.5,0.9";
    for (double r : {0.1, 0.5, 0.9}) {
      const auto res = optimal_map(n, m, r, {kVerifyEnumerationLimit});
      if (!res.matches_conjecture.value_or(false)) {
        agree = false;
        detail = "argmax " + res.map.str() + " at r=" + format_number(r);
        break;
      }
    }
    list.check("optimal-map", agree, detail);
  } else {
    list.note("optimal-map skipped: " + count.get_str() + " extremal maps");
  }

  // dense oracle
  if (n + m <= kOracleQubits) {
    std::mt19937_64 rng(c.seed);
    VerifyOptions vo;
    vo.seed = c.seed;
    vo.axes = {{0.0, 0.0, 1.0}, random_axis(rng), random_axis(rng)};
    const CoupledBasis basis(n, m);
    std::vector<ExtremalMap> maps;
    if (n + m <= kOracleAllMapsQubits && enumerable)
      maps = enumerate_extremal(n, m, kVerifyEnumerationLimit);
    else
      maps.push_back(conjectured_optimal_map(n, m));

    ClosedFormReport worst;
    for (const auto& map : maps) {
      auto rep = verify_closed_form(basis, map, vo);
      if (c.inject_fault && &map == &maps.front()) {
        auto coeffs = coefficients_for(map);
        for (auto& e : coeffs.entries())
          if (e.value != 0.0) {
            e.value *= 2.0;
            break;
          }
        const DenseOperator s = basis.choi(coeffs);
        rep.trace_deviation = max_abs(trace_out(s, basis.dim_in()) -
                                      DenseOperator::Identity(basis.dim_in(), basis.dim_in()));
      }
      worst.max_deviation = std::max(worst.max_deviation, rep.max_deviation);
      worst.max_perpendicular = std::max(worst.max_perpendicular, rep.max_perpendicular);
      worst.axis_spread = std::max(worst.axis_spread, rep.axis_spread);
      worst.covariance_deviation = std::max(worst.covariance_deviation, rep.covariance_deviation);
      worst.permutation_deviation = std::max(worst.permutation_deviation, rep.permutation_deviation);
      worst.trace_deviation = std::max(worst.trace_deviation, rep.trace_deviation);
      worst.output_trace_deviation = std::max(worst.output_trace_deviation, rep.output_trace_deviation);
      worst.min_eigenvalue = std::min(worst.min_eigenvalue, rep.min_eigenvalue);
    }
    const std::string scope = std::to_string(maps.size()) + (maps.size() == 1 ? " map, " : " maps, ");
    list.check("oracle closed-form r'", worst.max_deviation < 1e-9 && worst.max_perpendicular < 1e-9,
               scope + dev(std::max(worst.max_deviation, worst.max_perpendicular)));
    list.check("oracle axis independence", worst.axis_spread < 1e-10, scope + dev(worst.axis_spread));
    list.check("oracle covariance", worst.covariance_deviation < 1e-9, scope + dev(worst.covariance_deviation));
    list.check("oracle permutation invariance", worst.permutation_deviation < 1e-9,
               scope + dev(worst.permutation_deviation));
    list.check("oracle choi trace-preservation", worst.trace_deviation < kPsdTolerance,
               scope + dev(worst.trace_deviation));
    list.check("oracle choi positivity", worst.min_eigenvalue >= -kPsdTolerance,
               scope + "min eigenvalue " + format_number(worst.min_eigenvalue));
    list.check("oracle output normalization", worst.output_trace_deviation < 1e-10,
               scope + dev(worst.output_trace_deviation));
  } else {
    list.note("dense oracle skipped: N+M=" + std::to_string(n + m) + " exceeds " + std::to_string(kOracleQubits));
  }

  {
    const double d = partial_trace_identity_deviation(6);
    list.check("partial-trace identity (j<=3)", d < 1e-12, dev(d));
  }
  if (m <= 6) {
    const double d = permutation_trace_identity_deviation(m);
    list.check("permutation-trace identity (M=" + std::to_string(m) + ")", d < 1e-12, dev(d));
  }

  if (n == 1 && m >= 2) {
    const auto scaling = OptimalScaling::build(n, m, kVerifyEnumerationLimit);
    double worst = 0.0;
    for (int k = 1; k <= 19; ++k) worst = std::max(worst, scaling.p(0.05 * k));
    const bool ok = worst < 1.0 - 1e-6;
    list.check("no-broadcasting", ok, "max p(r) on r=0.05..0.95 is " + format_number(worst));
    if (ok) os << "no-broadcasting confirmed\n";
  }

  os << (list.failures() == 0 ? "all checks passed\n" : std::to_string(list.failures()) + " check(s) failed\n");
  return list.failures() == 0 ? kSuccess : kVerificationFailed;
}

// -- plumbing -----------------------------------------------------------------

void write_atomically(const std::string& path, const std::string& body) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write " + path);
    f << body;
    if (!f.flush()) throw UsageError("cannot write " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw UsageError("cannot write " + path);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal universal broadcasting of mixed qubit states"};
  app.name("superbroadcast");
  app.require_subcommand(1);

  Config c;
  std::vector<CLI::Option*> cap_options;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "write the result to PATH instead of stdout");
  };
  auto add_n = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--n", c.n, "number of input copies N");
    if (required) o->required();
  };
  auto add_window = [&](CLI::App* sub) {
    sub->add_option("--r-min", c.r_min, "smallest input purity")->capture_default_str();
    sub->add_option("--r-max", c.r_max, "largest input purity")->capture_default_str();
    sub->add_option("--steps", c.steps, "grid points")->capture_default_str();
  };

  auto* scaling = app.add_subcommand("scaling", "p(r) of the optimal map on a purity grid");
  add_n(scaling, true);
  scaling->add_option("--m", c.m, "number of output copies M");
  scaling->add_option("--m-range", c.m_range, "output counts A..B[:STEP]");
  add_window(scaling);
  cap_options.push_back(scaling->add_option("--cap", c.cap, "largest enumeration searched exhaustively (default 5000)"));
  add_common(scaling);

  auto* threshold = app.add_subcommand("threshold", "superbroadcasting threshold r*(N,M)");
  add_n(threshold, true);
  threshold->add_option("--m", c.m, "number of output copies M");
  threshold->add_option("--m-range", c.m_range, "output counts A..B[:STEP]");
  threshold->add_option("--tol", c.tol, "bisection tolerance")->capture_default_str();
  cap_options.push_back(threshold->add_option("--cap", c.cap, "largest enumeration searched exhaustively (default 5000)"));
  add_common(threshold);

  auto* mstar = app.add_subcommand("mstar", "largest output count M*(N) with superbroadcasting");
  add_n(mstar, true);
  cap_options.push_back(mstar->add_option("--cap", c.cap, "largest M examined (default 200)"));
  mstar->add_option("--tol", c.tol, "bisection tolerance")->capture_default_str();
  add_common(mstar);

  auto* optimal = app.add_subcommand("optimal-map", "exhaustive optimal extremal map");
  add_n(optimal, true);
  optimal->add_option("--m", c.m, "number of output copies M")->required();
  optimal->add_option("--r", c.r, "input purity")->capture_default_str();
  cap_options.push_back(optimal->add_option("--cap", c.cap, "enumeration cap (default 10000000)"));
  add_common(optimal);

  auto* figure2 = app.add_subcommand("figure2", "p(r) curves for M=N+1 and for fixed N");
  figure2->add_option("--n-range", c.n_range, "N values of the M=N+1 panel (default 10..100:10)");
  add_n(figure2, false);
  figure2->add_option("--m-range", c.m_range, "M values of the fixed-N panel (default 5..9)");
  add_window(figure2);
  cap_options.push_back(figure2->add_option("--cap", c.cap, "largest enumeration searched exhaustively (default 5000)"));
  add_common(figure2);

  auto* figure3 = app.add_subcommand("figure3", "1 - r*(N,N+1) and 1 - r*(N,M*(N)) versus N");
  figure3->add_option("--n-range", c.n_range, "input counts (default 4..100)");
  figure3->add_option("--tol", c.tol, "bisection tolerance (default 1e-10)");
  cap_options.push_back(figure3->add_option("--cap", c.cap, "largest M examined (default 200)"));
  add_common(figure3);

  auto* verify = app.add_subcommand("verify", "cross-check closed forms against the dense oracle");
  add_n(verify, true);
  verify->add_option("--m", c.m, "number of output copies M")->required();
  verify->add_option("--seed", c.seed, "seed for random unitaries and axes")->capture_default_str();
  verify->add_flag("--inject-fault", c.inject_fault, "corrupt one channel coefficient (test hook)");
  add_common(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidArguments;
  }

  const bool tol_given = figure3->count("--tol") > 0;
  const bool cap_given = std::any_of(cap_options.begin(), cap_options.end(),
                                     [](const CLI::Option* o) { return o->count() > 0; });

  std::ostringstream body;
  int code = kSuccess;
  try {
    if (scaling->parsed()) {
      if (!cap_given) c.cap = 5000;
      cmd_scaling(c, body);
    } else if (threshold->parsed()) {
      if (!cap_given) c.cap = ThresholdOptions{}.exhaustive_limit;
      cmd_threshold(c, body);
    } else if (mstar->parsed()) {
      if (!cap_given) c.cap = kDefaultMStarCap;
      cmd_mstar(c, body);
    } else if (optimal->parsed()) {
      if (!cap_given) c.cap = kDefaultEnumerationCap;
      require(c.cap >= 1, "--cap must be positive");
      cmd_optimal_map(c, body);
    } else if (figure2->parsed()) {
      if (!cap_given) c.cap = 5000;
      cmd_figure2(c, body);
    } else if (figure3->parsed()) {
      if (!cap_given) c.cap = kDefaultMStarCap;
      if (!tol_given) c.tol = 1e-10;
      cmd_figure3(c, body);
    } else if (verify->parsed()) {
      code = cmd_verify(c, body);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const SearchSpaceTooLarge& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const ResourceLimit& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }

  if (c.out.empty()) {
    out << body.str();
  } else {
    try {
      write_atomically(c.out, body.str());
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      return kInvalidArguments;
    }
  }
  return code;
}

}  // namespace superbroadcast::cli
