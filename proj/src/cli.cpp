#include "regcomp/cli.hpp"

#include <CLI11.hpp>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "regcomp/asymptotics.hpp"
#include "regcomp/csv.hpp"
#include "regcomp/errors.hpp"
#include "regcomp/exact_engine.hpp"
#include "regcomp/fit.hpp"
#include "regcomp/kernels.hpp"
#include "regcomp/montecarlo.hpp"
#include "regcomp/poisson_engine.hpp"
#include "regcomp/special_functions.hpp"

namespace regcomp::cli {
namespace {

using csv::number;

struct Common {
  std::string model = "gamma:theta=1";
  std::string out;
  std::uint64_t seed = 1;
  int threads = 1;
};

void add_common(CLI::App* sc, Common& c) {
  sc->add_option("--model", c.model, "gamma:theta=<t> | ewens:theta=<t> | geom | generic:<csv>")->capture_default_str();
  sc->add_option("--out", c.out, "output file (default: stdout)");
  sc->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sc->add_option("--threads", c.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

// Output stream for --out, falling back to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::invalid_argument("cannot open output file '" + path + "'");
      os_ = &file_;
    }
  }
  std::ostream& get() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

std::pair<std::int64_t, std::int64_t> parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("expected 'i,j', got '" + s + "'");
  return {std::stoll(s.substr(0, comma)), std::stoll(s.substr(comma + 1))};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Config values become option defaults, so explicit flags still win. A key
// "name" applies to every subcommand with --name, "sub.name" to one.
void apply_config(CLI::App& app, const std::map<std::string, std::string>& kv) {
  std::map<std::string, bool> used;
  for (const auto& [k, v] : kv) used[k] = false;
  for (CLI::App* sc : app.get_subcommands({})) {
    for (CLI::Option* opt : sc->get_options()) {
      const std::string name = opt->get_single_name();
      for (const std::string& key : {name, sc->get_name() + "." + name}) {
        const auto it = kv.find(key);
        if (it == kv.end()) continue;
        opt->default_str(it->second);
        opt->default_val(it->second);
        used[key] = true;
      }
    }
  }
  for (const auto& [k, u] : used)
    if (!u) throw std::invalid_argument("config: unknown key '" + k + "'");
}

// ---------------------------------------------------------------- exact

struct ExactArgs {
  std::int64_t nmax = 1000;
  std::string target = "all";
  std::int64_t pmf = 0;
  std::int64_t first_part = 0;
  std::string cross;
};

int cmd_exact(const Common& c, const ExactArgs& a, std::ostream& out) {
  const auto model = SubordinatorModel::parse(c.model);
  Sink sink(c.out, out);
  csv::Writer w(sink.get());
  if (a.pmf > 0) {
    const auto p = parts_pmf(model, a.pmf);
    w.header({"k", "prob"});
    for (std::size_t k = 0; k < p.probs.size(); ++k) w.row({number(static_cast<std::int64_t>(k)), number(p.probs[k])});
    return kExitOk;
  }
  if (a.first_part > 0) {
    const auto law = first_part_law(model, a.first_part);
    w.header({"r", "weight"});
    for (std::size_t r = 0; r < law.weights.size(); ++r)
      w.row({number(static_cast<std::int64_t>(r + 1)), number(law.weights[r])});
    return kExitOk;
  }
  if (!a.cross.empty()) {
    const auto [i, j] = parse_pair(a.cross);
    const auto cm = cross_moments(model, a.nmax, i, j);
    w.header({"n", "mean_i", "mean_j", "cross", "cov"});
    for (std::int64_t n = 1; n <= a.nmax; ++n) {
      const auto k = static_cast<std::size_t>(n);
      w.row({number(n), number(cm.mean_i[k]), number(cm.mean_j[k]), number(cm.cross[k]),
             number(cm.cross[k] - cm.mean_i[k] * cm.mean_j[k])});
    }
    return kExitOk;
  }
  const auto tab = moments_pattern(model, a.nmax, PatternSpec::parse(a.target));
  w.header({"n", "mean", "variance"});
  for (std::int64_t n = 1; n <= a.nmax; ++n)
    w.row({number(n), number(tab.mean[static_cast<std::size_t>(n)]), number(tab.variance(n))});
  return kExitOk;
}

// ---------------------------------------------------------------- poisson

struct PoissonArgs {
  std::string pattern = "all";
  int orders = 1;
  double lambda = 0.0;
  double grid_ratio = 1.05;
  double rho0 = 1e-3;
  double rho_max = 1e3;
  bool meander = false;
};

int cmd_poisson(const Common& c, const PoissonArgs& a, std::ostream& out) {
  const auto model = SubordinatorModel::parse(c.model);
  SolverOptions opt;
  opt.meander = a.meander;
  const auto grid = RhoGrid::spanning(a.rho0, a.grid_ratio, a.rho_max);
  const auto curves = solve_orders(model, PatternSpec::parse(a.pattern), a.orders, grid, a.lambda, opt);
  Sink sink(c.out, out);
  csv::Writer w(sink.get());
  std::vector<std::string> head{"rho"};
  for (int m = 1; m <= a.orders; ++m) head.push_back("f" + std::to_string(m));
  w.header(head);
  for (std::int64_t k = 0; k < grid.count; ++k) {
    std::vector<double> row{grid.at(k)};
    for (const auto& cv : curves) row.push_back(cv.values[static_cast<std::size_t>(k)]);
    w.row(row);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- asym

struct AsymArgs {
  int rmax = 3;
  std::string format = "text";
};

int cmd_asym(const Common& c, const AsymArgs& a, std::ostream& out) {
  const auto model = SubordinatorModel::parse(c.model);
  std::vector<std::pair<std::string, double>> q;
  for (int j = 1; j <= 4; ++j) q.emplace_back("m" + std::to_string(j), model.log_moment(j));
  q.emplace_back("c", model.c());
  const auto me = mean_expansion(model);
  q.emplace_back("mean_L2", me.coefficient(2));
  q.emplace_back("mean_L1", me.coefficient(1));
  q.emplace_back("variance_L3", variance_leading(model));
  for (int r = 1; r <= a.rmax; ++r) {
    const auto sp = small_part_expansion(model, r);
    const auto cu = cumulative_small_parts(model, r);
    const std::string s = std::to_string(r);
    q.emplace_back("small_mean_L1_r" + s, sp.mean.coefficient(1));
    q.emplace_back("small_d1_r" + s, sp.d1);
    q.emplace_back("small_var_L1_r" + s, sp.var_leading);
    q.emplace_back("cumulative_mean_L1_r" + s, cu.mean_leading);
    q.emplace_back("cumulative_var_L1_r" + s, cu.var_leading);
  }
  const auto cov = covariance_prediction(model, a.rmax);
  for (int i = 0; i < a.rmax; ++i)
    for (int j = i; j < a.rmax; ++j)
      q.emplace_back("cov_L1_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), cov(i, j));

  Sink sink(c.out, out);
  auto& os = sink.get();
  if (a.format == "csv") {
    csv::Writer w(os);
    w.header({"quantity", "value"});
    for (const auto& [k, v] : q) w.row({k, number(v)});
    return kExitOk;
  }
  os << "model " << model.name() << '\n';
  os << "log-moments      m1 = " << number(q[0].second) << "  m2 = " << number(q[1].second) << '\n';
  os << "                 m3 = " << number(q[2].second) << "  m4 = " << number(q[3].second) << '\n';
  os << "constant         c = " << number(model.c()) << '\n';
  os << "mean             " << number(me.coefficient(2)) << " L^2 " << (me.coefficient(1) < 0 ? "- " : "+ ") << number(std::abs(me.coefficient(1))) << " L + O(1)\n";
  os << "variance         " << number(variance_leading(model)) << " L^3 + O(L^2)\n";
  for (int r = 1; r <= a.rmax; ++r) {
    const auto sp = small_part_expansion(model, r);
    const auto cu = cumulative_small_parts(model, r);
    os << "parts of size " << r << "  mean " << number(sp.mean.coefficient(1)) << " L " << (sp.d1 < 0 ? "- " : "+ ") << number(std::abs(sp.d1))
       << ", variance " << number(sp.var_leading) << " L; sizes <= " << r << ": mean " << number(cu.mean_leading)
       << " L, variance " << number(cu.var_leading) << " L\n";
  }
  os << "covariance / L (sizes 1.." << a.rmax << ")\n";
  for (int i = 0; i < a.rmax; ++i) {
    os << "  ";
    for (int j = 0; j < a.rmax; ++j) os << (j ? " " : "") << number(cov(i, j));
    os << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- mc

struct McArgs {
  std::int64_t n = 1000;
  std::int64_t reps = 10000;
  int rmax = 3;
  std::string zscores;
};

int cmd_mc(const Common& c, const McArgs& a, std::ostream& out) {
  const auto model = SubordinatorModel::parse(c.model);
  SimulationOptions opt;
  opt.threads = c.threads;
  const auto s = simulate(model, a.n, a.reps, c.seed, a.rmax, opt);
  Sink sink(c.out, out);
  csv::Writer w(sink.get());
  std::vector<std::string> head{"n", "reps", "seed", "mean_K", "var_K", "ks", "skewness", "min_K", "max_K",
                                "weight_violations"};
  std::vector<std::string> row{number(s.n),        number(s.reps),     number(static_cast<double>(c.seed)),
                               number(s.mean_K),   number(s.var_K),    number(s.ks_statistic),
                               number(s.skewness), number(s.min_K),    number(s.max_K),
                               number(s.weight_identity_violations)};
  for (int r = 0; r < a.rmax; ++r) {
    head.push_back("mean_K" + std::to_string(r + 1));
    row.push_back(number(s.small_part_means[static_cast<std::size_t>(r)]));
  }
  for (int r = 0; r < a.rmax; ++r)
    for (int q = r; q < a.rmax; ++q) {
      head.push_back("cov_" + std::to_string(r + 1) + "_" + std::to_string(q + 1));
      row.push_back(number(s.small_part_cov(r, q)));
    }
  w.header(head);
  w.row(row);
  if (!a.zscores.empty()) {
    std::ofstream zf(a.zscores, std::ios::binary | std::ios::trunc);
    if (!zf) throw std::invalid_argument("cannot open '" + a.zscores + "'");
    csv::Writer zw(zf);
    zw.header({"z"});
    for (double z : s.z_scores) zw.row(std::vector<double>{z});
  }
  return kExitOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string quantity = "mean";
  std::string target = "all";
  int degree = -1;
  double window_lo = std::exp(6.0);
  double window_hi = 2e4;
  bool fix_linear = false;
};

int cmd_fit(const Common& c, const FitArgs& a, std::ostream& out) {
  const auto model = SubordinatorModel::parse(c.model);
  const auto pattern = PatternSpec::parse(a.target);
  if (a.quantity != "mean" && a.quantity != "variance")
    throw std::invalid_argument("--quantity must be 'mean' or 'variance'");
  const bool small = !pattern.is_all();
  const int degree = a.degree >= 0 ? a.degree : (a.quantity == "variance" ? (small ? 1 : 3) : (small ? 1 : 2));
  const auto nmax = static_cast<std::int64_t>(std::ceil(a.window_hi));
  const auto tab = moments_pattern(model, nmax, pattern);
  std::vector<double> v = tab.mean;
  if (a.quantity == "variance")
    for (std::int64_t n = 0; n <= nmax; ++n) v[static_cast<std::size_t>(n)] = tab.variance(n);

  std::map<int, double> fixed;
  double predicted = NAN;
  if (a.quantity == "mean" && !small) {
    const auto me = mean_expansion(model);
    predicted = me.coefficient(2);
    if (a.fix_linear) fixed[1] = me.coefficient(1);
  } else if (a.quantity == "variance" && !small) {
    predicted = variance_leading(model);
  } else if (pattern.is_single()) {
    const auto sp = small_part_expansion(model, pattern.single_value());
    predicted = a.quantity == "mean" ? sp.mean.coefficient(1) : sp.var_leading;
  }
  if (a.fix_linear && fixed.empty()) throw std::invalid_argument("--fix-linear applies to the all-parts mean only");
  const auto f = fit_log_polynomial(v, degree, a.window_lo, a.window_hi, fixed);

  Sink sink(c.out, out);
  csv::Writer w(sink.get());
  w.header({"quantity", "value"});
  for (int k = degree; k >= 0; --k) w.row({"a" + std::to_string(k), number(f.coefficient(k))});
  w.row({"predicted_leading", number(predicted)});
  w.row({"residual_rms", number(f.residual_rms)});
  w.row({"condition_number", number(f.condition_number)});
  w.row({"points", number(f.points)});
  w.row({"window_lo", number(f.window_lo)});
  w.row({"window_hi", number(f.window_hi)});
  return kExitOk;
}

// ---------------------------------------------------------------- oscillate

struct OscArgs {
  double l_min = 10.0;
  double l_max = 14.0;
  int points = 50;
  int kmax = 5;
};

int cmd_oscillate(const Common& c, const OscArgs& a, std::ostream& out) {
  const auto model = SubordinatorModel::parse(c.model);
  if (a.points < 2 || !(a.l_max > a.l_min)) throw std::invalid_argument("need --points >= 2 and --L-max > --L-min");
  Sink sink(c.out, out);
  csv::Writer w(sink.get());
  w.header({"L", "phi_L", "phihat_minus_linear"});
  for (int i = 0; i < a.points; ++i) {
    const double L = a.l_min + (a.l_max - a.l_min) * i / (a.points - 1);
    w.row(std::vector<double>{L, oscillation_phi(L, a.kmax), model.poisson_laplace(std::exp(L)) - L - model.c()});
  }
  return kExitOk;
}

// ---------------------------------------------------------------- validate

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

std::vector<Check> run_validation(const SubordinatorModel& model, std::uint64_t seed) {
  std::vector<Check> checks;
  {
    double worst = 0.0;
    RowStream rows(model, 2000);
    for (std::int64_t n = 1; n <= 2000; ++n) {
      rows.row(n);
      const double phi = model.laplace_exponent(static_cast<double>(n));
      worst = std::max(worst, std::abs(rows.row_sum() / phi - 1.0));
    }
    checks.push_back({"row_sum_identity", worst < 1e-9, "max relative error " + number(worst) + " for n <= 2000"});
  }
  {
    double worst = 0.0;
    const auto mom = moments_multi(model, 8, {PatternSpec::all(), PatternSpec::single(1), PatternSpec::single(2)});
    for (std::int64_t n = 1; n <= 8; ++n) {
      const auto comps = enumerate_compositions(model, n);
      const auto pmf = parts_pmf(model, n);
      std::vector<double> p(static_cast<std::size_t>(n + 1), 0.0);
      double e = 0.0, e2 = 0.0, e1 = 0.0, e12 = 0.0;
      for (const auto& cp : comps) {
        const auto k = static_cast<double>(cp.parts.size());
        p[cp.parts.size()] += cp.probability;
        e += cp.probability * k;
        e2 += cp.probability * k * k;
        const auto ones = static_cast<double>(std::count(cp.parts.begin(), cp.parts.end(), 1));
        const auto twos = static_cast<double>(std::count(cp.parts.begin(), cp.parts.end(), 2));
        e1 += cp.probability * ones;
        e12 += cp.probability * ones * twos;
      }
      const auto un = static_cast<std::size_t>(n);
      for (std::size_t k = 0; k < p.size(); ++k) worst = std::max(worst, std::abs(p[k] - pmf.probs[k]));
      worst = std::max({worst, std::abs(e - mom[0].mean[un]), std::abs(e2 - mom[0].second_moment[un]),
                        std::abs(e1 - mom[1].mean[un]), std::abs(e12 - cross_moment(model, n, 1, 2)[un])});
    }
    checks.push_back({"enumeration_oracle", worst < 1e-10, "max abs deviation " + number(worst) + " for n <= 8"});
  }
  {
    const auto tab = moments_all_parts(model, 2000);
    const auto grid = RhoGrid::spanning(1e-3, 1.05, 1e3);
    const auto curve = solve_recursion(model, PatternSpec::all(), 1, grid, 0.0);
    double worst = 0.0;
    for (std::int64_t k = 0; k < grid.count; ++k) {
      const double rho = grid.at(k);
      if (rho < 10.0) continue;
      worst = std::max(worst, std::abs(curve.values[static_cast<std::size_t>(k)] / poissonise(tab, rho) - 1.0));
    }
    checks.push_back({"poissonise_vs_solver", worst < 1e-4, "max relative gap " + number(worst) + " on [10, 1000]"});
  }
  {
    const auto rep = model.check_conditions(16);
    checks.push_back({"condition_report", true,
                      std::string("L ") + (rep.holds_L ? "holds" : "fails") + ", R " + (rep.holds_R ? "holds" : "fails") +
                          ", fitted c " + number(rep.fitted_c)});
  }
  {
    const std::int64_t n = 5;
    const std::int64_t reps = 200000;
    const auto comps = enumerate_compositions(model, n);
    double worst = 0.0;
    for (std::int64_t table_max : {std::int64_t{512}, std::int64_t{1}}) {
      SamplerOptions so;
      so.table_max = table_max;
      const CompositionSampler sampler(model, so);
      std::map<std::vector<std::int64_t>, std::int64_t> freq;
      for (std::int64_t i = 0; i < reps; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        ++freq[sampler.sample(n, rng).parts];
      }
      for (const auto& cp : comps) {
        const double p = cp.probability;
        const double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
        const double emp = static_cast<double>(freq[cp.parts]) / static_cast<double>(reps);
        worst = std::max(worst, sd > 0.0 ? std::abs(emp - p) / sd : 0.0);
      }
    }
    checks.push_back({"sampler_exactness", worst < 5.0, "max |z| " + number(worst) + " over compositions of 5"});
  }
  return checks;
}

int cmd_validate(const Common& c, std::ostream& out) {
  const auto model = SubordinatorModel::parse(c.model);
  const auto checks = run_validation(model, c.seed);
  Sink sink(c.out, out);
  csv::Writer w(sink.get());
  w.header({"check", "status", "detail"});
  bool all = true;
  for (const auto& ch : checks) {
    w.row({ch.name, ch.ok ? "PASS" : "FAIL", ch.detail});
    all = all && ch.ok;
  }
  return all ? kExitOk : kExitNumeric;
}

}  // namespace

int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regenerative composition structures: exact laws, Poisson recursions, asymptotics and simulation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config;
  std::string isa;
  app.add_option("--config", config, "key=value file; values act as defaults below explicit flags");
  app.add_option("--isa", isa, "vector kernels: scalar | avx2 | neon (default: best available)");

  std::array<Common, 7> common;  // one per subcommand so per-command defaults stay separate
  ExactArgs ea;
  PoissonArgs pa;
  AsymArgs aa;
  McArgs ma;
  FitArgs fa;
  OscArgs oa;

  auto* exact = app.add_subcommand("exact", "exact moment tables, part-count pmf, first-part law, cross moments");
  add_common(exact, common[0]);
  exact->add_option("--nmax", ea.nmax, "largest n")->capture_default_str()->check(CLI::PositiveNumber);
  exact->add_option("--target", ea.target, "pattern: all | r | lo..hi | lo.. | odd | {a,b,...}")->capture_default_str();
  exact->add_option("--pmf", ea.pmf, "emit P(K_n = k) for this n instead");
  exact->add_option("--first-part", ea.first_part, "emit the first-part law for this n instead");
  exact->add_option("--cross", ea.cross, "emit E K_{n,i} K_{n,j} for 'i,j' instead");

  auto* poisson = app.add_subcommand("poisson", "solve the poissonised moment recursions on a geometric rho grid");
  add_common(poisson, common[1]);
  poisson->add_option("--pattern", pa.pattern, "pattern of counted part sizes")->capture_default_str();
  poisson->add_option("--orders", pa.orders, "factorial-moment orders 1..m")->capture_default_str()->check(CLI::Range(1, 8));
  poisson->add_option("--lambda", pa.lambda, "killing rate of the split recursion")->capture_default_str();
  poisson->add_option("--grid-ratio", pa.grid_ratio, "rho_{k+1}/rho_k")->capture_default_str();
  poisson->add_option("--rho0", pa.rho0, "first grid point (<= 1e-3)")->capture_default_str();
  poisson->add_option("--rho-max", pa.rho_max, "last grid point")->capture_default_str();
  poisson->add_flag("--meander", pa.meander, "count the killed remainder as a gap");

  auto* asym = app.add_subcommand("asym", "asymptotic coefficient report");
  add_common(asym, common[2]);
  asym->add_option("--rmax", aa.rmax, "largest small part size")->capture_default_str()->check(CLI::Range(1, 100));
  asym->add_option("--format", aa.format, "text | csv")->capture_default_str()->check(CLI::IsMember({"text", "csv"}));

  auto* mc = app.add_subcommand("mc", "Monte Carlo simulation of C_n");
  add_common(mc, common[3]);
  mc->add_option("--n", ma.n, "composition size")->capture_default_str()->check(CLI::PositiveNumber);
  mc->add_option("--reps", ma.reps, "replicates (>= 100)")->capture_default_str();
  mc->add_option("--rmax", ma.rmax, "small part sizes tracked")->capture_default_str()->check(CLI::Range(1, 100));
  mc->add_option("--zscores", ma.zscores, "also write normalized K_n to this CSV");

  auto* fit = app.add_subcommand("fit", "least-squares fit of exact tables against powers of log n");
  add_common(fit, common[4]);
  fit->add_option("--quantity", fa.quantity, "mean | variance")->capture_default_str();
  fit->add_option("--target", fa.target, "pattern; a single size r fits K_{n,r}")->capture_default_str();
  fit->add_option("--degree", fa.degree, "polynomial degree (default: 2 mean, 3 variance, 1 for small parts)");
  fit->add_option("--window-lo", fa.window_lo, "smallest n in the fit")->capture_default_str();
  fit->add_option("--window-hi", fa.window_hi, "largest n in the fit (also the table size)")->capture_default_str();
  fit->add_flag("--fix-linear", fa.fix_linear, "hold the L coefficient at its predicted value");

  auto* osc = app.add_subcommand("oscillate", "oscillation of the Poisson transform against L");
  add_common(osc, common[5]);
  osc->add_option("--L-min", oa.l_min, "first L")->capture_default_str();
  osc->add_option("--L-max", oa.l_max, "last L")->capture_default_str();
  osc->add_option("--points", oa.points, "number of L values")->capture_default_str();
  osc->add_option("--kmax", oa.kmax, "Fourier terms")->capture_default_str()->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "identity, enumeration, cross-route and sampler checks");
  add_common(validate, common[6]);

  // oscillate is about the geometric-atom model unless told otherwise.
  osc->get_option("--model")->default_val("geom");

  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--config") apply_config(app, read_config(args[i + 1]));
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (!isa.empty()) {
      if (isa == "scalar") simd::set_active_isa(simd::Isa::Scalar);
      else if (isa == "avx2") simd::set_active_isa(simd::Isa::Avx2);
      else if (isa == "neon") simd::set_active_isa(simd::Isa::Neon);
      else throw std::invalid_argument("unknown --isa '" + isa + "'");
    }
    if (exact->parsed()) return cmd_exact(common[0], ea, out);
    if (poisson->parsed()) return cmd_poisson(common[1], pa, out);
    if (asym->parsed()) return cmd_asym(common[2], aa, out);
    if (mc->parsed()) return cmd_mc(common[3], ma, out);
    if (fit->parsed()) return cmd_fit(common[4], fa, out);
    if (osc->parsed()) return cmd_oscillate(common[5], oa, out);
    if (validate->parsed()) return cmd_validate(common[6], out);
  } catch (const AccuracyError& e) {
    err << "accuracy failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const StabilityError& e) {
    err << "stability failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {  // DomainError, RangeError: arguments outside the supported range
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_subcommand(args, std::cout, std::cerr);
}

}  // namespace regcomp::cli
