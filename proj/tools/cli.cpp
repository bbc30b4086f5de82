#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>

#include "qslimit/bounds.hpp"
#include "qslimit/constants.hpp"
#include "qslimit/errors.hpp"
#include "qslimit/io.hpp"
#include "qslimit/metrics.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/montecarlo.hpp"
#include "qslimit/transform.hpp"

namespace qsl::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

StartLaw parse_start(const std::string& text) {
  if (text.rfind("file:", 0) == 0) return StartLaw::grid(io::real_grid_from_csv(io::read_text(text.substr(5))));
  return StartLaw::parse(text);
}

double parse_scale(const std::string& text) {
  if (text == "sigma") return constants().sigma();
  return io::parse_double(text);
}

void print_table(std::ostream& out, const std::vector<BoundReport>& reports) {
  std::size_t width = 4;
  for (const auto& r : reports) width = std::max(width, r.name.size());
  for (const auto& r : reports) {
    std::string line = r.name + std::string(width - r.name.size() + 2, ' ');
    std::string value = io::format_double(r.value);
    line += value + std::string(value.size() < 24 ? 24 - value.size() : 1, ' ');
    line += r.valid ? "valid" : "INVALID";
    if (!r.route.empty()) line += "  route=" + r.route;
    if (!r.reason.empty()) line += "  (" + r.reason + ")";
    out << line << "\n";
  }
}

int certificate_exit(const std::vector<BoundReport>& reports, bool allow_invalid) {
  if (allow_invalid) return kOk;
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.valid; }) ? kOk
                                                                                                 : kInvalidCertificate;
}

struct GridFlags {
  double x_lo = kDefaultDensityGrid.lo;
  double x_hi = kDefaultDensityGrid.hi;
  Eigen::Index x_points = kDefaultDensityGrid.points;
  double t_max = kDefaultCfGrid.hi;
  Eigen::Index t_points = kDefaultCfGrid.points;
  double lambda_max = kDefaultMgfGrid.hi;
  Eigen::Index lambda_points = kDefaultMgfGrid.points;

  void attach(CLI::App* cmd) {
    cmd->add_option("--x-lo", x_lo, "Density grid lower end")->capture_default_str();
    cmd->add_option("--x-hi", x_hi, "Density grid upper end")->capture_default_str();
    cmd->add_option("--x-points", x_points, "Density grid points")->capture_default_str()->check(CLI::Range(2, 1 << 24));
    cmd->add_option("--t-max", t_max, "Characteristic function grid end")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--t-points", t_points, "Characteristic function grid points")
        ->capture_default_str()
        ->check(CLI::Range(2, 1 << 24));
    cmd->add_option("--lambda-max", lambda_max, "MGF grid half width")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-points", lambda_points, "MGF grid points")->capture_default_str()->check(CLI::Range(3, 1 << 20));
  }

  IterationOptions options(int moment_order) const {
    if (!(x_lo < x_hi)) throw ContractViolation("--x-lo must be below --x-hi");
    IterationOptions o;
    o.density_grid = {x_lo, x_hi, x_points};
    o.cf_grid = {0.0, t_max, t_points};
    o.mgf_grid = {-lambda_max, lambda_max, lambda_points};
    o.moment_order = moment_order;
    return o;
  }
};

// ---------------------------------------------------------------- iterate

struct IterateArgs {
  std::string start = "delta0";
  int n = 0;
  std::vector<std::string> reprs;
  std::string out = ".";
  int moment_order = kDefaultMomentOrder;
  bool allow_invalid = false;
  GridFlags grids;
};

int cmd_iterate(const IterateArgs& a, std::ostream& out) {
  const StartLaw start = parse_start(a.start);
  std::set<Representation> reprs;
  for (const auto& r : a.reprs.empty() ? std::vector<std::string>{"density"} : a.reprs)
    reprs.insert(representation_from_string(r));
  const IterationOptions options = a.grids.options(a.moment_order);
  const IterationState state = iterate(start, a.n, reprs, options);

  const fs::path dir(a.out);
  io::write_iteration_state(dir, state, options);
  if (state.density) io::write_text(dir / "cdf.csv", io::grid_to_csv(density_to_cdf(*state.density)));

  std::vector<BoundReport> cert;
  if (state.density || state.cf) cert = iterate_certificate(a.n, start.variance());
  if (state.mgf) {
    const double L = std::min(-state.mgf->lo(), state.mgf->hi());
    for (double lambda : {-0.5 * L, 0.5 * L})
      cert.push_back(mgf_conv_error(a.n, lambda, start.variance(), mgf_KL(L, lambda < 0.0), L));
  }
  io::write_text(dir / "certificate.json", io::bounds_to_json(cert).dump(2) + "\n");

  out << "n = " << a.n << ", start = " << start.describe() << ", output in " << dir.string() << "\n";
  if (state.density)
    out << "density: mass " << fmt(state.density->integral()) << ", tol_mass " << fmt(state.density->tol_mass())
        << ", slack " << fmt(state.density->slack()) << "\n";
  if (state.cf) out << "cf: tol " << fmt(state.cf->tol_mass()) << ", slack " << fmt(state.cf->slack()) << "\n";
  if (state.mgf) out << "mgf: relative slack " << fmt(state.mgf->slack()) << "\n";
  if (state.moments) {
    out << "moments:";
    for (double m : state.moments->values) out << " " << fmt(m);
    out << "\n";
  }
  if (!cert.empty()) {
    out << "certificate:\n";
    print_table(out, cert);
  }
  return certificate_exit(cert, a.allow_invalid);
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  std::vector<std::string> formulas;
  int n = 100;
  std::string A = "sigma";
  double p = 3.5;
  double y = 0.0;
  double t = 2.0;
  double lambda = 0.0;
  double gamma = 0.5;
  double var_z0 = 0.0;
  double L = 0.42;
  std::optional<double> K;
  bool reproduce = false;
  bool json_out = false;
  bool allow_invalid = false;
};

BoundReport single(std::string name, double value, std::map<std::string, double> inputs, std::string route = {}) {
  return {std::move(name), value, std::move(inputs), true, "", std::move(route)};
}

std::vector<BoundReport> evaluate_formula(const std::string& f, const BoundsArgs& a) {
  const double A = parse_scale(a.A);
  const double nd = a.n;
  if (f == "fn1") return {density_sup_error(a.n, A, a.p).fn1};
  if (f == "fn2") return {density_sup_error(a.n, A, a.p).fn2};
  if (f == "fn3") return {density_sup_error(a.n, A, a.p).fn3};
  if (f == "density") {
    const auto d = density_sup_error(a.n, A, a.p);
    return {d.fn1, d.fn2, d.fn3, d.best};
  }
  if (f == "fn1a" || f == "tv") return {tv_error(a.n, A)};
  if (f == "cp") {
    const CpValue c = cp_ladder(a.p);
    return {single("cp", c.value, {{"p", a.p}}, c.route)};
  }
  if (f == "cf_log") return {cf_log_bound(a.t)};
  if (f == "tail") return {tail_upper(a.y)};
  if (f == "mgf_lower") return {mgf_lower(a.lambda, a.gamma)};
  if (f == "mgf_conv") {
    const double K = a.K.value_or(mgf_KL(a.L, a.lambda < 0.0));
    return {mgf_conv_error(a.n, a.lambda, a.var_z0, K, a.L)};
  }
  if (f == "ymgf") return {single("ymgf_upper", ymgf_upper(a.lambda, true), {{"lambda", a.lambda}})};
  if (f == "KL") return {single("K_L", mgf_KL(a.L, a.lambda < 0.0), {{"L", a.L}})};
  if (f == "certificate") return iterate_certificate(a.n, a.var_z0);
  if (f == "constants") {
    const Constants& c = constants();
    return {single("sigma2", c.sigma2, {}), single("eta", c.eta, {}), single("rho", c.rho, {}),
            single("L0", c.L0, {}), single("p0", c.p0, {}), single("tail_threshold", tail_threshold(), {})};
  }
  if (f == "rates") {
    const int p = static_cast<int>(a.p);
    const LowerRates r = lower_rates(p);
    std::vector<BoundReport> out{single("dp_upper_rate", dp_upper_rate(a.p, 1e-9), {{"p", a.p}}),
                                 single("dp_lower_rate", r.dp_rate, {{"p", double(p)}}),
                                 single("d2_lower_rate", r.d2_rate_sup, {{"p", double(p)}}),
                                 single("ks_lower_rate", r.ks_rate_sup, {{"p", double(p)}})};
    if (r.rp) out.push_back(single("r_p", *r.rp, {{"p", double(p)}, {"q", *r.q}}));
    return out;
  }
  (void)nd;
  throw ContractViolation("unknown formula '" + f +
                          "' (fn1, fn2, fn3, density, fn1a, cp, cf_log, tail, mgf_lower, mgf_conv, ymgf, KL, "
                          "certificate, constants, rates)");
}

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  std::vector<BoundReport> reports;
  if (a.reproduce) {
    const double A = constants().sigma();
    reports.push_back(density_sup_error(100, A).fn2);
    for (int n : {177, 180, 200}) reports.push_back(density_sup_error(n, A).fn3);
  }
  for (const auto& f : a.formulas) {
    auto r = evaluate_formula(f, a);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (reports.empty()) throw ContractViolation("bounds: give --formula or --reproduce-paper");
  if (a.json_out)
    out << io::bounds_to_json(reports).dump(2) << "\n";
  else
    print_table(out, reports);
  return certificate_exit(reports, a.allow_invalid);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string kind = "xn";
  std::int64_t n = 0;
  int depth = 0;
  std::string start = "delta0";
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::string reference;
  std::optional<double> time_budget;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const SampleKind kind = sample_kind_from_string(a.kind);
  const StartLaw start = parse_start(a.start);
  BatchOptions opts;
  if (a.time_budget) opts.time_budget = std::chrono::duration<double>(*a.time_budget);
  const std::int64_t parameter = kind == SampleKind::Zn ? a.depth : a.n;
  const SampleBatch batch = generate_batch(kind, parameter, start, a.count, a.seed, opts);
  const BatchSummary s = summarize(batch.values);

  out << "kind " << to_string(kind) << (kind == SampleKind::Zn ? ", depth " : ", n ") << parameter << ", seed "
      << a.seed << "\n";
  out << "count " << s.count << " of " << a.count << " requested\n";
  out << "mean " << io::format_double(s.mean) << " +- " << fmt(s.mean_se) << "\n";
  out << "variance " << io::format_double(s.variance) << " +- " << fmt(s.variance_se) << "\n";
  if (!batch.values.empty())
    out << "min " << io::format_double(batch.values.front()) << ", max " << io::format_double(batch.values.back())
        << "\n";
  if (!a.reference.empty()) {
    const RealGrid ref = io::real_grid_from_csv(io::read_text(a.reference));
    const RealGrid ref_cdf = ref.kind() == GridKind::cdf ? ref : density_to_cdf(ref);
    const RealGrid emp = empirical_cdf(batch, {ref_cdf.lo(), ref_cdf.hi(), ref_cdf.size()});
    out << "ks_vs_reference " << fmt(ks_distance(emp, ref_cdf)) << "\n";
  }
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    fs::create_directories(dir);
    io::write_text(dir / "samples.csv", io::batch_to_csv(batch));
    json side = io::batch_sidecar(batch);
    side["summary"] = {{"mean", s.mean}, {"variance", s.variance}, {"mean_se", s.mean_se}, {"variance_se", s.variance_se}};
    io::write_text(dir / "samples.json", side.dump(2) + "\n");
  }
  if (batch.values.size() < a.count) {
    out << "time budget exhausted after " << batch.values.size() << " draws\n";
    return kResource;
  }
  return kOk;
}

// ---------------------------------------------------------------- distance

struct DistanceArgs {
  std::string first;
  std::string second;
  std::string metric = "w2";
  std::size_t quantile_points = kDefaultQuantilePoints;
  bool json_out = false;
};

int cmd_distance(const DistanceArgs& a, std::ostream& out) {
  const RealGrid f = io::real_grid_from_csv(io::read_text(a.first));
  const RealGrid g = io::real_grid_from_csv(io::read_text(a.second));
  auto as_cdf = [](const RealGrid& h) { return h.kind() == GridKind::cdf ? h : density_to_cdf(h); };
  auto quantiles = [&](const RealGrid& h) {
    return h.kind() == GridKind::cdf ? quantiles_from_cdf(h, a.quantile_points)
                                     : quantiles_from_density(h, a.quantile_points);
  };
  double value = 0.0;
  double slack = f.slack() + g.slack();
  if (a.metric == "w1" || a.metric == "w2") {
    value = wasserstein_p(quantiles(f), quantiles(g), a.metric == "w1" ? 1.0 : 2.0);
  } else if (a.metric == "ks") {
    value = ks_distance(as_cdf(f), as_cdf(g));
    slack = f.tol_mass() + g.tol_mass();
  } else if (a.metric == "tv") {
    value = tv_distance(f, g);
    slack += f.tol_mass() + g.tol_mass();
  } else if (a.metric == "sup") {
    value = sup_distance(f, g);
  } else {
    throw ContractViolation("unknown metric '" + a.metric + "' (w1, w2, ks, tv, sup)");
  }
  if (a.json_out)
    out << json{{"metric", a.metric}, {"value", value}, {"slack", slack}}.dump(2) << "\n";
  else
    out << a.metric << " " << io::format_double(value) << " slack " << fmt(slack) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- moments

struct MomentsArgs {
  int order = kDefaultMomentOrder;
  std::optional<std::string> start;
  int n = 0;
  bool json_out = false;
};

int cmd_moments(const MomentsArgs& a, std::ostream& out) {
  const MomentVector m = a.start ? iterate_moments(moments_of(parse_start(*a.start), a.order), a.n)
                                 : limit_moments(a.order);
  if (a.json_out) {
    out << io::moments_to_json(m).dump(2) << "\n";
    return kOk;
  }
  out << "origin " << m.origin << ", iteration " << m.iteration << "\n";
  for (std::size_t j = 0; j < m.values.size(); ++j) out << j << "  " << io::format_double(m.values[j]) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Limiting Quicksort distribution: operator iteration, error bounds and simulation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  IterateArgs it;
  auto* c_it = app.add_subcommand("iterate", "Iterate the fixed-point operator from a start law");
  c_it->add_option("--start", it.start, "delta0 | normal:<var> | uniform:<lo>:<hi> | file:<density.csv>")
      ->capture_default_str();
  c_it->add_option("--n", it.n, "Number of steps")->required()->check(CLI::NonNegativeNumber);
  c_it->add_option("--repr", it.reprs, "density | cf | mgf | moments (repeatable)");
  c_it->add_option("--out", it.out, "Output directory")->capture_default_str();
  c_it->add_option("--moment-order", it.moment_order, "Highest moment")->capture_default_str()->check(CLI::Range(1, 40));
  c_it->add_flag("--allow-invalid", it.allow_invalid, "Exit 0 even when a certificate is invalid");
  it.grids.attach(c_it);

  BoundsArgs bd;
  auto* c_bd = app.add_subcommand("bounds", "Evaluate explicit error bounds and constants");
  c_bd->add_option("--formula", bd.formulas, "Formula name (repeatable)");
  c_bd->add_option("--n", bd.n, "Iteration count")->capture_default_str();
  c_bd->add_option("--A", bd.A, "Scale (Var Z0 + sigma^2)^(1/2), or 'sigma'")->capture_default_str();
  c_bd->add_option("--p", bd.p, "Decay order / moment order")->capture_default_str();
  c_bd->add_option("--y", bd.y, "Tail point");
  c_bd->add_option("--t", bd.t, "Frequency");
  c_bd->add_option("--lambda", bd.lambda, "MGF argument");
  c_bd->add_option("--gamma", bd.gamma, "Lower-bound MGF constant")->capture_default_str();
  c_bd->add_option("--var-z0", bd.var_z0, "Variance of the start law")->capture_default_str();
  c_bd->add_option("--L", bd.L, "MGF window half width")->capture_default_str();
  c_bd->add_option("--K", bd.K, "Override K_L");
  c_bd->add_flag("--reproduce-paper", bd.reproduce, "fn2 at n=100 and fn3 at n=177, 180, 200 with A = sigma");
  c_bd->add_flag("--json", bd.json_out, "Print JSON instead of a table");
  c_bd->add_flag("--allow-invalid", bd.allow_invalid, "Exit 0 even when a report is invalid");

  SimulateArgs sm;
  auto* c_sm = app.add_subcommand("simulate", "Monte-Carlo batches of X_n, Y_n or Z_depth");
  c_sm->add_option("--kind", sm.kind, "xn | yn | zn")->capture_default_str();
  c_sm->add_option("--n", sm.n, "Input size for xn / yn")->check(CLI::NonNegativeNumber);
  c_sm->add_option("--depth", sm.depth, "Tree depth for zn")->check(CLI::NonNegativeNumber);
  c_sm->add_option("--start", sm.start, "Start law for zn")->capture_default_str();
  c_sm->add_option("--count", sm.count, "Number of draws")->capture_default_str();
  c_sm->add_option("--seed", sm.seed, "Seed")->capture_default_str();
  c_sm->add_option("--out", sm.out, "Directory for samples.csv and samples.json");
  c_sm->add_option("--reference", sm.reference, "Density or CDF csv for a KS comparison");
  c_sm->add_option("--time-budget", sm.time_budget, "Seconds; completed chunks are kept");

  DistanceArgs ds;
  auto* c_ds = app.add_subcommand("distance", "Distance between two serialized grids");
  c_ds->add_option("first", ds.first, "Grid csv")->required()->check(CLI::ExistingFile);
  c_ds->add_option("second", ds.second, "Grid csv")->required()->check(CLI::ExistingFile);
  c_ds->add_option("--metric", ds.metric, "w1 | w2 | ks | tv | sup")->capture_default_str();
  c_ds->add_option("--quantile-points", ds.quantile_points, "Probability grid size for w1 / w2")
      ->capture_default_str()
      ->check(CLI::Range(64, 100000000));
  c_ds->add_flag("--json", ds.json_out, "Print JSON");

  MomentsArgs mo;
  auto* c_mo = app.add_subcommand("moments", "Moments of the limit law or of an iterate");
  c_mo->add_option("--order", mo.order, "Highest moment")->capture_default_str()->check(CLI::Range(1, 40));
  c_mo->add_option("--start", mo.start, "Start law; without it the limit moments are printed");
  c_mo->add_option("--n", mo.n, "Steps from the start law")->capture_default_str()->check(CLI::NonNegativeNumber);
  c_mo->add_flag("--json", mo.json_out, "Print JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (c_it->parsed()) return cmd_iterate(it, out);
    if (c_bd->parsed()) return cmd_bounds(bd, out);
    if (c_sm->parsed()) {
      if (sm.kind == "zn" && !c_sm->count("--depth")) throw ContractViolation("simulate: zn needs --depth");
      if (sm.kind != "zn" && !c_sm->count("--n")) throw ContractViolation("simulate: " + sm.kind + " needs --n");
      return cmd_simulate(sm, out);
    }
    if (c_ds->parsed()) return cmd_distance(ds, out);
    if (c_mo->parsed()) return cmd_moments(mo, out);
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return kResource;
  } catch (const TruncationError& e) {
    err << "truncation error: " << e.what() << "\n";
    return kResource;
  } catch (const UnsupportedRepresentation& e) {
    err << "unsupported representation: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "file error: " << e.what() << "\n";
    return kResource;
  } catch (const std::bad_alloc&) {
    err << "resource error: out of memory\n";
    return kResource;
  }
  return kUsage;
}

}  // namespace qsl::cli
