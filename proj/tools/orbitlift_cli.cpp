#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "orbitlift/catalog.hpp"
#include "orbitlift/error.hpp"
#include "orbitlift/hyperbolic.hpp"
#include "orbitlift/invariants.hpp"
#include "orbitlift/io.hpp"
#include "orbitlift/lifting.hpp"
#include "orbitlift/orbit_map.hpp"
#include "orbitlift/polar.hpp"
#include "orbitlift/tables.hpp"

namespace fs = std::filesystem;
using namespace orbitlift;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kMismatch = 2;

struct GroupArgs {
  std::string catalog;
  int n = 0;
  int dim = 0;
  std::string group_json;
  std::string system_json;
  int cap = 0;
};

struct GridArgs {
  std::string grid = "-1:1:201";
  int refine = 3;
};

struct TolArgs {
  double residual = 1e-8;
  double zero = 1e-10;
  double match = 1e-7;
  double newton = 1e-16;
  double reduction = 1e-7;
  double derivative = 1e-6;
};

void add_group_options(CLI::App* cmd, GroupArgs& g) {
  cmd->add_option("--catalog", g.catalog, "catalog family (Sn An Bn Dn I2n G2 H3 F4 H4 C2n C3n I3n T W H trivial)");
  cmd->add_option("--n", g.n, "family parameter");
  cmd->add_option("--dim", g.dim, "dimension for the trivial group");
  cmd->add_option("--group-json", g.group_json, "group specification file");
  cmd->add_option("--system-json", g.system_json, "use this generator system instead of generating one");
  cmd->add_option("--cap", g.cap, "degree cap for invariant generation");
}

void add_grid_options(CLI::App* cmd, GridArgs& g) {
  cmd->add_option("--grid", g.grid, "grid a:b:n");
  cmd->add_option("--refine", g.refine, "refinement levels for diagnostics")->check(CLI::NonNegativeNumber);
}

void add_tol_options(CLI::App* cmd, TolArgs& t) {
  cmd->add_option("--tol-residual", t.residual)->check(CLI::PositiveNumber);
  cmd->add_option("--tol-zero", t.zero)->check(CLI::PositiveNumber);
  cmd->add_option("--tol-match", t.match)->check(CLI::PositiveNumber);
  cmd->add_option("--tol-newton", t.newton)->check(CLI::PositiveNumber);
  cmd->add_option("--tol-reduction", t.reduction)->check(CLI::PositiveNumber);
  cmd->add_option("--tol-derivative", t.derivative)->check(CLI::PositiveNumber);
}

GroupSpec load_group(const GroupArgs& g) {
  if (!g.catalog.empty() && !g.group_json.empty()) fail(ErrorKind::bad_params, "give --catalog or --group-json, not both");
  if (!g.catalog.empty()) return catalog(g.catalog, {g.n, g.dim});
  if (!g.group_json.empty()) return group_spec_from_json(read_text(g.group_json));
  fail(ErrorKind::bad_params, "a group is required (--catalog or --group-json)");
}

InvariantSystem load_system(const FiniteGroup& group, const GroupArgs& g, std::uint64_t seed) {
  if (!g.system_json.empty()) {
    InvariantSystem s;
    s.field = {FieldKind::floating, 0};
    s.numeric = system_from_json(read_text(g.system_json));
    if (s.numeric.nvars != group.dimension()) fail(ErrorKind::bad_params, "system and group dimensions differ");
    for (std::size_t i = 0; i < s.numeric.size(); ++i)
      if (!is_invariant(group, s.numeric.generators[i], 1e-8))
        fail(ErrorKind::not_invariant, "generator " + std::to_string(i) + " is not invariant");
    return s;
  }
  InvariantOptions options;
  options.seed = seed;
  options.cap = g.cap;
  if (options.cap <= 0 && !g.catalog.empty()) options.cap = known_degree(g.catalog, g.n).value_or(0);
  if (options.cap <= 0 && group.order() == 1) options.cap = 1;
  if (options.cap <= 0) fail(ErrorKind::bad_params, "--cap is required for groups without a published degree");
  return generate_invariants(group, options);
}

std::vector<double> parse_grid(const std::string& text) {
  std::istringstream in(text);
  std::string a, b, n;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, n))
    fail(ErrorKind::bad_params, "grid must be a:b:n");
  double lo = 0.0, hi = 0.0;
  int count = 0;
  try {
    lo = std::stod(a);
    hi = std::stod(b);
    count = std::stoi(n);
  } catch (const std::logic_error&) {
    fail(ErrorKind::bad_params, "grid must be a:b:n");
  }
  if (count < 8) fail(ErrorKind::bad_params, "grid count must be at least 8");
  return uniform_grid(lo, hi, count);
}

LiftOptions lift_options(const TolArgs& t, const GridArgs& g, std::uint64_t seed, int k) {
  LiftOptions o;
  o.residual_tol = t.residual;
  o.zero_tol = t.zero;
  o.match_tol = t.match;
  o.newton_tol = t.newton;
  o.seed = seed;
  o.refinement_levels = g.refine;
  o.k = k;
  return o;
}

class Output {
 public:
  explicit Output(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  // Files go to the output directory; without one only `primary` is printed.
  void write(const std::string& name, const std::string& text, bool primary) const {
    if (!dir_.empty()) write_text_atomic(fs::path(dir_) / name, text);
    else if (primary) std::cout << text;
  }

 private:
  std::string dir_;
};

int compute_group_k(const FiniteGroup& group, int d, std::uint64_t seed) {
  return compute_k(group, irreducible_decomposition(group, 1e-8, seed), d, seed);
}

// ---------------------------------------------------------------------------

int cmd_invariants(const GroupArgs& g, std::uint64_t seed, const Output& out) {
  const GroupSpec spec = load_group(g);
  const FiniteGroup group = enumerate_group(spec);
  const InvariantSystem system = load_system(group, g, seed);
  std::string table = "degree,count\n";
  std::map<int, int> counts;
  for (int e : system.degrees()) ++counts[e];
  for (const auto& [e, c] : counts) table += std::to_string(e) + "," + std::to_string(c) + "\n";
  out.write("invariants.json", system_to_json(system), true);
  out.write("degrees.csv", table, false);
  std::cerr << group.name() << ": |G| = " << group.order() << ", d = " << system.d() << ", degrees";
  for (int e : system.degrees()) std::cerr << " " << e;
  std::cerr << "\n";
  return kOk;
}

int cmd_tables(std::uint64_t seed, const Output& out) {
  TableOptions options;
  options.seed = seed;
  const auto reflection = reflection_table(options);
  const auto rotation = rotation_table(options);
  out.write("reflection_groups.csv", table_csv(reflection), true);
  out.write("rotation_groups.csv", table_csv(rotation), true);
  bool error = false, mismatch = false;
  for (const auto* rows : {&reflection, &rotation})
    for (const auto& r : *rows) {
      if (r.mode == RowMode::documentation) continue;
      if (!r.error.empty()) {
        error = true;
        std::cerr << r.label() << ": " << r.error << "\n";
      } else if (!r.match) {
        mismatch = true;
        std::cerr << r.label() << ": computed (" << r.computed.d << ", " << r.computed.k << ", " << r.computed.order
                  << ") differs from the published values\n";
      }
    }
  if (error) return kError;
  return mismatch ? kMismatch : kOk;
}

int cmd_lift(const GroupArgs& g, const std::string& curve_json, const GridArgs& grid_args, const TolArgs& tol,
             std::uint64_t seed, const Output& out) {
  const GroupSpec spec = load_group(g);
  const FiniteGroup group = enumerate_group(spec);
  const InvariantSystem system = load_system(group, g, seed);
  const OrbitMap map(system.numeric);
  const CurveInput input = curve_from_json(read_text(curve_json), &map, fs::path(curve_json).parent_path());
  const auto grid = parse_grid(grid_args.grid);
  const int k = spec.table_entry ? spec.table_entry->k : compute_group_k(group, system.d(), seed);
  LiftResult result = lift_curve(group, map, input.curve, grid, lift_options(tol, grid_args, seed, k));
  for (const auto& w : input.warnings) result.diagnostics.warnings.insert(result.diagnostics.warnings.begin(), w);
  out.write("lift.csv", lift_csv(result), true);
  out.write("glue_log.json", glue_log_json(result), false);
  out.write("diagnostics.json", diagnostics_json(result), false);
  for (const auto& w : result.diagnostics.warnings) std::cerr << "warning: " << w << "\n";
  return kOk;
}

int cmd_verify(const GroupArgs& g, const std::string& curve_json, const std::string& lift_path, const TolArgs& tol,
               std::uint64_t seed, const Output& out) {
  const GroupSpec spec = load_group(g);
  const FiniteGroup group = enumerate_group(spec);
  const InvariantSystem system = load_system(group, g, seed);
  const OrbitMap map(system.numeric);
  const CurveInput input = curve_from_json(read_text(curve_json), &map, fs::path(curve_json).parent_path());
  const LiftTable table = lift_table_from_csv(read_text(lift_path));
  if (table.points.front().size() != group.dimension()) fail(ErrorKind::bad_params, "lift table has the wrong width");
  if (table.grid.front() < input.curve.start() - 1e-12 || table.grid.back() > input.curve.end() + 1e-12)
    fail(ErrorKind::bad_params, "lift grid leaves the curve domain");

  LiftResult lift;
  lift.grid = table.grid;
  lift.points = table.points;
  lift.derivatives = table.derivatives;
  lift.scale = curve_scale(input.curve, lift.grid);

  std::ostringstream report;
  report.precision(17);
  bool passed = true;
  double worst = 0.0, worst_t = lift.grid.front();
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < lift.grid.size(); ++i) {
    const double r = (map.eval(lift.points[i]) - input.curve.value(lift.grid[i])).cwiseAbs().maxCoeff() / lift.scale;
    if (r > worst) {
      worst = r;
      worst_t = lift.grid[i];
      worst_i = i;
    }
  }
  const bool residual_ok = worst <= tol.residual;
  passed = passed && residual_ok;
  report << "{\n  \"residual\": {\"max\": " << format_double(worst) << ", \"t\": " << format_double(worst_t)
         << ", \"index\": " << worst_i << ", \"passed\": " << (residual_ok ? "true" : "false") << "}";

  try {
    const ReductionPlan plan = build_reduction(group, irreducible_decomposition(group, 1e-8, seed), system.numeric, seed);
    const ReductionReport rr = reduction_check(plan, map, input.curve, lift, tol.reduction);
    passed = passed && rr.passed;
    report << ",\n  \"multiset\": {\"max_mismatch\": " << format_double(rr.max_mismatch)
           << ", \"t\": " << format_double(rr.worst_time) << ", \"passed\": " << (rr.passed ? "true" : "false") << "}";
  } catch (const Error& e) {
    passed = false;
    report << ",\n  \"multiset\": {\"error\": \"" << e.what() << "\", \"passed\": false}";
  }

  if (input.path) {
    double speed = 1.0, diff = 0.0, diff_t = lift.grid.front();
    for (double t : lift.grid) speed = std::max(speed, input.path->derivative(t).norm());
    for (std::size_t i = 0; i < lift.grid.size(); ++i) {
      const double d = std::abs(lift.derivatives[i].norm() - input.path->derivative(lift.grid[i]).norm());
      if (d > diff) {
        diff = d;
        diff_t = lift.grid[i];
      }
    }
    const bool ok = diff <= tol.derivative * speed;
    passed = passed && ok;
    report << ",\n  \"derivative_norm\": {\"max_difference\": " << format_double(diff)
           << ", \"t\": " << format_double(diff_t) << ", \"passed\": " << (ok ? "true" : "false") << "}";
  }
  report << ",\n  \"passed\": " << (passed ? "true" : "false") << "\n}\n";
  out.write("verify.json", report.str(), true);
  if (!residual_ok)
    std::cerr << "residual " << format_double(worst) << " at t = " << format_double(worst_t) << " (row " << worst_i
              << ")\n";
  return passed ? kOk : kMismatch;
}

int cmd_reduce(const GroupArgs& g, std::uint64_t seed, const Output& out) {
  const GroupSpec spec = load_group(g);
  const FiniteGroup group = enumerate_group(spec);
  const InvariantSystem system = load_system(group, g, seed);
  const ReductionPlan plan = build_reduction(group, irreducible_decomposition(group, 1e-8, seed), system.numeric, seed);
  out.write("reduction_plan.json", reduction_plan_json(plan), true);
  return kOk;
}

int cmd_polar_lift(const std::string& polar_json, const std::string& curve_json, const GridArgs& grid_args,
                   const TolArgs& tol, int cap, std::uint64_t seed, const Output& out) {
  const PolarSpec spec = polar_spec_from_json(read_text(polar_json), cap);
  const OrbitMap map(spec.system);
  const CurveInput input = curve_from_json(read_text(curve_json), &map, fs::path(curve_json).parent_path());
  const auto grid = parse_grid(grid_args.grid);
  const PolarLiftResult result = polar_lift(input.curve, spec, grid, lift_options(tol, grid_args, seed, 0));
  out.write("lift.csv", lift_csv(result.lift), true);
  out.write("glue_log.json", glue_log_json(result.lift), false);
  out.write("diagnostics.json", diagnostics_json(result.lift), false);
  std::ostringstream cert;
  cert << "{\n  \"weyl_order\": " << spec.weyl.order() << ",\n  \"max_orthogonality\": "
       << format_double(result.max_orthogonality) << ",\n  \"orthogonal\": " << (result.orthogonal ? "true" : "false")
       << "\n}\n";
  out.write("orthogonality.json", cert.str(), false);
  return result.orthogonal ? kOk : kMismatch;
}

int cmd_counterexamples(const Output& out) {
  const CounterexampleReport r = so2_counterexamples();
  std::ostringstream s;
  s << "{\n  \"max_residual\": " << format_double(r.max_residual) << ",\n  \"derivative_straight\": ["
    << format_double(r.derivative_straight(0)) << ", " << format_double(r.derivative_straight(1))
    << "],\n  \"derivative_turning\": [" << format_double(r.derivative_turning(0)) << ", "
    << format_double(r.derivative_turning(1)) << "],\n  \"pair_error\": " << format_double(r.pair_error)
    << ",\n  \"oscillation\": [";
  for (std::size_t i = 0; i < r.oscillation.size(); ++i) s << (i ? ", " : "") << format_double(r.oscillation[i]);
  s << "],\n  \"passed\": " << (r.passed() ? "true" : "false") << "\n}\n";
  out.write("counterexamples.json", s.str(), true);
  return r.passed() ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbit-space curve lifting for finite and polar representations"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  std::string out_dir;
  app.add_option("--seed", seed, "seed for randomized certificates")->capture_default_str();
  app.add_option("--out", out_dir, "output directory");

  GroupArgs group;
  GridArgs grid;
  TolArgs tol;
  std::string curve_json, lift_csv_path, polar_json;

  auto* inv = app.add_subcommand("invariants", "generate a minimal invariant system");
  add_group_options(inv, group);
  auto* tab = app.add_subcommand("tables", "recompute the (d, k, |G|) tables");
  auto* lift = app.add_subcommand("lift", "lift a curve in the orbit space");
  add_group_options(lift, group);
  add_grid_options(lift, grid);
  add_tol_options(lift, tol);
  lift->add_option("--curve-json", curve_json, "curve specification")->required();
  auto* ver = app.add_subcommand("verify", "check a lift table against its curve");
  add_group_options(ver, group);
  add_tol_options(ver, tol);
  ver->add_option("--curve-json", curve_json, "curve specification")->required();
  ver->add_option("--lift-csv", lift_csv_path, "lift table from the lift command")->required();
  auto* red = app.add_subcommand("reduce", "build the reduction to root tracking");
  add_group_options(red, group);
  auto* pol = app.add_subcommand("polar-lift", "lift through the section of a polar representation");
  pol->add_option("--polar-json", polar_json, "polar specification")->required();
  pol->add_option("--curve-json", curve_json, "curve specification")->required();
  pol->add_option("--cap", group.cap, "degree cap for a finite ambient group");
  add_grid_options(pol, grid);
  add_tol_options(pol, tol);
  auto* cex = app.add_subcommand("counterexamples", "evaluate the SO(2) counterexample lifts");

  for (auto* sub : {inv, tab, lift, ver, red, pol, cex}) {
    sub->add_option("--seed", seed, "seed for randomized certificates");
    sub->add_option("--out", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    const Output out(out_dir);
    if (*inv) return cmd_invariants(group, seed, out);
    if (*tab) return cmd_tables(seed, out);
    if (*lift) return cmd_lift(group, curve_json, grid, tol, seed, out);
    if (*ver) return cmd_verify(group, curve_json, lift_csv_path, tol, seed, out);
    if (*red) return cmd_reduce(group, seed, out);
    if (*pol) return cmd_polar_lift(polar_json, curve_json, grid, tol, group.cap, seed, out);
    if (*cex) return cmd_counterexamples(out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
