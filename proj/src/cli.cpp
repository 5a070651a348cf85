#include "deflab/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "deflab/curve.hpp"
#include "deflab/deficiency.hpp"
#include "deflab/io.hpp"
#include "deflab/morphism.hpp"
#include "deflab/witness.hpp"

namespace deflab {

namespace {

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path);
  if (!file) throw ValidationError("cannot write " + out_path);
  file << text;
}

BinaryExperiment as_binary(const Experiment& e) {
  if (e.size() != 2)
    throw ValidationError("this command needs an experiment with exactly two states");
  return BinaryExperiment(e.densities[0], e.densities[1]);
}

std::string curve_tsv(const BinaryExperiment& e, double tmin, double tmax,
                      int steps) {
  BinaryExperiment en = normalize_support(e);
  std::vector<double> bps = breakpoints(en);
  ExtremalTs ext = extremal_ts(en);
  if (tmax <= tmin) tmax = ext.tmax_finite ? ext.tmax : 10.0 * (bps.back() + 1.0);
  if (tmax <= tmin) tmax = tmin + 1.0;

  std::ostringstream os;
  os << "# breakpoints";
  for (double b : bps) os << "\t" << format_tsv(b);
  os << "\n# t1\t" << format_tsv(ext.t1);
  os << "\n# tmax\t" << format_tsv(ext.tmax_finite
                                       ? ext.tmax
                                       : std::numeric_limits<double>::infinity());
  os << "\n# columns\tt\tf\n";
  for (int i = 0; i < steps; ++i) {
    double t = steps == 1 ? tmin
                          : tmin + (tmax - tmin) * static_cast<double>(i) / (steps - 1);
    os << format_tsv(t) << "\t" << format_tsv(f_value(en, t)) << "\n";
  }
  return os.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"deflab: compare binary quantum statistical experiments"};
  app.require_subcommand(1);

  std::string out_path;
  unsigned seed = 1234;
  app.add_option("--seed", seed, "seed for solver restarts")->capture_default_str();

  // curve
  auto* curve = app.add_subcommand("curve", "tabulate the testing curve f(t)");
  std::string curve_file;
  double tmin = 0.0, tmax = -1.0;
  int steps = 200;
  curve->add_option("experiment", curve_file, "experiment JSON file")->required();
  curve->add_option("--tmin", tmin, "left end of the t range");
  curve->add_option("--tmax", tmax, "right end of the t range (default: curve span)");
  curve->add_option("--steps", steps, "number of rows");
  curve->add_option("--out", out_path, "write to file instead of stdout");

  // compare
  auto* compare = app.add_subcommand("compare", "testing-order deficiency index");
  std::string cmp_e, cmp_f;
  double cmp_eps = -1.0;
  int grid_points = 512;
  bool keep_samples = false;
  compare->add_option("E", cmp_e, "first experiment JSON file")->required();
  compare->add_option("F", cmp_f, "second experiment JSON file")->required();
  compare->add_option("--eps", cmp_eps, "deficiency level to check against");
  compare->add_option("--grid", grid_points, "grid points for the search");
  compare->add_flag("--samples", keep_samples, "include the sampled curves");
  compare->add_option("--out", out_path, "write to file instead of stdout");

  // witness
  auto* witness = app.add_subcommand("witness", "three-point tangent witness");
  std::string wit_file;
  double s1 = 0.0, s2 = 0.0;
  witness->add_option("experiment", wit_file, "experiment JSON file")->required();
  witness->add_option("s1", s1, "first tangency point")->required();
  witness->add_option("s2", s2, "second tangency point")->required();
  witness->add_option("--out", out_path, "write to file instead of stdout");

  // separate
  auto* separate = app.add_subcommand(
      "separate", "testing-order domination versus exact simulation");
  std::string sep_file;
  double sep_s1 = -1.0, sep_s2 = -1.0;
  separate->add_option("experiment", sep_file, "experiment JSON file")->required();
  separate->add_option("--s1", sep_s1, "first tangency point (default: heuristic)");
  separate->add_option("--s2", sep_s2, "second tangency point (default: heuristic)");
  separate->add_option("--out", out_path, "write to file instead of stdout");

  // extend
  auto* extend = app.add_subcommand("extend", "completely positive extension");
  std::string ext_e, ext_f;
  extend->add_option("E", ext_e, "source experiment JSON file")->required();
  extend->add_option("F", ext_f, "target experiment JSON file")->required();
  extend->add_option("--out", out_path, "write to file instead of stdout");

  // reduce
  auto* reduce = app.add_subcommand("reduce", "classical form of an abelian experiment");
  std::string red_file;
  double abelian_tol = tol::breakpoint;
  reduce->add_option("experiment", red_file, "experiment JSON file")->required();
  reduce->add_option("--tol", abelian_tol, "commutator tolerance");
  reduce->add_option("--out", out_path, "write to file instead of stdout");

  // bayes
  auto* bayes = app.add_subcommand("bayes", "minimal summed Bayes risk");
  std::string bay_e, bay_w;
  bayes->add_option("experiment", bay_e, "experiment JSON file")->required();
  bayes->add_option("loss", bay_w, "loss JSON file")->required();
  bayes->add_option("--out", out_path, "write to file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "argument error: " << e.what() << "\n";
    return exit_code::parse;
  }

  try {
    if (curve->parsed()) {
      if (steps < 1) throw ValidationError("--steps must be at least 1");
      BinaryExperiment e = as_binary(load_experiment(curve_file));
      emit(curve_tsv(e, tmin, tmax, steps), out_path, out);
    } else if (compare->parsed()) {
      BinaryExperiment e = as_binary(load_experiment(cmp_e));
      BinaryExperiment f = as_binary(load_experiment(cmp_f));
      DeficiencyOptions opts;
      opts.grid_points = grid_points;
      DeficiencyReport r = two_deficiency_index(e, f, opts);
      std::optional<double> eps;
      if (cmp_eps >= 0.0) eps = cmp_eps;
      emit(json_to_string(report_to_json(r, eps, keep_samples)), out_path, out);
    } else if (witness->parsed()) {
      BinaryExperiment e = as_binary(load_experiment(wit_file));
      WitnessConstruction w = tangent_witness(e, s1, s2);
      emit(json_to_string(witness_to_json(w)), out_path, out);
    } else if (separate->parsed()) {
      BinaryExperiment e = as_binary(load_experiment(sep_file));
      std::optional<double> os1, os2;
      if (sep_s1 >= 0.0) os1 = sep_s1;
      if (sep_s2 >= 0.0) os2 = sep_s2;
      MatchPovmOptions opts;
      opts.seed = seed;
      SeparationReport r = separation_demo(e, os1, os2, opts);
      emit(json_to_string(separation_to_json(
               r, r.construction.s1, r.construction.s2)),
           out_path, out);
      if (!r.matching.converged) return exit_code::solver;
    } else if (extend->parsed()) {
      BinaryExperiment e = normalize_support(as_binary(load_experiment(ext_e)));
      BinaryExperiment f = normalize_support(as_binary(load_experiment(ext_f)));
      DeficiencyReport dr = two_deficiency_index(e, f);
      CpExtensionData x = cp_extension(e, f);
      emit(json_to_string(extension_to_json(x, dr.epsilon)), out_path, out);
    } else if (reduce->parsed()) {
      Experiment e = load_experiment(red_file);
      ClassicalReduction r = classical_reduction(e, abelian_tol);
      emit(json_to_string(reduction_to_json(r)), out_path, out);
    } else if (bayes->parsed()) {
      Experiment e = load_experiment(bay_e);
      LossFunction w = load_loss(bay_w);
      Json doc;
      doc["version"] = 1;
      doc["parameters"] = w.parameters();
      doc["decisions"] = w.decisions();
      doc["value"] = bayes_risk(e, w);
      emit(json_to_string(doc), out_path, out);
    }
  } catch (const DeficiencyPreconditionError& e) {
    err << "deficiency precondition: " << e.what() << "\n";
    return exit_code::deficiency;
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << "\n";
    return exit_code::precondition;
  } catch (const ConstructionError& e) {
    err << "construction: " << e.what() << "\n";
    return exit_code::precondition;
  } catch (const SolverError& e) {
    err << "solver: " << e.what() << "\n";
    return exit_code::solver;
  } catch (const ValidationError& e) {
    err << "input error: " << e.what() << "\n";
    return exit_code::parse;
  }
  return exit_code::ok;
}

}  // namespace deflab
