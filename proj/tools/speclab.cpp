#include "speclab/bounds.hpp"
#include "speclab/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace speclab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitViolation = 3;

struct GlobalOpts {
  std::string out = ".";
  std::uint64_t seed = 1;
  bool force = false;
  int jobs = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open input file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// No partial files: write next to the target, rename on success.
void write_output(const GlobalOpts& g, const std::string& name,
                  const std::string& content) {
  fs::create_directories(g.out);
  fs::path target = fs::path(g.out) / name;
  if (fs::exists(target) && !g.force)
    throw ParameterError("output exists (use --force): " + target.string());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    o << content;
    if (!o) throw ParameterError("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json report_json(const BoundReport& r) {
  nlohmann::json j;
  j["theorem_id"] = r.theorem_id;
  j["params"] = r.params;
  j["lhs"] = r.lhs;
  j["rhs_core"] = r.rhs_core;
  if (r.explicit_constant) j["explicit_constant"] = *r.explicit_constant;
  j["ratio"] = r.ratio;
  j["pass"] = r.verdict == BoundReport::Verdict::pass
                  ? "pass"
                  : (r.verdict == BoundReport::Verdict::fail ? "fail" : "ratio-only");
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

int cmd_spectrum(const GlobalOpts& g, const std::string& input, double p,
                 long trunc) {
  std::string text = read_file(input);
  nlohmann::json probe = nlohmann::json::parse(text);
  if (probe.contains("dim")) {
    ComplexMatrix A = matrix_from_json(text);
    SpectrumList s = eigen_spectrum(A, default_cluster_tol(A));
    write_output(g, "spectrum.json", spectrum_to_json(s));
    write_output(g, "consistency.json",
                 nlohmann::json({{"consistent", true}, {"report", ""}}).dump(2));
    return kExitOk;
  }
  JacobiSpec spec = jacobi_from_json(text);
  JacobiSpectrumOptions opts;
  if (trunc > 0) opts.truncation_half_width = trunc;
  JacobiPipelineResult res = jacobi_spectrum_pipeline(spec, p, opts);
  write_output(g, "spectrum_determinant.json",
               spectrum_to_json(res.determinant_zeros));
  write_output(g, "spectrum_truncation.json", spectrum_to_json(res.truncation));
  write_output(g, "consistency.json",
               nlohmann::json({{"consistent", res.consistent},
                               {"report", res.report}})
                   .dump(2));
  return res.consistent ? kExitOk : kExitViolation;
}

int cmd_bounds(const GlobalOpts& g, const std::string& theorem,
               const std::string& input, double p, double a) {
  std::string text = read_file(input);
  BoundReport rep;
  if (theorem == "kato-numrange") {
    nlohmann::json j = nlohmann::json::parse(text);
    ComplexMatrix Z0 = matrix_from_json(j.at("Z0").dump());
    ComplexMatrix Z = j.contains("Z")
                          ? matrix_from_json(j.at("Z").dump())
                          : ComplexMatrix(Z0 + matrix_from_json(j.at("M").dump()));
    rep = kato_numrange_check(Z, Z0, p);
  } else if (theorem == "det-growth") {
    nlohmann::json j = nlohmann::json::parse(text);
    ComplexMatrix K = matrix_from_json(j.contains("K") ? j.at("K").dump() : text);
    rep = det_growth_check(K, p);
  } else if (theorem == "ouhabaz") {
    nlohmann::json j = nlohmann::json::parse(text);
    ComplexMatrix H = matrix_from_json(j.contains("H") ? j.at("H").dump() : text);
    rep = ouhabaz_check(H, p);
  } else if (theorem == "resolvent-transfer") {
    nlohmann::json j = nlohmann::json::parse(text);
    ComplexMatrix H0 = matrix_from_json(j.at("H0").dump());
    ComplexMatrix H = j.contains("H")
                          ? matrix_from_json(j.at("H").dump())
                          : ComplexMatrix(H0 + matrix_from_json(j.at("M").dump()));
    auto res = resolvent_transfer_check(H, H0, a, p);
    rep = res.full;
    rep.note += "; scalar grid violations " + std::to_string(res.grid_violations) +
                "/" + std::to_string(res.grid_points);
    if (res.grid_violations > 0) rep.verdict = BoundReport::Verdict::fail;
  } else if (theorem == "thm7.3") {
    JacobiSpec spec = jacobi_from_json(text);
    SpectrumList sd = jacobi_discrete_spectrum(spec, p);
    double lhs = moment_sum(sd, MomentWeightSpec::interval_direct(p, p, -2.0, 2.0));
    double rhs = std::pow(v_seq(spec).lp_norm(p), p);
    rep = make_explicit_report("thm7.3", "p=" + fmt(p), lhs, rhs, 1.0, 1e-8);
  } else if (theorem == "schatten-equiv") {
    rep = schatten_equiv_check(jacobi_from_json(text), p);
  } else {
    throw ParameterError("unknown theorem id: " + theorem);
  }
  write_output(g, "bound_report.json", report_json(rep).dump(2));
  std::cout << rep.theorem_id << ": lhs=" << fmt(rep.lhs)
            << " rhs_core=" << fmt(rep.rhs_core) << " ratio=" << fmt(rep.ratio)
            << " ["
            << (rep.verdict == BoundReport::Verdict::pass
                    ? "pass"
                    : rep.verdict == BoundReport::Verdict::fail ? "fail"
                                                                : "ratio-only")
            << "]\n";
  return rep.verdict == BoundReport::Verdict::fail ? kExitViolation : kExitOk;
}

int cmd_ensemble(const GlobalOpts& g, const std::string& theorem,
                 const std::string& spec_path, EnsembleSpec ens, double tau,
                 double eps) {
  if (!spec_path.empty()) ens = ensemble_from_json(read_file(spec_path));
  if (theorem == "comparison") {
    write_output(g, "comparison.csv",
                 comparison_report(ens.count, ens.seed, ens.p, tau));
    return kExitOk;
  }
  auto rows = empirical_inequality_sweep(theorem, ens, tau, eps, g.jobs);
  write_output(g, "sweep.csv", ratio_rows_to_csv(rows));
  for (const auto& r : rows)
    if (r.verdict == "fail") return kExitViolation;
  return kExitOk;
}

int cmd_verify(const GlobalOpts& g, const std::string& only, double tolerance) {
  VerifyOptions opts;
  opts.only = only;
  opts.tolerance = tolerance;
  opts.seed = g.seed;
  auto checks = run_verify_suite(opts);
  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.group << "/" << c.name
              << "  worst=" << fmt(c.worst) << " tol=" << fmt(c.tolerance) << "\n";
    all = all && c.pass;
  }
  std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES listed above\n");
  return all ? kExitOk : kExitViolation;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"speclab: discrete spectra of non-selfadjoint perturbations and "
               "eigenvalue-moment bound checks"};
  app.set_config("--config", "", "TOML config file (flags override file values)");
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomized commands")
      ->capture_default_str();
  app.add_flag("--force", g.force, "overwrite existing outputs");
  app.add_option("--jobs", g.jobs, "worker threads")->capture_default_str();
  app.fallthrough();

  std::string input, theorem, spec_path, only;
  double p = 1.0, a = -1.0, tau = 0.5, eps = 0.5, tolerance = 0.0;
  long trunc = 0;
  EnsembleSpec ens;

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "determinant + truncation spectra of a Jacobi spec (or "
                  "eigenvalues of a matrix)");
  spectrum->add_option("--input", input, "JacobiSpec or matrix JSON")->required();
  spectrum->add_option("--p", p, "Schatten index");
  spectrum->add_option("--trunc", trunc, "truncation half-width override");

  CLI::App* bounds = app.add_subcommand("bounds", "evaluate one inequality instance");
  bounds->add_option("--theorem", theorem, "kato-numrange | det-growth | ouhabaz | "
                                           "resolvent-transfer | thm7.3 | schatten-equiv")
      ->required();
  bounds->add_option("--input", input, "instance JSON")->required();
  bounds->add_option("--p", p, "Schatten index");
  bounds->add_option("--a", a, "resolvent point (a < 0)");

  CLI::App* ensemble = app.add_subcommand("ensemble", "seeded ensemble sweeps");
  ensemble->add_option("--theorem", theorem,
                       "thm4.2 | thm7.2 | thm7.3 | thm7.4 | thm3.4 | thm6.4 | "
                       "kato-numrange | det-growth | comparison")
      ->required();
  ensemble->add_option("--spec", spec_path, "EnsembleSpec JSON path");
  ensemble->add_option("--kind", ens.kind, "jacobi | matrix");
  ensemble->add_option("--n", ens.n, "matrix dimension (0 = vary 4..16)");
  ensemble->add_option("--support", ens.support, "perturbed sites");
  ensemble->add_option("--p", ens.p, "Schatten index");
  ensemble->add_option("--magnitude", ens.magnitude, "perturbation size");
  ensemble->add_option("--count", ens.count, "instances");
  ensemble->add_option("--tau", tau, "slack exponent");
  ensemble->add_option("--eps", eps, "slack exponent for |w|^gamma weights");

  CLI::App* verify = app.add_subcommand("verify", "exact-identity suite");
  verify->add_option("--only", only, "jensen | conformal | koebe | green | factorization");
  verify->add_option("--tolerance", tolerance, "override per-group tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(g, input, p, trunc);
    if (bounds->parsed()) return cmd_bounds(g, theorem, input, p, a);
    if (ensemble->parsed()) {
      ens.seed = g.seed;
      return cmd_ensemble(g, theorem, spec_path, ens, tau, eps);
    }
    if (verify->parsed()) return cmd_verify(g, only, tolerance);
  } catch (const InconsistencyError& e) {
    std::cerr << "inconsistency: " << e.what() << "\n";
    return kExitViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
