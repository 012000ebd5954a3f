#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vardet/covariance.hpp"
#include "vardet/criteria.hpp"
#include "vardet/kernel.hpp"
#include "vardet/multipartite.hpp"
#include "vardet/optimizer.hpp"
#include "vardet/statefile.hpp"
#include "vardet/upb.hpp"

namespace vardet::cli {

// Exit codes: 0 inconclusive / success, 2 input error, 10 entangled,
// 11 ghz_class.  Internal invariant violations exit 1.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitEntangled = 10;
inline constexpr int kExitGhzClass = 11;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CLI defaults run the optimizer harder than the library's OptimizerConfig
// defaults: restart agreement within 1e-6 needs convergence well below that,
// and the tailored-projector floors have several near-value local minima, so
// the support count only stabilizes with a few hundred restarts.
struct Options {
  std::uint64_t seed = 42;
  int restarts = 200;
  double tolerance = 1e-14;  // optimizer convergence tolerance
};

struct Context {
  Options options;
  std::ostream* warn = nullptr;
  // Optimizer-derived floors keyed by observable-set fingerprint; lives for
  // one run only so outputs stay self-contained.
  std::map<std::string, std::pair<double, int>> floor_cache;
};

inline const std::vector<std::string>& known_criteria() {
  static const std::vector<std::string> names = {"prop2",      "lur-pauli", "prop3",
                                                 "prop4-tiles", "ghz-e",     "ghz-witness",
                                                 "cm-pauli",    "ppt"};
  return names;
}

inline bool criterion_applicable(const std::string& name, const DimensionSpec& dims) {
  auto is_qubits = [&](std::size_t n) {
    if (dims.count() != n) return false;
    for (std::size_t k = 0; k < n; ++k) {
      if (dims.dim(k) != 2) return false;
    }
    return true;
  };
  if (name == "prop2" || name == "lur-pauli" || name == "cm-pauli") return is_qubits(2);
  if (name == "ppt" || name == "prop3") return dims.count() == 2;
  if (name == "prop4-tiles") return dims == DimensionSpec{3, 3};
  if (name == "ghz-e") return is_qubits(3) || is_qubits(4);
  if (name == "ghz-witness") return is_qubits(3);
  std::string known;
  for (const std::string& n : known_criteria()) known += (known.empty() ? "" : ", ") + n;
  throw InputError("unknown criterion: " + name + " (known: " + known + ")");
}

namespace detail_cli {

inline std::string observable_fingerprint(const ObservableSet& ms) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix_bytes = [&h](const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) h = (h ^ p[i]) * 1099511628211ULL;
  };
  for (int d : ms.dims().dims()) mix_bytes(&d, sizeof(d));
  for (const Observable& m : ms) {
    for (int r = 0; r < m.side(); ++r) {
      for (int c = 0; c < m.side(); ++c) {
        double re = m.matrix()(r, c).real(), im = m.matrix()(r, c).imag();
        mix_bytes(&re, sizeof(re));
        mix_bytes(&im, sizeof(im));
      }
    }
  }
  std::ostringstream s;
  s << std::hex << h;
  return s.str();
}

inline std::pair<double, int> optimizer_floor(const ObservableSet& ms, Context& ctx) {
  std::string key = observable_fingerprint(ms);
  if (auto it = ctx.floor_cache.find(key); it != ctx.floor_cache.end()) return it->second;
  OptimizerConfig cfg;
  cfg.restarts = ctx.options.restarts;
  cfg.max_iterations = 5000;
  cfg.convergence_tol = ctx.options.tolerance;
  cfg.seed = ctx.options.seed;
  Optimum opt = min_variance_sum_product(ms, ms.dims(), cfg);
  auto result = std::make_pair(opt.value, opt.restarts_agreeing);
  ctx.floor_cache.emplace(std::move(key), result);
  return result;
}

/// Largest-eigenvalue eigenvector with its phase fixed so that the dominant
/// amplitude is real positive (keeps tailored observable sets, and with them
/// the floor cache, stable across a noise scan).
inline Ket dominant_eigenvector(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  Vector v = es.eigenvectors().col(rho.side() - 1);
  int imax = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  }
  if (std::abs(v(imax)) > 0) v *= std::conj(v(imax)) / std::abs(v(imax));
  return Ket::normalized(std::move(v), rho.dims());
}

}  // namespace detail_cli

inline DetectionReport evaluate_criterion(const std::string& name, const DensityMatrix& rho,
                                          Context& ctx) {
  if (!criterion_applicable(name, rho.dims())) {
    throw InputError("criterion " + name + " does not apply to a " + rho.dims().to_string() +
                     " state");
  }
  DetectionReport report;
  if (name == "prop2") {
    double r2 = 1.0 / std::sqrt(2.0);
    report = check_variance_criterion(rho, schmidt_basis_criterion(r2, r2), "prop2");
  } else if (name == "lur-pauli") {
    report = lur_evaluate(rho, pauli_observables(), pauli_observables(), 2.0, 2.0);
    report.criterion = "lur-pauli";
  } else if (name == "prop3") {
    Ket psi = detail_cli::dominant_eigenvector(rho);
    if (second_schmidt_coefficient(psi) <= 1e-7) {
      throw InputError("prop3: the dominant eigenvector is a product state");
    }
    ObservableSet set = entangled_kernel_projectors(psi, ctx.options.seed);
    auto [floor, support] = detail_cli::optimizer_floor(set, ctx);
    report = make_undercut_report("prop3", variance_sum(rho, set), floor,
                                  BoundProvenance::optimizer, support);
  } else if (name == "prop4-tiles") {
    ObservableSet set = upb_projector_set(tiles_upb(), ctx.options.seed);
    auto [floor, support] = detail_cli::optimizer_floor(set, ctx);
    report = make_undercut_report("prop4-tiles", variance_sum(rho, set), floor,
                                  BoundProvenance::optimizer, support);
  } else if (name == "ghz-e") {
    report = rho.dims().count() == 3 ? ghz_uncertainty_check(rho) : four_qubit_ghz_check(rho);
  } else if (name == "ghz-witness") {
    GhzWitnessResult w = ghz_witness(rho);
    report.criterion = "ghz-witness";
    report.value = w.value;
    report.verdict = w.verdict;
    report.bound_provenance = BoundProvenance::analytic;
    report.bound = w.verdict == Verdict::ghz_class ? kGhzWitnessGhzClassThreshold
                                                   : kGhzWitnessEntangledThreshold;
  } else if (name == "cm-pauli") {
    report = pauli_cm_check(rho);
  } else if (name == "ppt") {
    report = make_undercut_report("ppt", ppt_min_eigenvalue(rho, 1), 0.0,
                                  BoundProvenance::analytic);
  }
  if (ctx.warn && report.bound_provenance == BoundProvenance::optimizer &&
      report.bound_support >= 0 && report.bound_support < kMinAgreeingRestarts) {
    *ctx.warn << "warning: " << name << " bound supported by only " << report.bound_support
              << " agreeing restarts (< " << kMinAgreeingRestarts
              << "); verdict withheld as inconclusive\n";
  }
  return report;
}

inline int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::entangled: return kExitEntangled;
    case Verdict::ghz_class: return kExitGhzClass;
    default: return kExitOk;
  }
}

namespace detail_cli {

inline int verdict_rank(Verdict v) {
  switch (v) {
    case Verdict::entangled: return 1;
    case Verdict::ghz_class: return 2;
    default: return 0;
  }
}

inline void print_report(std::ostream& out, const DetectionReport& r, const std::string& label,
                         const DimensionSpec& dims, std::uint64_t seed) {
  out << "criterion: " << r.criterion << "\n";
  if (!label.empty()) out << "label: " << label << "\n";
  out << "dims: " << dims.to_string() << "\n";
  out << "value: " << format_real(r.value) << "\n";
  out << "bound: " << format_real(r.bound) << "\n";
  out << "bound_provenance: " << to_string(r.bound_provenance) << "\n";
  if (r.bound_support >= 0) out << "bound_support: " << r.bound_support << "\n";
  out << "verdict: " << to_string(r.verdict) << "\n";
  out << "seed: " << seed << "\n";
}

struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  double step = 0.01;

  std::vector<double> points() const {
    std::vector<double> p;
    for (int i = 0;; ++i) {
      double v = start + i * step;
      if (v > stop + 1e-12) break;
      p.push_back(std::min(v, stop));
    }
    return p;
  }
};

inline GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  double vals[3];
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t colon = text.find(':', start);
    bool last = (i == 2);
    if ((colon == std::string::npos) != last) {
      throw InputError("grid: expected start:stop:step, got \"" + text + "\"");
    }
    std::string tok = text.substr(start, last ? std::string::npos : colon - start);
    try {
      vals[i] = std::stod(tok);
    } catch (const std::exception&) {
      throw InputError("grid: cannot parse \"" + tok + "\"");
    }
    start = colon + 1;
  }
  g.start = vals[0];
  g.stop = vals[1];
  g.step = vals[2];
  if (g.step <= 0 || g.start > g.stop || g.start < 0.0 || g.stop > 1.0) {
    throw InputError("grid: need 0 <= start <= stop <= 1 and step > 0");
  }
  return g;
}

}  // namespace detail_cli

// --- subcommand implementations ---------------------------------------------------

inline int run_detect(const std::string& state_path, const std::string& criterion,
                      const Options& options, std::ostream& out, std::ostream& err) {
  StateFile sf = read_state_file(state_path);
  Context ctx{options, &err, {}};
  DetectionReport report = evaluate_criterion(criterion, sf.state, ctx);
  detail_cli::print_report(out, report, sf.label, sf.state.dims(), options.seed);
  return verdict_exit_code(report.verdict);
}

/// One criterion's column in a noise sweep.  Thresholds that fall outside the
/// requested grid range are withheld (nullopt) so the footer never reports a
/// crossing the sweep did not cover.
struct ScanColumn {
  std::string criterion;
  std::vector<double> values;  // NaN where the criterion was inapplicable
  std::vector<Verdict> verdicts;
  std::optional<double> threshold_entangled;
  std::optional<double> threshold_ghz_class;
  bool tiered = false;
};

struct ScanResult {
  std::string family;
  std::vector<double> grid;
  std::vector<ScanColumn> columns;

  std::string to_csv(std::uint64_t seed) const {
    std::ostringstream csv;
    csv << "p";
    for (const ScanColumn& c : columns) {
      csv << "," << c.criterion << "_value," << c.criterion << "_verdict";
    }
    csv << "\n";
    for (std::size_t row = 0; row < grid.size(); ++row) {
      csv << format_real(grid[row]);
      for (const ScanColumn& c : columns) {
        csv << "," << (std::isnan(c.values[row]) ? "nan" : format_real(c.values[row])) << ","
            << to_string(c.verdicts[row]);
      }
      csv << "\n";
    }
    auto render = [](const std::optional<double>& t) {
      return t ? format_real(*t) : std::string("none");
    };
    for (const ScanColumn& c : columns) {
      csv << "# threshold_entangled," << c.criterion << "," << render(c.threshold_entangled)
          << "\n";
      if (c.tiered) {
        csv << "# threshold_ghz_class," << c.criterion << "," << render(c.threshold_ghz_class)
            << "\n";
      }
    }
    csv << "# seed," << seed << "\n";
    return csv.str();
  }
};

inline ScanResult run_scan_result(const std::string& family,
                                  const std::vector<std::string>& criteria,
                                  const detail_cli::GridSpec& grid, Context& ctx) {
  if (criteria.empty()) throw InputError("scan: empty criteria list");
  std::function<DensityMatrix(double)> make_state;
  DimensionSpec dims{2, 2};
  if (family == "werner2") {
    make_state = singlet_werner_state;
  } else if (family == "ghz3") {
    make_state = ghz3_isotropic_state;
    dims = DimensionSpec{2, 2, 2};
  } else if (family == "ghz4") {
    make_state = ghz4_isotropic_state;
    dims = DimensionSpec{2, 2, 2, 2};
  } else {
    throw InputError("unknown family: " + family);
  }
  for (const std::string& c : criteria) {
    if (!criterion_applicable(c, dims)) {
      throw InputError("criterion " + c + " does not apply to family " + family);
    }
  }

  auto evaluate_cell = [&](const std::string& criterion,
                           double p) -> std::optional<DetectionReport> {
    try {
      return evaluate_criterion(criterion, make_state(p), ctx);
    } catch (const InputError&) {
      // A tailored criterion can be structurally inapplicable at isolated grid
      // points (e.g. a product dominant eigenvector at p = 0).
      return std::nullopt;
    }
  };
  auto tier_detector = [&](const std::string& criterion, int tier) {
    return [&, criterion, tier](double p) {
      std::optional<DetectionReport> r = evaluate_cell(criterion, p);
      return r && detail_cli::verdict_rank(r->verdict) >= tier;
    };
  };
  auto in_grid_range = [&](double t) {
    return t >= grid.start - 1e-12 && t <= grid.stop + 1e-12;
  };

  ScanResult result;
  result.family = family;
  result.grid = grid.points();
  for (const std::string& name : criteria) {
    ScanColumn column;
    column.criterion = name;
    column.tiered = (name == "ghz-witness") || (name == "ghz-e" && dims.count() == 3);
    int last_rank = -1;
    for (double p : result.grid) {
      std::optional<DetectionReport> r = evaluate_cell(name, p);
      int rank = r ? detail_cli::verdict_rank(r->verdict) : 0;
      if (rank < last_rank) {
        throw std::logic_error("scan: verdict column for " + name +
                               " is not monotone at p = " + format_real(p));
      }
      last_rank = rank;
      column.values.push_back(r ? r->value : std::nan(""));
      column.verdicts.push_back(r ? r->verdict : Verdict::inconclusive);
    }
    for (int tier : {1, 2}) {
      if (tier == 2 && !column.tiered) continue;
      std::optional<double> threshold;
      try {
        double t = noise_threshold(tier_detector(name, tier));
        if (in_grid_range(t)) threshold = t;
      } catch (const std::runtime_error&) {
      }
      (tier == 1 ? column.threshold_entangled : column.threshold_ghz_class) = threshold;
    }
    result.columns.push_back(std::move(column));
  }
  return result;
}

inline int run_scan(const std::string& family, const std::vector<std::string>& criteria,
                    const std::string& grid_text, const std::string& csv_path,
                    const Options& options, std::ostream& out, std::ostream& err) {
  detail_cli::GridSpec grid = detail_cli::parse_grid(grid_text);
  Context ctx{options, &err, {}};
  ScanResult result = run_scan_result(family, criteria, grid, ctx);
  std::string csv = result.to_csv(options.seed);
  if (csv_path.empty()) {
    out << csv;
  } else {
    std::ofstream f(csv_path);
    if (!f) throw InputError("cannot open for writing: " + csv_path);
    f << csv;
    out << "wrote " << csv_path << "\n";
  }
  return kExitOk;
}

inline int run_fixtures(const std::string& name, const std::string& out_path, std::ostream& out) {
  StateFile sf = [&] {
    try {
      return make_fixture(name);
    } catch (const std::runtime_error& e) {
      throw InputError(e.what());
    }
  }();
  try {
    write_state_file(out_path, sf.state, sf.label);
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  out << "wrote " << out_path << " (" << sf.label << ", dims " << sf.state.dims().to_string()
      << ")\n";
  return kExitOk;
}

inline int run_ghz_report(const std::string& state_path, const std::string& csv_path,
                          const Options& options, std::ostream& out) {
  StateFile sf = read_state_file(state_path);
  if (!(sf.state.dims() == DimensionSpec{2, 2, 2})) {
    throw InputError("ghz-report: expected a three-qubit state");
  }
  double e_value = ghz_uncertainty(sf.state);
  TripartiteVerdict cls = classify_tripartite(e_value);
  GhzWitnessResult witness = ghz_witness(sf.state);

  out << "report: ghz\n";
  if (!sf.label.empty()) out << "label: " << sf.label << "\n";
  out << "E: " << format_real(e_value) << "\n";
  out << "E_class: " << to_string(cls.cls) << "\n";
  out << "E_thresholds: entangled<" << format_real(kTripartiteEntangledThreshold) << " ghz_class<"
      << format_real(kGhzClassThreshold) << "\n";
  out << "witness: " << format_real(witness.value) << "\n";
  out << "witness_class: " << to_string(witness.verdict) << "\n";
  out << "witness_thresholds: entangled<" << format_real(kGhzWitnessEntangledThreshold)
      << " ghz_class<" << format_real(kGhzWitnessGhzClassThreshold) << "\n";
  out << "seed: " << options.seed << "\n";

  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw InputError("cannot open for writing: " + csv_path);
    f << "metric,value\n";
    f << "E," << format_real(e_value) << "\n";
    f << "E_class," << to_string(cls.cls) << "\n";
    f << "witness," << format_real(witness.value) << "\n";
    f << "witness_class," << to_string(witness.verdict) << "\n";
    f << "# seed," << options.seed << "\n";
  }

  bool ghz = cls.cls == TripartiteClass::ghz_class || witness.verdict == Verdict::ghz_class;
  bool ent = cls.cls != TripartiteClass::inconclusive || witness.verdict != Verdict::inconclusive;
  return ghz ? kExitGhzClass : ent ? kExitEntangled : kExitOk;
}

inline int run_cm_check(const std::string& state_path, const std::string& csv_path,
                        const Options& options, std::ostream& out) {
  StateFile sf = read_state_file(state_path);
  if (!(sf.state.dims() == DimensionSpec{2, 2})) {
    throw InputError("cm-check: expected a two-qubit state");
  }
  CovarianceMatrix gamma =
      covariance_matrix(sf.state, pauli_pair_observables(), std::make_pair(3, 3));
  auto [s_a, s_b] = schur_complements(gamma);
  DetectionReport report = pauli_cm_check(sf.state);

  auto print_matrix = [&](const char* name, const RealMatrix& m) {
    out << name << ":\n";
    for (int r = 0; r < m.rows(); ++r) {
      out << "  ";
      for (int c = 0; c < m.cols(); ++c) {
        if (c) out << " ";
        out << format_real(m(r, c));
      }
      out << "\n";
    }
  };
  out << "check: cm-pauli\n";
  if (!sf.label.empty()) out << "label: " << sf.label << "\n";
  print_matrix("gamma", gamma.entries());
  print_matrix("block_a", gamma.block_a());
  print_matrix("block_b", gamma.block_b());
  print_matrix("block_c", gamma.block_c());
  print_matrix("schur_a", s_a);
  print_matrix("schur_b", s_b);
  out << "trace_schur_a: " << format_real(s_a.trace()) << "\n";
  out << "trace_schur_b: " << format_real(s_b.trace()) << "\n";
  out << "bound: " << format_real(report.bound) << "\n";
  out << "verdict: " << to_string(report.verdict) << "\n";
  out << "seed: " << options.seed << "\n";

  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw InputError("cannot open for writing: " + csv_path);
    for (int r = 0; r < gamma.size(); ++r) {
      for (int c = 0; c < gamma.size(); ++c) {
        if (c) f << ",";
        f << format_real(gamma.entries()(r, c));
      }
      f << "\n";
    }
    f << "# seed," << options.seed << "\n";
  }
  return verdict_exit_code(report.verdict);
}

/// Entry point shared by the binary and the tests; args exclude the program
/// name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement detection via variance and covariance criteria"};
  app.name("vardet");
  app.require_subcommand(1);

  Options options;

  std::string detect_state, detect_criterion;
  CLI::App* detect = app.add_subcommand("detect", "evaluate one criterion on a state file");
  detect->add_option("state", detect_state, "state file (JSON)")->required();
  detect->add_option("--criterion", detect_criterion, "criterion name")->required();

  std::string scan_family, scan_grid = "0:1:0.01", scan_csv;
  std::vector<std::string> scan_criteria;
  CLI::App* scan = app.add_subcommand("scan", "sweep a noise family and bisect thresholds");
  scan->add_option("--family", scan_family, "werner2 | ghz3 | ghz4")->required();
  scan->add_option("--criterion", scan_criteria, "criteria (repeat or comma-separate)")
      ->delimiter(',');
  scan->add_option("--grid", scan_grid, "start:stop:step (default 0:1:0.01)");
  scan->add_option("--csv", scan_csv, "write the CSV here instead of stdout");

  std::string fixture_name, fixture_out;
  CLI::App* fixtures = app.add_subcommand("fixtures", "write a built-in state file");
  fixtures->add_option("name", fixture_name, "fixture name, e.g. bell, werner2:p=0.5")->required();
  fixtures->add_option("output", fixture_out, "output path")->required();

  std::string ghz_state, ghz_csv;
  CLI::App* ghz = app.add_subcommand("ghz-report", "three-qubit uncertainty and witness report");
  ghz->add_option("state", ghz_state, "state file (JSON)")->required();
  ghz->add_option("--csv", ghz_csv, "also write metric,value rows here");

  std::string cm_state, cm_csv;
  CLI::App* cm = app.add_subcommand("cm-check", "two-qubit covariance-matrix check");
  cm->add_option("state", cm_state, "state file (JSON)")->required();
  cm->add_option("--csv", cm_csv, "write the covariance matrix here (row-major)");

  for (CLI::App* sub : {detect, scan, ghz, cm}) {
    sub->add_option("--seed", options.seed, "random seed echoed into reports (default 42)");
    sub->add_option("--restarts", options.restarts, "optimizer restarts (default 200)");
    sub->add_option("--tolerance", options.tolerance,
                    "optimizer convergence tolerance (default 1e-14)");
  }

  std::vector<const char*> argv;
  argv.push_back("vardet");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    if (app.got_subcommand(detect)) {
      return run_detect(detect_state, detect_criterion, options, out, err);
    }
    if (app.got_subcommand(scan)) {
      return run_scan(scan_family, scan_criteria, scan_grid, scan_csv, options, out, err);
    }
    if (app.got_subcommand(fixtures)) {
      return run_fixtures(fixture_name, fixture_out, out);
    }
    if (app.got_subcommand(ghz)) {
      return run_ghz_report(ghz_state, ghz_csv, options, out);
    }
    if (app.got_subcommand(cm)) {
      return run_cm_check(cm_state, cm_csv, options, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    // read_state_file and friends signal input problems as runtime_error
    std::string what = e.what();
    if (what.rfind("state file", 0) == 0 || what.rfind("cannot open", 0) == 0) {
      err << "error: " << what << "\n";
      return kExitInput;
    }
    err << "internal error: " << what << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace vardet::cli
