// Batch driver: loads a disk configuration, runs named experiments, and
// persists spectra/reports plus a run manifest per command.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "scl/config.hpp"
#include "scl/eigensolve.hpp"
#include "scl/fem.hpp"
#include "scl/geometry.hpp"
#include "scl/interface_modes.hpp"
#include "scl/io.hpp"
#include "scl/mesh.hpp"
#include "scl/radial.hpp"
#include "scl/report.hpp"
#include "scl/spectral.hpp"
#include "scl/wkb.hpp"

namespace {

namespace fs = std::filesystem;

int exit_code_for(const scl::error& e) {
  switch (e.code()) {
    case scl::errc::config_invalid:
    case scl::errc::unsupported_convention:
    case scl::errc::input_invalid:
      return 1;
    case scl::errc::ellipticity_violated:
    case scl::errc::elliptic_region_violated:
      return 2;
    default:
      return 3;
  }
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  int jobs = 0;
  std::string convention;  // optional override
};

scl::TwoPhaseDiskConfig load(const CommonArgs& args) {
  auto cfg = scl::load_config(args.config_path);
  if (args.convention == "unit_normal") cfg.transmission = scl::Transmission::unit_normal;
  else if (args.convention == "flux") cfg.transmission = scl::Transmission::flux;
  else if (!args.convention.empty())
    scl::raise(scl::errc::config_invalid, "unknown convention " + args.convention);
  return cfg;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out_dir);
  return (fs::path(args.out_dir) / name).string();
}

void finish_manifest(const CommonArgs& args, const scl::TwoPhaseDiskConfig& cfg,
                     const std::string& command, const nlohmann::json& parameters,
                     std::vector<std::string> outputs, const scl::WallTimer& timer) {
  scl::RunManifest manifest;
  manifest.command = command;
  manifest.parameters = parameters;
  manifest.config_snapshot = scl::config_to_json(cfg);
  manifest.outputs = std::move(outputs);
  manifest.wall_seconds = timer.seconds();
  std::string path = out_path(args, command + "_manifest.json");
  manifest.write(path);
  if (!manifest.outputs_valid())
    scl::raise(scl::errc::numerical_failure, "a declared output file is missing or empty");
}

bool parse_mode_range(const std::string& text, int& lo, int& hi) {
  auto pos = text.find("..");
  if (pos == std::string::npos) {
    lo = hi = std::stoi(text);
    return true;
  }
  lo = std::stoi(text.substr(0, pos));
  hi = std::stoi(text.substr(pos + 2));
  return lo <= hi;
}

int cmd_check(const CommonArgs& args) {
  auto cfg = load(args);
  auto rep = scl::validate(cfg);
  if (!rep.ok) {
    for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
    if (rep.sign_flip_remedy)
      std::cout << "hint: the contrast is reversed; the mirrored operator (swap the sign) "
                   "satisfies the ellipticity condition\n";
    bool shape_bad = !(cfg.rz > 0.0) || !(cfg.rz < cfg.ry) ||
                     cfg.a_plus.min_on(0.0, std::min(cfg.rz, cfg.ry)) <= 0.0 ||
                     (cfg.rz < cfg.ry && cfg.a_minus.min_on(cfg.rz, cfg.ry) <= 0.0);
    return shape_bad ? 1 : 2;
  }
  scl::WallTimer timer;
  auto pred = scl::predictions(cfg);
  std::cout << "config ok; ellipticity margin " << pred.margin << "\n"
            << "C_2        = " << scl::format_g17(pred.c_d) << "\n"
            << "V_plus     = " << scl::format_g17(pred.v_plus) << "\n"
            << "V_minus    = " << scl::format_g17(pred.v_minus) << "\n"
            << "A          = " << scl::format_g17(pred.big_a) << "\n"
            << "l_K        = " << scl::format_g17(pred.l_k) << "\n"
            << "c_minus2   = " << scl::format_g17(pred.c_minus2) << "\n";
  nlohmann::json j = {{"c_d", pred.c_d},         {"v_plus", pred.v_plus},
                      {"v_minus", pred.v_minus}, {"big_a", pred.big_a},
                      {"l_k", pred.l_k},         {"c_minus2", pred.c_minus2},
                      {"margin", pred.margin}};
  std::string path = out_path(args, "predictions.json");
  std::ofstream(path) << j.dump(2) << '\n';
  finish_manifest(args, cfg, "check", {}, {path}, timer);
  return 0;
}

int cmd_oracle(const CommonArgs& args, double lambda_max, const std::string& mode_range) {
  auto cfg = load(args);
  scl::require_valid(cfg);
  scl::WallTimer timer;
  scl::oracle::RadialSolver solver(cfg);
  std::vector<scl::SpectrumRecord> records;
  nlohmann::json params;
  if (!mode_range.empty()) {
    int lo = 0, hi = 0;
    if (!parse_mode_range(mode_range, lo, hi))
      scl::raise(scl::errc::config_invalid, "bad mode range " + mode_range);
    for (int n = lo; n <= hi; ++n) {
      auto part = solver.mode_eigenvalues(n, -lambda_max, lambda_max);
      records.insert(records.end(), part.begin(), part.end());
    }
    std::stable_sort(records.begin(), records.end(), scl::spectrum_order);
    params = {{"mode", mode_range}, {"lambda_max", lambda_max}};
  } else {
    records = solver.full_spectrum(lambda_max, args.jobs);
    params = {{"lambda_max", lambda_max}};
  }
  std::string path = out_path(args, "spectrum.csv");
  scl::write_spectrum_csv(path, records);
  std::cout << "wrote " << records.size() << " records to " << path << "\n";
  finish_manifest(args, cfg, "oracle", params, {path}, timer);
  return 0;
}

int cmd_fem(const CommonArgs& args, double edge, int per_sign, bool export_matrices) {
  auto cfg = load(args);
  scl::require_valid(cfg);
  scl::WallTimer timer;
  auto mesh = scl::fem::build_disk_mesh(cfg, edge);
  auto pair = scl::fem::assemble(cfg, mesh);

  double hi = 40.0, lo = -40.0;
  int base = scl::eig::inertia_below(pair, 0.0);
  while (scl::eig::inertia_below(pair, hi) - base < per_sign) hi *= 1.6;
  while (base - scl::eig::inertia_below(pair, lo) < per_sign) lo *= 1.6;
  auto sol = scl::eig::solve_range(pair, lo, hi);

  std::vector<scl::SpectrumRecord> records;
  for (int i = 0; i < sol.values.size(); ++i)
    records.push_back({sol.values[i], -1, 1, sol.residuals[i], scl::Provenance::fem});
  std::string spec_path = out_path(args, "fem_spectrum.csv");
  scl::write_spectrum_csv(spec_path, records);

  std::string report_path = out_path(args, "fem_report.json");
  nlohmann::json rep = {{"dofs", pair.size()},
                        {"edge", edge},
                        {"eigenvalues", sol.values.size()},
                        {"max_residual", sol.residuals.size() ? sol.residuals.maxCoeff() : 0.0},
                        {"path", sol.path},
                        {"shifts", sol.shifts}};
  std::ofstream(report_path) << rep.dump(2) << '\n';

  std::vector<std::string> outputs = {spec_path, report_path};
  std::string mesh_path = out_path(args, "mesh.txt");
  scl::fem::write_mesh(mesh_path, mesh);
  outputs.push_back(mesh_path);
  if (export_matrices) {
    std::string kp = out_path(args, "stiffness.coo"), mp = out_path(args, "mass.coo");
    scl::fem::write_coo_sorted(kp, pair.k_matrix);
    scl::fem::write_coo_sorted(mp, pair.m_matrix);
    outputs.push_back(kp);
    outputs.push_back(mp);
  }
  std::cout << "fem: " << pair.size() << " dofs, " << sol.values.size() << " eigenvalues, max residual "
            << (sol.residuals.size() ? sol.residuals.maxCoeff() : 0.0) << "\n";
  finish_manifest(args, cfg, "fem",
                  {{"edge", edge}, {"per_sign", per_sign}, {"export_matrices", export_matrices}},
                  outputs, timer);
  return 0;
}

int cmd_weyl(const CommonArgs& args, double lambda_max, double win_lo, double win_hi) {
  auto cfg = load(args);
  scl::require_valid(cfg);
  scl::WallTimer timer;
  scl::oracle::RadialSolver solver(cfg);
  auto records = solver.full_spectrum(lambda_max, args.jobs);
  scl::stats::CountingFunction counting(records);

  std::string counting_path = out_path(args, "counting.csv");
  {
    std::ofstream os(counting_path);
    os << "lambda,n_plus,n_minus\n";
    for (double t : counting.jump_points(+1, 0.0, lambda_max)) {
      auto [np, nm] = counting(t);
      os << scl::format_g17(t) << ',' << np << ',' << nm << '\n';
    }
  }
  auto pred = scl::predictions(cfg);
  auto fit = scl::stats::weyl_fit(counting, 2, win_lo, win_hi);
  auto comb = scl::stats::combined_weyl(counting, 2, win_lo, win_hi);
  nlohmann::json j = {{"window", {win_lo, win_hi}},
                      {"slope_plus", fit.plus.slope},
                      {"slope_minus", fit.minus.slope},
                      {"ratio_plus", fit.plus.slope / (pred.c_d * pred.v_plus)},
                      {"ratio_minus", fit.minus.slope / (pred.c_d * pred.v_minus)},
                      {"combined_slope", comb.slope},
                      {"combined_ratio", comb.slope / (pred.c_d * (pred.v_plus + pred.v_minus))},
                      {"r2_plus", fit.plus.r2},
                      {"r2_minus", fit.minus.r2}};
  std::string fit_path = out_path(args, "weyl.json");
  std::ofstream(fit_path) << j.dump(2) << '\n';
  std::cout << j.dump(2) << "\n";
  finish_manifest(args, cfg, "weyl", {{"lambda_max", lambda_max}, {"window", {win_lo, win_hi}}},
                  {counting_path, fit_path}, timer);
  return 0;
}

int cmd_interface(const CommonArgs& args, const std::string& mode_range) {
  auto cfg = load(args);
  scl::require_valid(cfg);
  scl::WallTimer timer;
  int lo = 10, hi = 40;
  if (!mode_range.empty() && !parse_mode_range(mode_range, lo, hi))
    scl::raise(scl::errc::config_invalid, "bad mode range " + mode_range);
  scl::oracle::RadialSolver solver(cfg);
  auto table = scl::iface::interface_table(solver, lo, hi);
  std::string path = out_path(args, "interface_modes.csv");
  scl::iface::write_interface_csv(path, table);
  std::cout << "wrote " << table.size() << " interface modes to " << path << "\n";
  finish_manifest(args, cfg, "interface", {{"mode", {lo, hi}}}, {path}, timer);
  return 0;
}

int cmd_dtn(const CommonArgs& args, int eps, const std::string& side_name,
            std::vector<double> etas, double h0) {
  auto cfg = load(args);
  scl::require_positive_geometry(cfg);  // per-side maps need no interface contrast
  scl::WallTimer timer;
  scl::oracle::Side side =
      (side_name == "minus") ? scl::oracle::Side::minus : scl::oracle::Side::plus;
  if (etas.empty()) {
    double start = (eps == -1) ? 1.1 : 0.4;
    for (double e = start; e <= 2.6; e += 0.3) etas.push_back(e);
  }
  scl::oracle::RadialSolver solver(cfg);
  std::string path = out_path(args, "dtn_symbols.csv");
  std::ofstream os(path);
  os << "epsilon,side,eta,c0,c1_empirical,remainder_slope\n";
  for (double eta : etas) {
    try {
      auto est = scl::wkb::subprincipal_estimate(solver, side, eps, eta, h0);
      os << eps << ',' << side_name << ',' << scl::format_g17(est.eta) << ','
         << scl::format_g17(est.c0) << ',' << scl::format_g17(est.c1) << ','
         << scl::format_g17(est.remainder_slope) << '\n';
    } catch (const scl::error& e) {
      os << eps << ',' << side_name << ',' << scl::format_g17(eta) << ",nan,nan,nan\n";
      std::cerr << "eta " << eta << ": " << e.what() << "\n";
    }
  }
  os.close();
  std::cout << "wrote symbol table to " << path << "\n";
  finish_manifest(args, cfg, "dtn", {{"epsilon", eps}, {"side", side_name}, {"h0", h0}}, {path},
                  timer);
  return 0;
}

int cmd_report(const CommonArgs& args, double fem_edge) {
  auto cfg = load(args);
  scl::require_valid(cfg);
  scl::WallTimer timer;
  scl::report::AcceptanceOptions opts;
  opts.out_dir = args.out_dir;
  opts.jobs = args.jobs;
  opts.fem_edge = fem_edge;
  scl::report::AcceptanceRun run(cfg, opts);
  auto results = run.run();
  int failures = scl::report::print_results(results, std::cout);
  std::vector<std::string> outputs;
  for (const char* name : {"spectrum_oracle.csv", "counting.csv", "dtn_convergence.csv",
                           "interface_modes.csv", "localization.csv", "acceptance.json"})
    outputs.push_back((fs::path(args.out_dir) / name).string());
  finish_manifest(args, cfg, "report", {{"fem_edge", fem_edge}}, outputs, timer);
  return failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for the spectral theory of sign-changing transmission "
               "problems on a two-phase disk"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--config", common.config_path, "configuration file (JSON)")->required();
  app.add_option("--out", common.out_dir, "output directory");
  app.add_option("--jobs", common.jobs, "worker threads (0 = hardware)");
  app.add_option("--convention", common.convention, "override transmission: unit_normal | flux");

  auto* check = app.add_subcommand("check", "validate the configuration and print predictions");

  double lambda_max = 100.0;
  std::string mode_range;
  auto* oracle_cmd = app.add_subcommand("oracle", "mode-wise spectrum to a window");
  oracle_cmd->add_option("--lambda-max", lambda_max, "spectral window |lambda| <= this");
  oracle_cmd->add_option("--mode", mode_range, "restrict to modes A..B");

  double edge = 0.1;
  int per_sign = 30;
  bool export_matrices = false;
  auto* fem_cmd = app.add_subcommand("fem", "assemble and solve the 2-D discretization");
  fem_cmd->add_option("--edge", edge, "target mesh edge length");
  fem_cmd->add_option("--count", per_sign, "eigenvalues per sign");
  fem_cmd->add_flag("--export-matrices", export_matrices, "write stiffness/mass in COO text");

  double weyl_lambda = 2000.0, win_lo = 500.0, win_hi = 2000.0;
  auto* weyl_cmd = app.add_subcommand("weyl", "counting functions and Weyl fits");
  weyl_cmd->add_option("--lambda-max", weyl_lambda, "spectral window");
  weyl_cmd->add_option("--fit-lo", win_lo, "fit window lower end");
  weyl_cmd->add_option("--fit-hi", win_hi, "fit window upper end");

  std::string iface_range = "10..40";
  auto* iface_cmd = app.add_subcommand("interface", "interface branch quantization table");
  iface_cmd->add_option("--mode", iface_range, "mode range A..B");

  int eps = 0;
  std::string side = "plus";
  std::vector<double> etas;
  double h0 = 0.1;
  auto* dtn_cmd = app.add_subcommand("dtn", "semiclassical DtN symbol table");
  dtn_cmd->add_option("--epsilon", eps, "-1, 0 or +1")->check(CLI::IsMember({-1, 0, 1}));
  dtn_cmd->add_option("--side", side, "plus | minus")->check(CLI::IsMember({"plus", "minus"}));
  dtn_cmd->add_option("--eta", etas, "eta values (default: a grid)");
  dtn_cmd->add_option("--h0", h0, "coarsest semiclassical parameter");

  double report_edge = 0.025;
  auto* report_cmd = app.add_subcommand("report", "run the full verification suite");
  report_cmd->add_option("--edge", report_edge, "mesh edge for the FEM criterion");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(common);
    if (oracle_cmd->parsed()) return cmd_oracle(common, lambda_max, mode_range);
    if (fem_cmd->parsed()) return cmd_fem(common, edge, per_sign, export_matrices);
    if (weyl_cmd->parsed()) return cmd_weyl(common, weyl_lambda, win_lo, win_hi);
    if (iface_cmd->parsed()) return cmd_interface(common, iface_range);
    if (dtn_cmd->parsed()) return cmd_dtn(common, eps, side, etas, h0);
    if (report_cmd->parsed()) return cmd_report(common, report_edge);
  } catch (const scl::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
