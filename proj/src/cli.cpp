#include "prs/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "prs/analysis.hpp"
#include "prs/boundary_layer.hpp"
#include "prs/config.hpp"
#include "prs/error.hpp"
#include "prs/fem.hpp"
#include "prs/format.hpp"
#include "prs/mesh.hpp"
#include "prs/solver.hpp"

namespace prs::cli {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open output file " + path.string());
  f << content;
  if (!f) throw InvalidInput("failed writing " + path.string());
}

fs::path prepare_output(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::shared_ptr<const HiemenzProfile> make_profile(const RunConfig& cfg) {
  return std::make_shared<const HiemenzProfile>(solve_profile(cfg.eta_max, cfg.ode_tol));
}

int cmd_profile(const RunConfig& cfg, std::ostream& out) {
  const auto dir = prepare_output(cfg);
  const HiemenzProfile p = solve_profile(cfg.eta_max, cfg.ode_tol);
  std::string csv = "eta,f,fp,fpp\n";
  for (const auto& s : p.table) {
    csv += format_real(s.eta) + "," + format_real(s.f) + "," + format_real(s.fp) + "," + format_real(s.fpp) + "\n";
  }
  write_file(dir / "profile.csv", csv);
  out << "profile: fpp0=" << format_real(p.fpp0) << " beta=" << format_real(p.beta)
      << " residual=" << format_real(p.residual) << " step=" << format_real(p.step) << " rows=" << p.table.size()
      << "\n";
  return kSuccess;
}

double layer_width(const RunConfig& cfg) { return 2.4 * std::sqrt(cfg.nu / cfg.a); }

int cmd_mesh(const RunConfig& cfg, std::ostream& out) {
  const auto dir = prepare_output(cfg);
  const TriMesh mesh = study_mesh(cfg.study(), 0, layer_width(cfg));
  const MeshQuality q = quality(mesh);
  std::ostringstream vtk;
  write_vtk(vtk, mesh);
  write_file(dir / "mesh.vtk", vtk.str());
  write_file(dir / "mesh_quality.csv", quality_csv_header() + "\n" + quality_csv_row(q) + "\n");
  out << "mesh: " << mesh_kind_name(cfg.mesh_kind) << " " << mesh.nx() << "x" << mesh.ny()
      << " elements=" << q.n_elements << " facets=" << q.n_facets << " h_max=" << format_real(q.h_max)
      << " max_angle=" << format_real(q.max_angle) << " max_aspect=" << format_real(q.max_aspect_ratio) << "\n";
  return kSuccess;
}

void print_record(std::ostream& out, const ConvergenceRecord& r) {
  out << "level " << r.level << " " << method_name(r.method) << " " << mesh_kind_name(r.mesh_kind) << " ny=" << r.ny
      << " dofs=" << r.n_dofs << " vel_h1=" << format_real(r.errors.velocity_h1)
      << " press_l2=" << format_real(r.errors.pressure_l2);
  if (r.observed_rate_velocity) out << " rate_v=" << format_real(*r.observed_rate_velocity);
  if (r.observed_rate_pressure) out << " rate_p=" << format_real(*r.observed_rate_pressure);
  out << " layer_fraction=" << format_real(r.errors.layer_fraction) << " factor=" << r.report.factor_time
      << "s solve=" << r.report.solve_time << "s\n";
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const auto dir = prepare_output(cfg);
  const ExactFields exact(cfg.flow(), make_profile(cfg));
  const StudyConfig study = cfg.study();
  const TriMesh mesh = study_mesh(study, 0, exact.delta());
  const LevelResult res = solve_level(study, exact, mesh, 0);
  const ConvergenceRecord& r = res.records.front();
  const StokesSolution& sol = res.solutions.front();
  write_file(dir / "solve.csv", convergence_csv(res.records));
  const auto div = broken_divergence(sol.velocity);
  const std::vector<CellField> cells{{"err_h1", r.errors.per_element},
                                     {"pressure", sol.pressure.values()},
                                     {"divergence", div}};
  std::ostringstream vtk;
  write_vtk(vtk, mesh, cells);
  write_file(dir / "solution.vtk", vtk.str());
  print_record(out, r);
  return kSuccess;
}

int cmd_convergence(const RunConfig& cfg, std::ostream& out) {
  const auto dir = prepare_output(cfg);
  const ExactFields exact(cfg.flow(), make_profile(cfg));
  const StudyConfig study = cfg.study();
  const auto records = convergence_study(study, exact);
  write_file(dir / "convergence.csv", convergence_csv(records));
  for (const auto& r : records) {
    print_record(out, r);
    const TriMesh mesh = study_mesh(study, r.level, exact.delta());
    const std::vector<CellField> cells{{"err_h1", r.errors.per_element}};
    std::ostringstream vtk;
    write_vtk(vtk, mesh, cells);
    write_file(dir / ("error_" + std::string(method_name(r.method)) + "_" + std::string(mesh_kind_name(r.mesh_kind)) +
                      "_L" + std::to_string(r.level) + ".vtk"),
               vtk.str());
  }
  return kSuccess;
}

int cmd_noflow(const RunConfig& cfg, std::ostream& out) {
  const auto dir = prepare_output(cfg);
  const TriMesh mesh = study_mesh(cfg.study(), 0, layer_width(cfg));
  const double err = noflow_test(mesh, cfg.method, cfg.nu, cubic_potential(), cfg.quad_degree);
  write_file(dir / "noflow.csv", "method,nu,nx,ny,velocity_error\n" + std::string(method_name(cfg.method)) + "," +
                                     format_real(cfg.nu) + "," + std::to_string(mesh.nx()) + "," +
                                     std::to_string(mesh.ny()) + "," + format_real(err) + "\n");
  out << "noflow: method=" << method_name(cfg.method) << " nu=" << format_real(cfg.nu) << " mesh=" << mesh.nx() << "x"
      << mesh.ny() << " velocity_error=" << format_real(err) << "\n";
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string method = std::string(method_name(cfg.method));
  std::string mesh_kind = std::string(mesh_kind_name(cfg.mesh_kind));
  double tau = 0.0;
  std::string dump_path;

  CLI::App app{"Crouzeix-Raviart Stokes solvers and the stagnation-point flow study", "prs"};
  app.fallthrough();
  app.set_config("--config", "", "TOML configuration file (command-line flags take precedence)");
  app.add_option("--nu", cfg.nu, "kinematic viscosity")->capture_default_str();
  app.add_option("--a", cfg.a, "strain rate of the stagnation-point flow")->capture_default_str();
  app.add_option("--p0", cfg.p0, "pressure offset")->capture_default_str();
  app.add_option("--method", method, "cr | cr-rt | cr-bdm")->capture_default_str()->check(
      CLI::IsMember({"cr", "cr-rt", "cr-bdm"}));
  app.add_option("--mesh", mesh_kind, "uniform | shishkin")->capture_default_str()->check(
      CLI::IsMember({"uniform", "shishkin"}));
  app.add_option("--ny0", cfg.ny0, "rows on the coarsest level (nx = 2 ny)")->capture_default_str();
  app.add_option("--levels", cfg.levels, "refinement levels")->capture_default_str();
  app.add_option("--quad-degree", cfg.quad_degree, "load quadrature degree")->capture_default_str();
  app.add_option("--error-quad-degree", cfg.error_quad_degree, "error quadrature degree")->capture_default_str();
  app.add_option("--eta-max", cfg.eta_max, "similarity-variable truncation")->capture_default_str();
  app.add_option("--ode-tol,--tol", cfg.ode_tol, "shooting tolerance")->capture_default_str();
  auto* tau_opt = app.add_option("--tau", tau, "Shishkin transition point (default: layer width)");
  app.add_option("-o,--output-dir", cfg.output_dir, "output directory")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads for quadrature")->capture_default_str();
  app.add_flag("--parallel-levels", cfg.parallel_levels, "solve refinement levels concurrently");
  app.add_option("--dump-config", dump_path, "write the effective configuration as TOML")->configurable(false);

  auto* sc_profile = app.add_subcommand("profile", "tabulate the similarity profile");
  auto* sc_mesh = app.add_subcommand("mesh", "export a mesh and its quality");
  auto* sc_solve = app.add_subcommand("solve", "one solve of the stagnation-point flow");
  auto* sc_conv = app.add_subcommand("convergence", "convergence study of the stagnation-point flow");
  auto* sc_noflow = app.add_subcommand("noflow", "velocity error for a pure gradient forcing");
  app.require_subcommand(1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    cfg.method = parse_method(method);
    cfg.mesh_kind = parse_mesh_kind(mesh_kind);
    if (tau_opt->count() > 0) cfg.tau = tau;
    cfg.validate();
    if (!dump_path.empty()) write_file(dump_path, app.config_to_str(true, false));

    if (sc_profile->parsed()) return cmd_profile(cfg, out);
    if (sc_mesh->parsed()) return cmd_mesh(cfg, out);
    if (sc_solve->parsed()) return cmd_solve(cfg, out);
    if (sc_conv->parsed()) return cmd_convergence(cfg, out);
    if (sc_noflow->parsed()) return cmd_noflow(cfg, out);
    return kConfigError;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace prs::cli
