#include "ubn/bench.hpp"
#include "ubn/mesh_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>

namespace fs = std::filesystem;
using namespace ubn;

namespace {

struct MeshSource {
  std::string mesh;  // Triangle/TetGen base path
  std::string generator = "annulus";
  double r_inner = 0.3;
  double r_outer = 1.0;
  int nodes = 182;
  std::vector<int> cells{6, 6, 24};
  std::vector<double> lengths{24.0, 24.0, 96.0};
  double jitter = 0.0;
  unsigned seed = 1;
  double sliver = 0.0;  // flatness, 0 disables
};

struct SolverFlags {
  double tol_final = 1e-10;
  double tol_intermediate = 1e-3;
  int max_is_iters = 400;
  double min_increment = 0.0005;
  double young = 1.0;
  double poisson = 0.3;
};

struct SolveFlags {
  MeshSource source;
  SolverFlags solver;
  std::string method = "ubn";
  double f = 0.3;
  double pull = 40.0;
  std::vector<double> direction{0.0, 0.0, 1.0};
  double eta = 1.0 / 3.0;
  std::string out_dir = ".";
  bool trace = false;
};

void add_source_options(CLI::App* app, MeshSource& s) {
  app->add_option("--mesh", s.mesh, "Base path of .node/.ele files");
  app->add_option("--generator", s.generator, "annulus or bar when --mesh is absent")
      ->check(CLI::IsMember({"annulus", "bar"}));
  app->add_option("--r-inner", s.r_inner, "Annulus inner radius");
  app->add_option("--r-outer", s.r_outer, "Annulus outer radius");
  app->add_option("--nodes", s.nodes, "Annulus target node count");
  app->add_option("--cells", s.cells, "Bar cells per axis")->expected(3);
  app->add_option("--lengths", s.lengths, "Bar side lengths")->expected(3);
  app->add_option("--jitter", s.jitter, "Bar interior node jitter, fraction of a cell");
  app->add_option("--seed", s.seed, "Bar jitter seed");
  app->add_option("--sliver", s.sliver, "Inject a sliver of this flatness (bar only)");
}

void add_solver_options(CLI::App* app, SolverFlags& s) {
  app->add_option("--tol-final", s.tol_final, "Final Newton tolerance relative to ||F0||");
  app->add_option("--tol-intermediate", s.tol_intermediate,
                  "Continuation tolerance relative to each major iteration's start");
  app->add_option("--max-is-iters", s.max_is_iters, "Iterative stiffening cap");
  app->add_option("--min-increment", s.min_increment, "Smallest continuation increment");
  app->add_option("--young", s.young, "Young's modulus");
  app->add_option("--poisson", s.poisson, "Poisson ratio");
}

Vec direction_vector(const std::vector<double>& d) {
  Vec v = Eigen::Vector3d(d[0], d[1], d[2]);
  if (!(v.norm() > 0.0)) throw ArgumentError("--direction must be nonzero");
  return v.normalized();
}

ReferenceMesh build_mesh(const MeshSource& s, const Vec& pull_direction) {
  if (!s.mesh.empty()) return read_triangle_files(s.mesh);
  if (s.generator == "annulus") return generate_annulus(s.r_inner, s.r_outer, s.nodes);
  BarSpec spec;
  std::copy(s.cells.begin(), s.cells.end(), spec.cells.begin());
  std::copy(s.lengths.begin(), s.lengths.end(), spec.lengths.begin());
  spec.jitter = s.jitter;
  spec.seed = s.seed;
  ReferenceMesh mesh = generate_bar(spec);
  if (s.sliver > 0.0) {
    SliverSpec sliver;
    sliver.flatness = s.sliver;
    sliver.pull_direction = pull_direction;
    mesh = inject_sliver(mesh, sliver).mesh;
  }
  return mesh;
}

MaterialParams material(const SolverFlags& s) { return lame_from_young_poisson(s.young, s.poisson); }

UbnOptions ubn_options(const SolverFlags& s) {
  UbnOptions o;
  o.untangle.max_iters = s.max_is_iters;
  o.newton.tol_rel = s.tol_final;
  return o;
}

ContinuationConfig continuation_config(const SolverFlags& s, double eta) {
  ContinuationConfig c;
  c.eta = eta;
  c.final_tol = s.tol_final;
  c.intermediate_tol = s.tol_intermediate;
  c.min_increment = s.min_increment;
  return c;
}

bool is_annulus(const ReferenceMesh& mesh) {
  if (mesh.dim() != 2) return false;
  try {
    annulus_dirichlet(mesh, 0.0);
    return true;
  } catch (const ClassificationError&) {
    return false;
  }
}

void write_mesh_artifact(const fs::path& dir, const std::string& stem, const ReferenceMesh& mesh,
                         const DisplacementField& u) {
  if (mesh.dim() == 2) {
    std::ofstream os(dir / (stem + ".svg"));
    write_svg(os, mesh, u);
  } else {
    std::ofstream os(dir / (stem + ".vtk"));
    write_vtk(os, mesh, u);
  }
}

int run_solve(const SolveFlags& flags) {
  const Vec dir = direction_vector(flags.direction);
  const ReferenceMesh mesh = build_mesh(flags.source, dir);
  const MaterialParams p = material(flags.solver);
  const fs::path out = flags.out_dir;
  fs::create_directories(out);

  const bool annulus = is_annulus(mesh);
  const DirichletSpec bc = annulus ? annulus_dirichlet(mesh, flags.f)
                                   : pull_dirichlet(mesh, kFixedFaceMarker, kPulledFaceMarker,
                                                    flags.pull * dir.head(mesh.dim()));
  const double parameter = annulus ? flags.f : flags.pull;

  std::unique_ptr<std::ofstream> trace;
  if (flags.trace) trace = std::make_unique<std::ofstream>(out / (flags.method + "_trace.csv"));

  SolveReport report;
  if (flags.method == "ubn") {
    UbnOptions o = ubn_options(flags.solver);
    o.newton.trace = trace.get();
    report = ubn_solve(mesh, bc, p, {}, o);
  } else {
    ContinuationConfig c = continuation_config(flags.solver, flags.eta);
    c.trace = trace.get();
    const LoadPath path = annulus ? make_annulus_polar_path(mesh, flags.f)
                                  : make_linear_path(mesh, bc);
    report = continuation_solve(mesh, path, p, c);
  }

  {
    std::ofstream csv(out / "results.csv");
    csv << report_csv_header() << '\n' << report_csv_row(flags.method, parameter, report) << '\n';
  }
  write_mesh_artifact(out, "deformed", mesh, report.final_u);

  std::cout << flags.method << " on " << mesh.num_nodes() << " nodes, " << mesh.num_elements()
            << " elements: " << to_string(report.status) << '\n'
            << "  IS " << report.is_iterations << ", NM " << report.newton_iterations;
  if (flags.method != "ubn") std::cout << ", MajIt " << report.major_iterations;
  std::cout << ", ALS " << report.als_steps << ", lambda " << report.final_lambda << '\n';
  if (!report.message.empty()) std::cout << "  " << report.message << '\n';
  return exit_code(report.status);
}

int run_check_mesh(const std::string& base) {
  const ReferenceMesh mesh = read_triangle_files(base);
  int counts[3] = {0, 0, 0};
  std::set<int> groups;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    ++counts[static_cast<int>(mesh.node_class(i))];
    if (mesh.marker(i) != 0) groups.insert(mesh.marker(i));
  }
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    vmin = std::min(vmin, mesh.reference_volume(e));
    vmax = std::max(vmax, mesh.reference_volume(e));
  }
  std::cout << "dimension " << mesh.dim() << '\n'
            << "nodes " << mesh.num_nodes() << " (interior " << counts[0] << ", neumann "
            << counts[1] << ", dirichlet " << counts[2] << ")\n"
            << "elements " << mesh.num_elements() << ", volume min " << vmin << " max " << vmax
            << '\n'
            << "boundary facets " << mesh.boundary_facets().size() << '\n'
            << "dirichlet groups";
  for (int g : groups) std::cout << ' ' << g;
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Untangling-before-Newton hyperelastic solver"};
  app.set_config("--config", "", "Key-value config file; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);

  SolveFlags solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one boundary value problem");
  add_source_options(solve_cmd, solve.source);
  add_solver_options(solve_cmd, solve.solver);
  solve_cmd->add_option("--method", solve.method, "ubn or continuation")
      ->check(CLI::IsMember({"ubn", "continuation"}));
  solve_cmd->add_option("--f", solve.f, "Annulus deformation amount");
  solve_cmd->add_option("--pull", solve.pull, "Pull magnitude for 3D meshes");
  solve_cmd->add_option("--direction", solve.direction, "Pull direction")->expected(3);
  solve_cmd->add_option("--eta", solve.eta, "Continuation step parameter");
  solve_cmd->add_option("--out-dir", solve.out_dir, "Output directory");
  solve_cmd->add_flag("--trace", solve.trace, "Write a per-iteration trace CSV");

  MeshSource annulus_src;
  SolverFlags annulus_solver;
  std::vector<double> annulus_f{0.1, 0.3, 0.6, 0.7};
  std::vector<double> annulus_eta{1.0 / 3.0, 1.2};
  std::string annulus_out = ".";
  auto* annulus_cmd = app.add_subcommand("bench-annulus", "Annulus f sweep, UBN vs continuation");
  annulus_cmd->add_option("--r-inner", annulus_src.r_inner, "Inner radius");
  annulus_cmd->add_option("--r-outer", annulus_src.r_outer, "Outer radius");
  annulus_cmd->add_option("--nodes", annulus_src.nodes, "Target node count");
  add_solver_options(annulus_cmd, annulus_solver);
  annulus_cmd->add_option("--f", annulus_f, "Deformation amounts")->delimiter(',');
  annulus_cmd->add_option("--eta", annulus_eta, "Continuation step parameters")->delimiter(',');
  annulus_cmd->add_option("--out-dir", annulus_out, "Output directory");

  MeshSource bar_src;
  bar_src.generator = "bar";
  SolverFlags bar_solver;
  std::vector<double> pulls{40.0};
  std::vector<double> bar_eta{1.0 / 3.0, 1.2};
  std::vector<double> bar_dir{0.0, 0.0, 1.0};
  std::string bar_out = ".";
  auto* bench3d_cmd = app.add_subcommand("bench-3d", "3D pull test, UBN vs continuation");
  add_source_options(bench3d_cmd, bar_src);
  add_solver_options(bench3d_cmd, bar_solver);
  bench3d_cmd->add_option("--pull", pulls, "Pull magnitudes")->delimiter(',');
  bench3d_cmd->add_option("--eta", bar_eta, "Continuation step parameters")->delimiter(',');
  bench3d_cmd->add_option("--direction", bar_dir, "Pull direction")->expected(3);
  bench3d_cmd->add_option("--out-dir", bar_out, "Output directory");

  MeshSource gen_annulus_src;
  std::string gen_annulus_out = "annulus";
  auto* gen_annulus_cmd = app.add_subcommand("gen-annulus", "Write an annulus mesh");
  gen_annulus_cmd->add_option("--r-inner", gen_annulus_src.r_inner, "Inner radius");
  gen_annulus_cmd->add_option("--r-outer", gen_annulus_src.r_outer, "Outer radius");
  gen_annulus_cmd->add_option("--nodes", gen_annulus_src.nodes, "Target node count");
  gen_annulus_cmd->add_option("--out", gen_annulus_out, "Output base path");

  MeshSource gen_bar_src;
  gen_bar_src.generator = "bar";
  std::vector<double> gen_bar_dir{1.0, 0.0, 1.0};
  std::string gen_bar_out = "bar";
  auto* gen_bar_cmd = app.add_subcommand("gen-bar", "Write a tetrahedral bar mesh");
  gen_bar_cmd->add_option("--cells", gen_bar_src.cells, "Cells per axis")->expected(3);
  gen_bar_cmd->add_option("--lengths", gen_bar_src.lengths, "Side lengths")->expected(3);
  gen_bar_cmd->add_option("--jitter", gen_bar_src.jitter, "Interior node jitter");
  gen_bar_cmd->add_option("--seed", gen_bar_src.seed, "Jitter seed");
  gen_bar_cmd->add_option("--sliver", gen_bar_src.sliver, "Sliver flatness, 0 disables");
  gen_bar_cmd->add_option("--direction", gen_bar_dir, "Pull direction the sliver targets")
      ->expected(3);
  gen_bar_cmd->add_option("--out", gen_bar_out, "Output base path");

  std::string check_base;
  auto* check_cmd = app.add_subcommand("check-mesh", "Parse and summarize a mesh");
  check_cmd->add_option("--mesh", check_base, "Base path of .node/.ele files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return run_solve(solve);

    if (*annulus_cmd) {
      AnnulusBenchConfig cfg;
      cfg.r_inner = annulus_src.r_inner;
      cfg.r_outer = annulus_src.r_outer;
      cfg.target_nodes = annulus_src.nodes;
      cfg.f_values = annulus_f;
      cfg.etas = annulus_eta;
      cfg.material = material(annulus_solver);
      cfg.ubn = ubn_options(annulus_solver);
      cfg.continuation = continuation_config(annulus_solver, 1.0 / 3.0);
      cfg.figure_dir = fs::path(annulus_out);
      const ReferenceMesh mesh = annulus_bench_mesh(cfg);
      const auto rows = run_annulus_bench(mesh, cfg);
      std::ofstream csv(fs::path(annulus_out) / "results.csv");
      write_annulus_csv(csv, rows, cfg.etas);
      write_annulus_csv(std::cout, rows, cfg.etas);
      return 0;
    }

    if (*bench3d_cmd) {
      Bench3dConfig cfg;
      cfg.magnitudes = pulls;
      cfg.etas = bar_eta;
      cfg.direction = direction_vector(bar_dir);
      cfg.material = material(bar_solver);
      cfg.ubn = ubn_options(bar_solver);
      cfg.continuation = continuation_config(bar_solver, 1.0 / 3.0);
      const ReferenceMesh mesh = build_mesh(bar_src, cfg.direction);
      const auto rows = run_bench_3d(mesh, cfg);
      fs::create_directories(bar_out);
      std::ofstream csv(fs::path(bar_out) / "results.csv");
      write_3d_csv(csv, rows, cfg.etas);
      write_3d_csv(std::cout, rows, cfg.etas);
      for (const auto& row : rows) {
        std::ostringstream stem;
        stem << "bar_pull" << row.parameter;
        write_mesh_artifact(bar_out, stem.str(), mesh, row.ubn.final_u);
      }
      return 0;
    }

    if (*gen_annulus_cmd) {
      const ReferenceMesh mesh =
          generate_annulus(gen_annulus_src.r_inner, gen_annulus_src.r_outer, gen_annulus_src.nodes);
      write_triangle_files(mesh, gen_annulus_out);
      std::cout << mesh.num_nodes() << " nodes, " << mesh.num_elements() << " triangles\n";
      return 0;
    }

    if (*gen_bar_cmd) {
      const ReferenceMesh mesh = build_mesh(gen_bar_src, direction_vector(gen_bar_dir));
      write_triangle_files(mesh, gen_bar_out);
      std::cout << mesh.num_nodes() << " nodes, " << mesh.num_elements() << " tetrahedra\n";
      return 0;
    }

    if (*check_cmd) return run_check_mesh(check_base);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
