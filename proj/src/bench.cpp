#include "ubn/bench.hpp"

#include "ubn/mesh_io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace ubn {

int exit_code(SolveStatus status) { return status == SolveStatus::Converged ? 0 : 2; }

std::string table_cell(const SolveReport& report) {
  switch (report.status) {
    case SolveStatus::Converged: return std::to_string(report.als_steps);
    case SolveStatus::ContinuationStalled: return "---";
    case SolveStatus::InvertedAfterMajorIteration: return "***";
    default: return std::string(to_string(report.status));
  }
}

namespace {

std::string eta_label(double eta) {
  std::ostringstream os;
  os.precision(4);
  os << eta;
  return os.str();
}

}  // namespace

ReferenceMesh annulus_bench_mesh(const AnnulusBenchConfig& cfg) {
  return generate_annulus(cfg.r_inner, cfg.r_outer, cfg.target_nodes);
}

std::vector<BenchRow> run_annulus_bench(const ReferenceMesh& mesh, const AnnulusBenchConfig& cfg) {
  std::vector<BenchRow> rows;
  for (double f : cfg.f_values) {
    BenchRow row;
    row.parameter = f;
    row.ubn = ubn_solve(mesh, annulus_dirichlet(mesh, f), cfg.material, {}, cfg.ubn);
    const LoadPath path = make_annulus_polar_path(mesh, f);
    for (double eta : cfg.etas) {
      ContinuationConfig c = cfg.continuation;
      c.eta = eta;
      row.continuation.push_back(continuation_solve(mesh, path, cfg.material, c));
    }
    if (cfg.figure_dir) {
      std::filesystem::create_directories(*cfg.figure_dir);
      std::ostringstream name;
      name << "annulus_f" << f << ".svg";
      std::ofstream svg(*cfg.figure_dir / name.str());
      write_svg(svg, mesh, row.ubn.final_u);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_annulus_csv(std::ostream& os, const std::vector<BenchRow>& rows,
                       const std::vector<double>& etas) {
  os << "f,UBN-IS,UBN-NM,UBN-ALS,UBN-status";
  for (double eta : etas) {
    const std::string e = eta_label(eta);
    os << ",MajIt(eta=" << e << "),ALS(eta=" << e << "),status(eta=" << e << ")";
  }
  os << '\n';
  for (const auto& row : rows) {
    os << row.parameter << ',' << row.ubn.is_iterations << ',' << row.ubn.newton_iterations << ','
       << row.ubn.als_steps << ',' << to_string(row.ubn.status);
    for (const auto& c : row.continuation)
      os << ',' << c.major_iterations << ',' << c.als_steps << ',' << to_string(c.status);
    os << '\n';
  }
}

std::vector<BenchRow> run_bench_3d(const ReferenceMesh& mesh, const Bench3dConfig& cfg) {
  if (mesh.dim() != 3) throw ArgumentError("3D benchmark needs a tetrahedral mesh");
  std::vector<BenchRow> rows;
  for (double magnitude : cfg.magnitudes) {
    BenchRow row;
    row.parameter = magnitude;
    const Vec disp = magnitude * cfg.direction.normalized();
    const DirichletSpec bc = pull_dirichlet(mesh, cfg.fixed_marker, cfg.pulled_marker, disp);
    row.ubn = ubn_solve(mesh, bc, cfg.material, {}, cfg.ubn);
    const LoadPath path = make_linear_path(mesh, bc);
    for (double eta : cfg.etas) {
      ContinuationConfig c = cfg.continuation;
      c.eta = eta;
      row.continuation.push_back(continuation_solve(mesh, path, cfg.material, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_3d_csv(std::ostream& os, const std::vector<BenchRow>& rows,
                  const std::vector<double>& etas) {
  os << "pull,UBN-IS,UBN-NM,UBN-ALS";
  for (double eta : etas) {
    const std::string e = eta_label(eta);
    os << ",MajIt(eta=" << e << "),ALS(eta=" << e << ")";
  }
  os << '\n';
  for (const auto& row : rows) {
    os << row.parameter << ',' << row.ubn.is_iterations << ',' << row.ubn.newton_iterations << ','
       << table_cell(row.ubn);
    for (const auto& c : row.continuation) {
      const std::string cell = table_cell(c);
      const bool failed = c.status != SolveStatus::Converged;
      os << ',' << (failed ? cell : std::to_string(c.major_iterations)) << ',' << cell;
    }
    os << '\n';
  }
}

std::string report_csv_header() {
  return "method,parameter,status,is_iterations,newton_iterations,major_iterations,als_steps,"
         "line_search_active,final_lambda,initial_residual,final_residual";
}

std::string report_csv_row(std::string_view method, double parameter, const SolveReport& r) {
  std::ostringstream os;
  os.precision(10);
  const double final_residual = r.residual_history.empty() ? 0.0 : r.residual_history.back();
  os << method << ',' << parameter << ',' << to_string(r.status) << ',' << r.is_iterations << ','
     << r.newton_iterations << ',' << r.major_iterations << ',' << r.als_steps << ','
     << r.line_search_active << ',' << r.final_lambda << ',' << r.initial_residual << ','
     << final_residual;
  return os.str();
}

}  // namespace ubn
