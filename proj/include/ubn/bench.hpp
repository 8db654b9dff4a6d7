#pragma once

#include "ubn/continuation.hpp"
#include "ubn/mesh_gen.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ubn {

/// 0 for Converged, 2 for every solver failure. Input errors (exit 1) are
/// the caller's business.
int exit_code(SolveStatus status);

/// ALS count, or "---" for a stalled continuation and "***" for one that
/// ended with inverted elements. Other failures print the status name.
std::string table_cell(const SolveReport& report);

struct AnnulusBenchConfig {
  double r_inner = 0.3;
  double r_outer = 1.0;
  int target_nodes = 182;
  std::vector<double> f_values{0.1, 0.3, 0.6, 0.7};
  std::vector<double> etas{1.0 / 3.0, 1.2};
  MaterialParams material = lame_from_young_poisson(1.0, 0.3);
  UbnOptions ubn;
  ContinuationConfig continuation;
  /// When set, deformed UBN meshes are written here as annulus_f<f>.svg.
  std::optional<std::filesystem::path> figure_dir;
};

struct BenchRow {
  double parameter = 0.0;  // f for the annulus, pull magnitude in 3D
  SolveReport ubn;
  std::vector<SolveReport> continuation;  // one per eta
};

/// generate_annulus(r_inner, r_outer, target_nodes).
ReferenceMesh annulus_bench_mesh(const AnnulusBenchConfig& cfg);

std::vector<BenchRow> run_annulus_bench(const ReferenceMesh& mesh, const AnnulusBenchConfig& cfg);

/// Columns f,UBN-IS,UBN-NM,UBN-ALS,UBN-status then MajIt/ALS/status per eta.
void write_annulus_csv(std::ostream& os, const std::vector<BenchRow>& rows,
                       const std::vector<double>& etas);

struct Bench3dConfig {
  std::vector<double> magnitudes{40.0};
  std::vector<double> etas{1.0 / 3.0, 1.2};
  Vec direction = Eigen::Vector3d(0.0, 0.0, 1.0);
  int fixed_marker = kFixedFaceMarker;
  int pulled_marker = kPulledFaceMarker;
  MaterialParams material = lame_from_young_poisson(1.0, 0.3);
  UbnOptions ubn;
  ContinuationConfig continuation;
};

/// One row per pull magnitude; continuation follows the linear path.
std::vector<BenchRow> run_bench_3d(const ReferenceMesh& mesh, const Bench3dConfig& cfg);

/// Columns pull,UBN-IS,UBN-NM,UBN-ALS then MajIt/ALS per eta, with
/// continuation failures rendered by table_cell.
void write_3d_csv(std::ostream& os, const std::vector<BenchRow>& rows,
                  const std::vector<double>& etas);

/// One results.csv row for a single solve.
std::string report_csv_header();
std::string report_csv_row(std::string_view method, double parameter, const SolveReport& r);

}  // namespace ubn
