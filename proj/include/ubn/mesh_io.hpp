#pragma once

#include "ubn/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace ubn {

/// Parses Triangle/TetGen style .node and .ele text.
///
/// .node: "N d nattr nmarker" then "idx x y [z] [attrs...] [marker]".
/// .ele:  "M nvert nattr" then "idx v0 v1 v2 [v3] [attrs...]".
/// Lines starting with '#' and blank lines are ignored. Indexing may be
/// 0- or 1-based; the base is taken from the first node index. The node
/// marker column becomes the node marker (0 = unconstrained).
///
/// Throws ParseError (naming the line) on malformed text and
/// ValidationError on out-of-range indices or degenerate elements.
ReferenceMesh load_triangle_mesh(std::string_view node_text, std::string_view ele_text);

/// Reads `<base>.node` and `<base>.ele`.
ReferenceMesh read_triangle_files(const std::filesystem::path& base);

struct TriangleText {
  std::string node;
  std::string ele;
};

/// 0-based output with the header "N d 0 1" and "M d+1 0". Coordinates are
/// written with 17 significant digits so reading back is exact.
TriangleText write_triangle_mesh(const ReferenceMesh& mesh);
void write_triangle_files(const ReferenceMesh& mesh, const std::filesystem::path& base);

/// VTK legacy ASCII unstructured grid of the deformed mesh, with the
/// displacement as point data and det(F) as cell data.
void write_vtk(std::ostream& os, const ReferenceMesh& mesh, const DisplacementField& u);

/// SVG drawing of a deformed 2D mesh; inverted triangles are filled red.
void write_svg(std::ostream& os, const ReferenceMesh& mesh, const DisplacementField& u);

}  // namespace ubn
