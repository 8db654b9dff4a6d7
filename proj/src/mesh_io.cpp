#include "ubn/mesh_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace ubn {

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Line line{number, {}};
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void fail(std::string_view file, int line, std::string_view what) {
  std::ostringstream msg;
  msg << file << " line " << line << ": " << what;
  throw ParseError(msg.str());
}

long parse_int(std::string_view file, const Line& line, std::size_t k) {
  if (k >= line.tokens.size()) fail(file, line.number, "missing field");
  const std::string& s = line.tokens[k];
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    fail(file, line.number, "expected an integer, got '" + s + "'");
  }
  if (used != s.size()) fail(file, line.number, "expected an integer, got '" + s + "'");
  return v;
}

double parse_double(std::string_view file, const Line& line, std::size_t k) {
  if (k >= line.tokens.size()) fail(file, line.number, "missing field");
  const std::string& s = line.tokens[k];
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(file, line.number, "expected a number, got '" + s + "'");
  }
  if (used != s.size()) fail(file, line.number, "expected a number, got '" + s + "'");
  return v;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ReferenceMesh load_triangle_mesh(std::string_view node_text, std::string_view ele_text) {
  const auto nodes = tokenize(node_text);
  if (nodes.empty()) throw ParseError(".node: empty file");
  const auto& head = nodes.front();
  const long n = parse_int(".node", head, 0);
  const long dim = parse_int(".node", head, 1);
  const long nattr = head.tokens.size() > 2 ? parse_int(".node", head, 2) : 0;
  const long nmark = head.tokens.size() > 3 ? parse_int(".node", head, 3) : 0;
  if (dim != 2 && dim != 3) fail(".node", head.number, "dimension must be 2 or 3");
  if (n < 0 || nattr < 0 || nmark < 0 || nmark > 1) fail(".node", head.number, "bad header");
  if (static_cast<long>(nodes.size()) - 1 != n) {
    std::ostringstream msg;
    msg << "header declares " << n << " nodes but " << nodes.size() - 1 << " node lines follow";
    fail(".node", head.number, msg.str());
  }

  Eigen::MatrixXd coords(dim, n);
  std::vector<int> markers(n, 0);
  long base = 0;
  for (long i = 0; i < n; ++i) {
    const Line& line = nodes[i + 1];
    const std::size_t expected = 1 + dim + nattr + nmark;
    if (line.tokens.size() != expected) {
      std::ostringstream msg;
      msg << "expected " << expected << " fields, found " << line.tokens.size();
      fail(".node", line.number, msg.str());
    }
    const long idx = parse_int(".node", line, 0);
    if (i == 0) {
      if (idx != 0 && idx != 1) fail(".node", line.number, "first node index must be 0 or 1");
      base = idx;
    }
    if (idx != i + base) fail(".node", line.number, "node indices must be consecutive");
    for (long c = 0; c < dim; ++c) coords(c, i) = parse_double(".node", line, 1 + c);
    if (nmark) markers[i] = static_cast<int>(parse_int(".node", line, 1 + dim + nattr));
  }

  const auto eles = tokenize(ele_text);
  if (eles.empty()) throw ParseError(".ele: empty file");
  const auto& ehead = eles.front();
  const long m = parse_int(".ele", ehead, 0);
  const long nv = parse_int(".ele", ehead, 1);
  const long eattr = ehead.tokens.size() > 2 ? parse_int(".ele", ehead, 2) : 0;
  if (nv != dim + 1) fail(".ele", ehead.number, "only linear simplices (d+1 vertices) are supported");
  if (static_cast<long>(eles.size()) - 1 != m) {
    std::ostringstream msg;
    msg << "header declares " << m << " elements but " << eles.size() - 1 << " element lines follow";
    fail(".ele", ehead.number, msg.str());
  }
  std::vector<int> conn;
  conn.reserve(m * nv);
  for (long e = 0; e < m; ++e) {
    const Line& line = eles[e + 1];
    if (static_cast<long>(line.tokens.size()) != 1 + nv + eattr) {
      std::ostringstream msg;
      msg << "expected " << 1 + nv + eattr << " fields, found " << line.tokens.size();
      fail(".ele", line.number, msg.str());
    }
    for (long a = 0; a < nv; ++a) {
      const long v = parse_int(".ele", line, 1 + a) - base;
      if (v < 0 || v >= n) {
        std::ostringstream msg;
        msg << ".ele line " << line.number << ": node index " << v + base << " out of range";
        throw ValidationError(msg.str());
      }
      conn.push_back(static_cast<int>(v));
    }
  }
  return ReferenceMesh(static_cast<int>(dim), std::move(coords), std::move(conn), std::move(markers));
}

ReferenceMesh read_triangle_files(const std::filesystem::path& base) {
  auto node = base;
  node += ".node";
  auto ele = base;
  ele += ".ele";
  return load_triangle_mesh(read_file(node), read_file(ele));
}

TriangleText write_triangle_mesh(const ReferenceMesh& mesh) {
  const int d = mesh.dim();
  std::ostringstream node;
  node << std::setprecision(17);
  node << mesh.num_nodes() << ' ' << d << " 0 1\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    node << i;
    for (int c = 0; c < d; ++c) node << ' ' << mesh.node(i)[c];
    node << ' ' << mesh.marker(i) << '\n';
  }
  std::ostringstream ele;
  ele << mesh.num_elements() << ' ' << d + 1 << " 0\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    ele << e;
    for (int v : mesh.element(e)) ele << ' ' << v;
    ele << '\n';
  }
  return {node.str(), ele.str()};
}

void write_triangle_files(const ReferenceMesh& mesh, const std::filesystem::path& base) {
  const auto text = write_triangle_mesh(mesh);
  auto node = base;
  node += ".node";
  auto ele = base;
  ele += ".ele";
  std::ofstream(node) << text.node;
  std::ofstream(ele) << text.ele;
}

void write_vtk(std::ostream& os, const ReferenceMesh& mesh, const DisplacementField& u) {
  const int d = mesh.dim();
  const Eigen::MatrixXd x = deformed_positions(mesh, u);
  const auto dets = element_determinants(mesh, x);
  os << std::setprecision(12);
  os << "# vtk DataFile Version 3.0\n"
     << "deformed mesh\n"
     << "ASCII\n"
     << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (int i = 0; i < mesh.num_nodes(); ++i)
    os << x(0, i) << ' ' << x(1, i) << ' ' << (d == 3 ? x(2, i) : 0.0) << '\n';
  const int ne = mesh.num_elements();
  os << "CELLS " << ne << ' ' << ne * (d + 2) << '\n';
  for (int e = 0; e < ne; ++e) {
    os << d + 1;
    for (int v : mesh.element(e)) os << ' ' << v;
    os << '\n';
  }
  os << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) os << (d == 3 ? 10 : 5) << '\n';
  os << "POINT_DATA " << mesh.num_nodes() << '\n'
     << "VECTORS displacement double\n";
  for (int i = 0; i < mesh.num_nodes(); ++i)
    os << u.values(0, i) << ' ' << u.values(1, i) << ' ' << (d == 3 ? u.values(2, i) : 0.0) << '\n';
  os << "CELL_DATA " << ne << '\n'
     << "SCALARS detF double 1\n"
     << "LOOKUP_TABLE default\n";
  for (double j : dets) os << j << '\n';
}

void write_svg(std::ostream& os, const ReferenceMesh& mesh, const DisplacementField& u) {
  if (mesh.dim() != 2) throw ArgumentError("SVG output is for 2D meshes");
  const Eigen::MatrixXd x = deformed_positions(mesh, u);
  const auto dets = element_determinants(mesh, x);
  const Eigen::Vector2d lo = x.rowwise().minCoeff();
  const Eigen::Vector2d hi = x.rowwise().maxCoeff();
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-300});
  const double size = 600.0;
  const double margin = 10.0;
  const double scale = (size - 2 * margin) / span;
  auto px = [&](int i) { return margin + (x(0, i) - lo.x()) * scale; };
  auto py = [&](int i) { return size - margin - (x(1, i) - lo.y()) * scale; };
  os << std::fixed << std::setprecision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto conn = mesh.element(e);
    os << "<polygon points=\"";
    for (int v : conn) os << px(v) << ',' << py(v) << ' ';
    os << "\" fill=\"" << (dets[e] <= 0.0 ? "#e04040" : "#dde8f4")
       << "\" stroke=\"#203050\" stroke-width=\"0.6\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace ubn
