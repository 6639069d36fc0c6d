#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "surface_mesh.h"

namespace polarfield {

// Wavefront OBJ, triangles only. Indices are 1-based in the file and converted
// to 0-based here; v/vt/vn references keep only the vertex index.
inline void read_obj(const std::string& path, Eigen::MatrixXd& V, Eigen::MatrixXi& F) {
  std::ifstream in(path);
  if (!in) throw IoError("FileNotFound: " + path);
  std::vector<Vec3> verts;
  std::vector<Eigen::Vector3i> faces;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p(0) >> p(1) >> p(2))) throw IoError("ParseError: bad vertex, line " + std::to_string(lineno));
      verts.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        size_t slash = tok.find('/');
        if (slash != std::string::npos) tok = tok.substr(0, slash);
        int i = std::stoi(tok);
        if (i <= 0 || i > static_cast<int>(verts.size()))
          throw IoError("ParseError: face index out of range, line " + std::to_string(lineno));
        idx.push_back(i - 1);
      }
      if (idx.size() != 3) throw IoError("TriangleOnly: non-triangle face, line " + std::to_string(lineno));
      faces.emplace_back(idx[0], idx[1], idx[2]);
    }
  }
  V.resize(static_cast<int>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i) V.row(static_cast<int>(i)) = verts[i];
  F.resize(static_cast<int>(faces.size()), 3);
  for (size_t i = 0; i < faces.size(); ++i) F.row(static_cast<int>(i)) = faces[i];
}

inline void read_off(const std::string& path, Eigen::MatrixXd& V, Eigen::MatrixXi& F) {
  std::ifstream in(path);
  if (!in) throw IoError("FileNotFound: " + path);
  std::string header;
  in >> header;
  if (header != "OFF") throw IoError("ParseError: missing OFF header in " + path);
  int nv = 0, nf = 0, ne = 0;
  if (!(in >> nv >> nf >> ne)) throw IoError("ParseError: bad OFF counts in " + path);
  V.resize(nv, 3);
  for (int i = 0; i < nv; ++i)
    if (!(in >> V(i, 0) >> V(i, 1) >> V(i, 2))) throw IoError("ParseError: bad OFF vertex in " + path);
  F.resize(nf, 3);
  for (int i = 0; i < nf; ++i) {
    int deg;
    if (!(in >> deg)) throw IoError("ParseError: bad OFF face in " + path);
    if (deg != 3) throw IoError("TriangleOnly: non-triangle face in " + path);
    for (int s = 0; s < 3; ++s) {
      if (!(in >> F(i, s))) throw IoError("ParseError: bad OFF face in " + path);
      if (F(i, s) < 0 || F(i, s) >= nv) throw IoError("ParseError: OFF face index out of range in " + path);
    }
  }
}

inline SurfaceMesh load_mesh(const std::string& path) {
  Eigen::MatrixXd V;
  Eigen::MatrixXi F;
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "obj" || ext == "OBJ")
    read_obj(path, V, F);
  else if (ext == "off" || ext == "OFF")
    read_off(path, V, F);
  else
    throw IoError("UnknownFormat: expected .obj or .off, got " + path);
  return build_mesh(V, F);
}

inline void write_obj(const std::string& path, const Eigen::MatrixXd& V, const Eigen::MatrixXi& F) {
  std::ofstream out(path);
  if (!out) throw IoError("WriteError: " + path);
  out.precision(17);
  for (int i = 0; i < V.rows(); ++i) out << "v " << V(i, 0) << " " << V(i, 1) << " " << V(i, 2) << "\n";
  for (int f = 0; f < F.rows(); ++f) out << "f " << F(f, 0) + 1 << " " << F(f, 1) + 1 << " " << F(f, 2) + 1 << "\n";
}

}  // namespace polarfield
