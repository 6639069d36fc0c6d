#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "prescription.h"

namespace polarfield {

// JSON schema of a prescription:
//   {
//     "N": 1,
//     "singularities": [
//       {"type": "vertex", "element": 12, "index": 1},
//       {"type": "edge", "element": 40, "t": 0.25, "index": -1},
//       {"type": "face", "element": 7, "bary": [0.2, 0.3, 0.5], "index": 2}
//     ],
//     "homology": [0, 0],
//     "boundary": []
//   }
// "homology" and "boundary" may be omitted; absent or empty lists stand for
// all-zero indices once the mesh says how many are needed.

inline Prescription prescription_from_json(const nlohmann::json& j) {
  Prescription p;
  try {
    if (!j.is_object())
      throw PrescriptionError("OutOfRangeParameter: prescription must be a "
                              "JSON object");
    p.N = j.value("N", 1);
    if (j.contains("singularities")) {
      for (const nlohmann::json& js : j.at("singularities")) {
        Singularity s;
        std::string type = js.at("type").get<std::string>();
        if (type == "vertex") {
          s.kind = Singularity::Kind::Vertex;
        } else if (type == "edge") {
          s.kind = Singularity::Kind::Edge;
          s.t = js.value("t", 0.5);
        } else if (type == "face") {
          s.kind = Singularity::Kind::Face;
          if (js.contains("bary")) {
            const nlohmann::json& jb = js.at("bary");
            if (!jb.is_array() || jb.size() != 3)
              throw PrescriptionError(
                  "OutOfRangeParameter: bary must hold three numbers");
            for (int c = 0; c < 3; ++c) s.bary[c] = jb[c].get<double>();
          }
        } else {
          throw PrescriptionError("OutOfRangeParameter: unknown singularity "
                                  "type \"" +
                                  type + "\"");
        }
        s.element = js.at("element").get<int>();
        s.index = js.at("index").get<int>();
        p.singularities.push_back(s);
      }
    }
    if (j.contains("homology"))
      p.homology = j.at("homology").get<std::vector<int>>();
    if (j.contains("boundary"))
      p.boundary = j.at("boundary").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& ex) {
    throw PrescriptionError(std::string("OutOfRangeParameter: ") + ex.what());
  }
  return p;
}

inline nlohmann::json prescription_to_json(const Prescription& p) {
  nlohmann::json j;
  j["N"] = p.N;
  j["singularities"] = nlohmann::json::array();
  for (const Singularity& s : p.singularities) {
    nlohmann::json js;
    js["type"] = detail::kind_name(s.kind);
    js["element"] = s.element;
    js["index"] = s.index;
    if (s.kind == Singularity::Kind::Edge) js["t"] = s.t;
    if (s.kind == Singularity::Kind::Face)
      js["bary"] = {s.bary[0], s.bary[1], s.bary[2]};
    j["singularities"].push_back(js);
  }
  j["homology"] = p.homology;
  j["boundary"] = p.boundary;
  return j;
}

inline Prescription read_prescription(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("FileOpen: cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("FileParse: " + path + ": " + ex.what());
  }
  return prescription_from_json(j);
}

inline void write_prescription(const std::string& path,
                               const Prescription& p) {
  std::ofstream out(path);
  if (!out) throw IoError("FileOpen: cannot write " + path);
  out << prescription_to_json(p).dump(2) << "\n";
}

// Expands absent or empty topology index lists to explicit zeros once the
// counts are known from the mesh.
inline void fill_default_indices(Prescription& p, int n_generators,
                                 int n_boundary_loops) {
  if (p.homology.empty()) p.homology.assign(size_t(n_generators), 0);
  if (p.boundary.empty()) p.boundary.assign(size_t(n_boundary_loops), 0);
}

}  // namespace polarfield
