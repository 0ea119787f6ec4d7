#pragma once
// OBJ subset (`v x1 x2 x3`, `f i j k`, 1-based, `#` comments) and per-vertex
// scalar CSV (`vertex_index,value`).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdgeom/error.hpp"
#include "sdgeom/surface.hpp"

namespace sdgeom {

// 17 significant digits: round-trips every double.
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_obj(std::ostream& os, const TriMesh& m) {
    os << "# sdgeom mesh: " << m.num_vertices() << " vertices, " << m.num_faces() << " faces\n";
    for (const auto& v : m.vertices)
        os << "v " << format_real(v.x1) << ' ' << format_real(v.x2) << ' ' << format_real(v.x3)
           << '\n';
    for (const auto& f : m.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline TriMesh read_obj(std::istream& is) {
    std::vector<GroupPoint> verts;
    std::vector<Face> faces;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            GroupPoint p;
            if (!(ls >> p.x1 >> p.x2 >> p.x3))
                throw Error(ErrorKind::io, "bad vertex on line " + std::to_string(lineno));
            verts.push_back(p);
        } else if (tag == "f") {
            Face f{};
            for (auto& idx : f) {
                std::string tok;
                if (!(ls >> tok)) throw Error(ErrorKind::io, "bad face on line " + std::to_string(lineno));
                // accept `i/vt/vn` by keeping the vertex part
                const long long k = std::stoll(tok.substr(0, tok.find('/')));
                if (k < 1) throw Error(ErrorKind::io, "face index must be 1-based on line " + std::to_string(lineno));
                idx = static_cast<std::size_t>(k - 1);
            }
            std::string extra;
            if (ls >> extra) throw Error(ErrorKind::io, "only triangles are supported (line " + std::to_string(lineno) + ")");
            faces.push_back(f);
        } else {
            throw Error(ErrorKind::io, "unsupported OBJ record '" + tag + "' on line " + std::to_string(lineno));
        }
    }
    return TriMesh::build(std::move(verts), std::move(faces));
}

inline TriMesh read_obj_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path);
    return read_obj(in);
}

inline void write_scalar_csv(std::ostream& os, const ScalarField& f) {
    os << "vertex_index,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) os << i << ',' << format_real(f[i]) << '\n';
}

inline ScalarField read_scalar_csv(std::istream& is) {
    ScalarField f;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("vertex_index", 0) == 0) continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error(ErrorKind::io, "bad scalar CSV row: " + line);
        const auto idx = static_cast<std::size_t>(std::stoull(line.substr(0, comma)));
        if (idx != f.size()) throw Error(ErrorKind::io, "scalar CSV rows must be in vertex order");
        f.values.push_back(std::stod(line.substr(comma + 1)));
    }
    return f;
}

}  // namespace sdgeom
