#include "mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "numeric.hpp"

namespace riccishape {

TriangleMesh TriangleMesh::build(std::vector<Eigen::Vector3d> vertices,
                                 std::vector<std::array<int, 3>> faces) {
    TriangleMesh m;
    m.vertices = std::move(vertices);
    m.faces = std::move(faces);
    const int nv = m.vertex_count();
    const int nf = m.face_count();
    if (nv < 3 || nf < 1) fail(errc::validation, "mesh needs at least 3 vertices and 1 face");

    for (int f = 0; f < nf; ++f) {
        const auto& fv = m.faces[f];
        for (int c = 0; c < 3; ++c) {
            if (fv[c] < 0 || fv[c] >= nv)
                fail(errc::validation,
                     "face " + std::to_string(f) + " references invalid vertex " + std::to_string(fv[c]));
        }
        if (fv[0] == fv[1] || fv[1] == fv[2] || fv[2] == fv[0])
            fail(errc::validation, "face " + std::to_string(f) + " has repeated vertices");
    }

    // Undirected edge table; directed halfedges checked for orientation.
    std::map<std::pair<int, int>, int> edge_index;
    std::map<std::pair<int, int>, int> halfedge_face;
    m.face_edges.assign(nf, {-1, -1, -1});
    for (int f = 0; f < nf; ++f) {
        const auto& fv = m.faces[f];
        for (int c = 0; c < 3; ++c) {
            int a = fv[(c + 1) % 3]; // edge opposite corner c
            int b = fv[(c + 2) % 3];
            auto [it, inserted] = halfedge_face.try_emplace({a, b}, f);
            if (!inserted)
                fail(errc::validation, "inconsistent orientation: edge " + std::to_string(a) + "-" +
                                           std::to_string(b) + " traversed twice (faces " +
                                           std::to_string(it->second) + ", " + std::to_string(f) + ")");
            auto key = std::minmax(a, b);
            auto [eit, fresh] = edge_index.try_emplace({key.first, key.second}, int(m.edges.size()));
            if (fresh) {
                MeshEdge e;
                e.v0 = key.first;
                e.v1 = key.second;
                e.f0 = f;
                m.edges.push_back(e);
            } else {
                MeshEdge& e = m.edges[eit->second];
                if (e.f1 >= 0)
                    fail(errc::validation, "non-manifold edge " + std::to_string(key.first) + "-" +
                                               std::to_string(key.second) + " (more than 2 incident faces)");
                e.f1 = f;
            }
            m.face_edges[f][c] = eit->second;
        }
    }

    m.vertex_faces.assign(nv, {});
    m.vertex_edges.assign(nv, {});
    m.vertex_boundary.assign(nv, false);
    for (int f = 0; f < nf; ++f)
        for (int c = 0; c < 3; ++c) m.vertex_faces[m.faces[f][c]].push_back(f);
    for (int e = 0; e < m.edge_count(); ++e) {
        m.vertex_edges[m.edges[e].v0].push_back(e);
        m.vertex_edges[m.edges[e].v1].push_back(e);
        if (m.edges[e].boundary()) {
            ++m.boundary_edge_count_;
            m.vertex_boundary[m.edges[e].v0] = true;
            m.vertex_boundary[m.edges[e].v1] = true;
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (m.vertex_faces[v].empty())
            fail(errc::validation, "isolated vertex " + std::to_string(v));
        if (m.vertex_boundary[v]) ++m.boundary_vertex_count_;
    }

    // Single connected component (flood fill over edges).
    std::vector<char> seen(nv, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int e : m.vertex_edges[v]) {
            int w = m.edges[e].other_vertex(v);
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    if (reached != nv)
        fail(errc::validation, "mesh has multiple connected components (" + std::to_string(reached) +
                                   " of " + std::to_string(nv) + " vertices reachable)");
    return m;
}

int TriangleMesh::edge_between(int u, int v) const {
    for (int e : vertex_edges[u])
        if (edges[e].other_vertex(u) == v) return e;
    return -1;
}

double TriangleMesh::bounding_box_diagonal() const {
    Eigen::Vector3d lo = vertices[0], hi = vertices[0];
    for (const auto& p : vertices) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

namespace {

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (char& ch : ext) ch = char(std::tolower(static_cast<unsigned char>(ch)));
    return ext;
}

struct LineReader {
    std::istream& in;
    std::string path;
    int line_no = 0;
    std::string line;

    // next non-empty, non-comment line
    bool next() {
        while (std::getline(in, line)) {
            ++line_no;
            auto pos = line.find('#');
            if (pos != std::string::npos) line.erase(pos);
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    }

    [[noreturn]] void error(const std::string& msg) const {
        fail(errc::parse, path + ":" + std::to_string(line_no) + ": " + msg);
    }
};

TriangleMesh load_off(std::istream& in, const std::string& path) {
    LineReader r{in, path};
    if (!r.next()) r.error("empty file");
    std::istringstream header(r.line);
    std::string tag;
    header >> tag;
    if (tag != "OFF") r.error("expected OFF header, got '" + tag + "'");

    long nv = -1, nf = -1, ne = -1;
    if (!(header >> nv >> nf >> ne)) {
        if (!r.next()) r.error("missing counts line");
        std::istringstream counts(r.line);
        if (!(counts >> nv >> nf >> ne)) r.error("invalid counts line");
    }
    if (nv < 0 || nf < 0) r.error("negative counts");

    std::vector<Eigen::Vector3d> vertices;
    vertices.reserve(size_t(nv));
    for (long i = 0; i < nv; ++i) {
        if (!r.next()) r.error("unexpected end of file reading vertex " + std::to_string(i));
        std::istringstream vs(r.line);
        double x, y, z;
        if (!(vs >> x >> y >> z)) r.error("invalid vertex coordinates");
        vertices.emplace_back(x, y, z);
    }
    std::vector<std::array<int, 3>> faces;
    faces.reserve(size_t(nf));
    for (long i = 0; i < nf; ++i) {
        if (!r.next()) r.error("unexpected end of file reading face " + std::to_string(i));
        std::istringstream fs(r.line);
        int count;
        if (!(fs >> count)) r.error("invalid face line");
        if (count != 3) r.error("non-triangle face at index " + std::to_string(i) + " (" +
                                std::to_string(count) + " vertices)");
        std::array<int, 3> f{};
        if (!(fs >> f[0] >> f[1] >> f[2])) r.error("invalid face indices");
        faces.push_back(f);
    }
    return TriangleMesh::build(std::move(vertices), std::move(faces));
}

TriangleMesh load_obj(std::istream& in, const std::string& path) {
    LineReader r{in, path};
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;
    while (r.next()) {
        std::istringstream ls(r.line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) r.error("invalid vertex line");
            vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::array<int, 3> f{};
            int got = 0;
            std::string item;
            while (ls >> item) {
                if (got == 3) r.error("non-triangle face at index " + std::to_string(faces.size()));
                // tolerate v/vt/vn references; only the vertex index is used
                auto slash = item.find('/');
                if (slash != std::string::npos) item.erase(slash);
                long idx = 0;
                try {
                    idx = std::stol(item);
                } catch (const std::exception&) {
                    r.error("invalid face index '" + item + "'");
                }
                if (idx <= 0 || size_t(idx) > vertices.size())
                    r.error("face index " + std::to_string(idx) + " out of range");
                f[got++] = int(idx - 1);
            }
            if (got != 3) r.error("non-triangle face at index " + std::to_string(faces.size()));
            faces.push_back(f);
        }
        // other directives ignored
    }
    if (vertices.empty()) r.error("no vertices found");
    return TriangleMesh::build(std::move(vertices), std::move(faces));
}

} // namespace

TriangleMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io, "cannot open mesh file: " + path);
    std::string ext = lower_ext(path);
    if (ext == "off") return load_off(in, path);
    if (ext == "obj") return load_obj(in, path);
    // sniff: OFF files start with the OFF tag
    std::string first;
    in >> first;
    in.clear();
    in.seekg(0);
    if (first == "OFF") return load_off(in, path);
    return load_obj(in, path);
}

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(errc::io, "cannot write mesh file: " + path);
    std::string ext = lower_ext(path);
    if (ext == "obj") {
        for (const auto& p : mesh.vertices)
            out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
                << format_double(p.z()) << '\n';
        for (const auto& f : mesh.faces)
            out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    } else {
        out << "OFF\n";
        out << mesh.vertex_count() << ' ' << mesh.face_count() << ' ' << mesh.edge_count() << '\n';
        for (const auto& p : mesh.vertices)
            out << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
                << format_double(p.z()) << '\n';
        for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    }
    if (!out) fail(errc::io, "write failed: " + path);
}

EdgeMetric euclidean_edge_metric(const TriangleMesh& mesh) {
    EdgeMetric metric;
    metric.length.resize(mesh.edge_count());
    const double floor = 1e-12 * mesh.bounding_box_diagonal();
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const MeshEdge& edge = mesh.edges[e];
        double len = (mesh.vertices[edge.v0] - mesh.vertices[edge.v1]).norm();
        if (len <= floor)
            fail(errc::validation, "degenerate edge " + std::to_string(edge.v0) + "-" +
                                       std::to_string(edge.v1) + " (length " + format_double(len) + ")");
        metric.length[e] = len;
    }
    return metric;
}

CornerAngles corner_angles(const TriangleMesh& mesh, const EdgeMetric& metric) {
    CornerAngles angles;
    angles.angle.resize(mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f) {
        // l[c] = length of edge opposite corner c
        std::array<double, 3> l;
        for (int c = 0; c < 3; ++c) l[c] = metric.length[mesh.face_edges[f][c]];
        for (int c = 0; c < 3; ++c) {
            double a = l[c], b = l[(c + 1) % 3], g = l[(c + 2) % 3];
            if (b + g <= a)
                fail(errc::numeric, "triangle inequality violated at face " + std::to_string(f));
            double cosv = (b * b + g * g - a * a) / (2.0 * b * g);
            angles.angle[f][c] = std::acos(std::clamp(cosv, -1.0, 1.0));
        }
    }
    return angles;
}

CurvatureField gaussian_curvature(const TriangleMesh& mesh, const CornerAngles& angles) {
    CurvatureField curvature;
    curvature.k.assign(mesh.vertex_count(), 0.0);
    for (int v = 0; v < mesh.vertex_count(); ++v)
        curvature.k[v] = mesh.vertex_boundary[v] ? M_PI : 2.0 * M_PI;
    for (int f = 0; f < mesh.face_count(); ++f)
        for (int c = 0; c < 3; ++c) curvature.k[mesh.faces[f][c]] -= angles.angle[f][c];
    return curvature;
}

double triangle_area(double a, double b, double c) {
    // Kahan's stable Heron formula; requires a >= b >= c
    if (a < b) std::swap(a, b);
    if (b < c) std::swap(b, c);
    if (a < b) std::swap(a, b);
    double t = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    return 0.25 * std::sqrt(std::max(t, 0.0));
}

double face_area(const TriangleMesh& mesh, const EdgeMetric& metric, int f) {
    return triangle_area(metric.length[mesh.face_edges[f][0]], metric.length[mesh.face_edges[f][1]],
                         metric.length[mesh.face_edges[f][2]]);
}

double one_ring_area(const TriangleMesh& mesh, const EdgeMetric& metric, int v) {
    double area = 0;
    for (int f : mesh.vertex_faces[v]) area += face_area(mesh, metric, f);
    return area;
}

double total_area(const TriangleMesh& mesh, const EdgeMetric& metric) {
    double area = 0;
    for (int f = 0; f < mesh.face_count(); ++f) area += face_area(mesh, metric, f);
    return area;
}

double total_curvature(const CurvatureField& curvature) {
    double sum = 0;
    for (double k : curvature.k) sum += k;
    return sum;
}

} // namespace riccishape
