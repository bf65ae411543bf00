#include "embed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>

#include "errors.hpp"
#include "numeric.hpp"

namespace riccishape {

namespace {

int auto_seed_face(const TriangleMesh& mesh, const CornerAngles& angles) {
    int best = 0;
    double best_min = -1;
    for (int f = 0; f < mesh.face_count(); ++f) {
        double m = std::min({angles.angle[f][0], angles.angle[f][1], angles.angle[f][2]});
        if (m > best_min) {
            best_min = m;
            best = f;
        }
    }
    return best;
}

double face_signed_area(const std::array<Eigen::Vector2d, 3>& p) {
    return 0.5 * ((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
}

} // namespace

PlanarEmbedding embed_plane(const TriangleMesh& mesh, const EdgeMetric& metric, int seed) {
    if (!mesh.is_disk())
        fail(errc::validation, "planar embedding requires a topological disk (chi = " +
                                   std::to_string(mesh.euler_characteristic()) + ", boundary edges = " +
                                   std::to_string(mesh.boundary_edge_count()) + ")");
    CornerAngles angles = corner_angles(mesh, metric);
    CurvatureField curvature = gaussian_curvature(mesh, angles);
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (!mesh.vertex_boundary[v] && std::abs(curvature.k[v]) > 1e-4)
            fail(errc::validation, "metric is not flat at interior vertex " + std::to_string(v) +
                                       " (|K| = " + format_double(std::abs(curvature.k[v])) + ")");

    if (seed == kAutoSeed) seed = auto_seed_face(mesh, angles);
    if (seed < 0 || seed >= mesh.face_count())
        fail(errc::invalid_argument, "seed face out of range");

    PlanarEmbedding embedding;
    embedding.seed_face = seed;
    embedding.position.assign(mesh.vertex_count(), Eigen::Vector2d::Zero());
    std::vector<char> placed(mesh.vertex_count(), 0);
    std::vector<char> visited(mesh.face_count(), 0);

    // Seed face: v0 at the origin, v1 on +x, v2 above by the corner angle.
    {
        const auto& fv = mesh.faces[seed];
        double l01 = metric.length[mesh.face_edges[seed][2]];
        double l02 = metric.length[mesh.face_edges[seed][1]];
        double theta0 = angles.angle[seed][0];
        embedding.position[fv[0]] = {0, 0};
        embedding.position[fv[1]] = {l01, 0};
        embedding.position[fv[2]] = {l02 * std::cos(theta0), l02 * std::sin(theta0)};
        placed[fv[0]] = placed[fv[1]] = placed[fv[2]] = 1;
        visited[seed] = 1;
    }

    std::deque<int> queue;
    auto push_neighbors = [&](int f) {
        for (int c = 0; c < 3; ++c) {
            const MeshEdge& e = mesh.edges[mesh.face_edges[f][c]];
            int g = (e.f0 == f) ? e.f1 : e.f0;
            if (g >= 0 && !visited[g]) queue.push_back(g);
        }
    };
    push_neighbors(seed);

    int placed_faces = 1;
    while (!queue.empty()) {
        int f = queue.front();
        queue.pop_front();
        if (visited[f]) continue;
        const auto& fv = mesh.faces[f];

        int free_corner = -1;
        for (int c = 0; c < 3; ++c)
            if (!placed[fv[c]]) free_corner = c;

        if (free_corner >= 0) {
            int vi = fv[(free_corner + 1) % 3];
            int vj = fv[(free_corner + 2) % 3];
            int vk = fv[free_corner];
            double lik = metric.length[mesh.face_edges[f][(free_corner + 2) % 3]];
            double ljk = metric.length[mesh.face_edges[f][(free_corner + 1) % 3]];
            const Eigen::Vector2d a = embedding.position[vi];
            const Eigen::Vector2d b = embedding.position[vj];
            double d = (b - a).norm();
            double along = (d * d + lik * lik - ljk * ljk) / (2.0 * d);
            double perp_sq = lik * lik - along * along;
            double scale = std::max({lik, ljk, d});
            if (perp_sq < -(1e-6 * scale) * (1e-6 * scale))
                fail(errc::numeric, "circle intersection empty at face " + std::to_string(f) +
                                        " (inconsistent lengths)");
            double perp = std::sqrt(std::max(perp_sq, 0.0));
            Eigen::Vector2d dir = (b - a) / d;
            Eigen::Vector2d normal(-dir.y(), dir.x());
            Eigen::Vector2d base = a + along * dir;
            embedding.position[vk] = base + perp * normal;
            // The root keeping the face counterclockwise in its stored order.
            std::array<Eigen::Vector2d, 3> corners = {embedding.position[fv[0]],
                                                      embedding.position[fv[1]],
                                                      embedding.position[fv[2]]};
            if (face_signed_area(corners) < 0) embedding.position[vk] = base - perp * normal;
            placed[vk] = 1;
        } else {
            // re-encountered face: all vertices already pinned; track drift
            for (int c = 0; c < 3; ++c) {
                const MeshEdge& e = mesh.edges[mesh.face_edges[f][c]];
                double planar = (embedding.position[e.v0] - embedding.position[e.v1]).norm();
                double expect = metric.length[mesh.face_edges[f][c]];
                embedding.consistency_residual = std::max(
                    embedding.consistency_residual, std::abs(planar - expect) / expect);
            }
        }
        visited[f] = 1;
        ++placed_faces;
        push_neighbors(f);
    }

    if (placed_faces != mesh.face_count())
        fail(errc::numeric, "flood fill reached only " + std::to_string(placed_faces) + " of " +
                                std::to_string(mesh.face_count()) + " faces");
    return embedding;
}

void export_embedding_svg(const TriangleMesh& mesh, const PlanarEmbedding& embedding,
                          const std::string& path, const std::vector<double>* circle_radii) {
    std::ofstream out(path);
    if (!out) fail(errc::io, "cannot write SVG file: " + path);

    Eigen::Vector2d lo = embedding.position[0], hi = embedding.position[0];
    for (const auto& p : embedding.position) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    if (circle_radii) {
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            lo = lo.cwiseMin(embedding.position[v].array() - (*circle_radii)[v]);
            hi = hi.cwiseMax(embedding.position[v].array() + (*circle_radii)[v]);
        }
    }
    double span = std::max((hi - lo).maxCoeff(), 1e-12);
    double margin = 0.05 * span;
    lo.array() -= margin;
    hi.array() += margin;
    double stroke = 0.002 * span;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(lo.x()) << ' '
        << format_double(-hi.y()) << ' ' << format_double(hi.x() - lo.x()) << ' '
        << format_double(hi.y() - lo.y()) << "\">\n";
    out << "<g stroke=\"black\" stroke-width=\"" << format_double(stroke) << "\" fill=\"none\">\n";
    for (const auto& e : mesh.edges) {
        const auto& a = embedding.position[e.v0];
        const auto& b = embedding.position[e.v1];
        out << "<line x1=\"" << format_double(a.x()) << "\" y1=\"" << format_double(-a.y())
            << "\" x2=\"" << format_double(b.x()) << "\" y2=\"" << format_double(-b.y()) << "\"/>\n";
    }
    out << "</g>\n";
    if (circle_radii) {
        out << "<g stroke=\"blue\" stroke-width=\"" << format_double(0.5 * stroke)
            << "\" fill=\"none\">\n";
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            const auto& p = embedding.position[v];
            out << "<circle cx=\"" << format_double(p.x()) << "\" cy=\"" << format_double(-p.y())
                << "\" r=\"" << format_double((*circle_radii)[v]) << "\"/>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
    if (!out) fail(errc::io, "write failed: " + path);
}

void export_embedding_obj(const TriangleMesh& mesh, const PlanarEmbedding& embedding,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(errc::io, "cannot write OBJ file: " + path);
    for (const auto& p : embedding.position)
        out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
    for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) fail(errc::io, "write failed: " + path);
}

} // namespace riccishape
