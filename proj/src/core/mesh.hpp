#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace riccishape {

/// Undirected edge; v0 < v1, f1 = -1 for boundary edges.
struct MeshEdge {
    int v0 = -1;
    int v1 = -1;
    int f0 = -1;
    int f1 = -1;

    bool boundary() const { return f1 < 0; }
    int other_vertex(int v) const { return v == v0 ? v1 : v0; }
};

/// Oriented manifold triangle mesh with precomputed connectivity.
/// Immutable after construction; safe to share across threads.
class TriangleMesh {
public:
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces; // counterclockwise vertex triples

    std::vector<MeshEdge> edges;
    std::vector<std::array<int, 3>> face_edges; // face_edges[f][c] = edge opposite corner c
    std::vector<std::vector<int>> vertex_faces;
    std::vector<std::vector<int>> vertex_edges;
    std::vector<bool> vertex_boundary;

    /// Validates manifoldness, orientation and connectedness, then builds
    /// the connectivity tables. Throws Error(errc::validation) on defects.
    static TriangleMesh build(std::vector<Eigen::Vector3d> vertices,
                              std::vector<std::array<int, 3>> faces);

    int vertex_count() const { return int(vertices.size()); }
    int face_count() const { return int(faces.size()); }
    int edge_count() const { return int(edges.size()); }
    int boundary_edge_count() const { return boundary_edge_count_; }
    int boundary_vertex_count() const { return boundary_vertex_count_; }
    int euler_characteristic() const { return vertex_count() - edge_count() + face_count(); }
    bool closed() const { return boundary_edge_count_ == 0; }
    /// Connected, genus 0, single boundary loop.
    bool is_disk() const { return !closed() && euler_characteristic() == 1; }

    /// Index of the corner of face f at vertex v (0..2); -1 if v not in f.
    int corner_of(int f, int v) const {
        for (int c = 0; c < 3; ++c)
            if (faces[f][c] == v) return c;
        return -1;
    }

    int edge_between(int u, int v) const; // -1 if absent

    double bounding_box_diagonal() const;

private:
    int boundary_edge_count_ = 0;
    int boundary_vertex_count_ = 0;
};

/// Per-edge lengths, indexed like TriangleMesh::edges.
struct EdgeMetric {
    std::vector<double> length;
};

/// Per-face corner angles; angle[f][c] is at faces[f][c].
struct CornerAngles {
    std::vector<std::array<double, 3>> angle;
};

/// Per-vertex discrete Gaussian curvature (angle deficit), radians.
struct CurvatureField {
    std::vector<double> k;
};

TriangleMesh load_mesh(const std::string& path);
void save_mesh(const TriangleMesh& mesh, const std::string& path);

/// Lengths from vertex positions. Rejects edges shorter than
/// 1e-12 x bounding-box diagonal.
EdgeMetric euclidean_edge_metric(const TriangleMesh& mesh);

/// Law of cosines per corner; verifies the strict triangle inequality
/// on every face (reports the face index on violation).
CornerAngles corner_angles(const TriangleMesh& mesh, const EdgeMetric& metric);

/// 2*pi - sum of incident angles at interior vertices, pi - sum at
/// boundary vertices.
CurvatureField gaussian_curvature(const TriangleMesh& mesh, const CornerAngles& angles);

/// Heron area of a triangle from its edge lengths (stable ordering).
double triangle_area(double a, double b, double c);

double face_area(const TriangleMesh& mesh, const EdgeMetric& metric, int f);

/// Sum of areas of all faces incident to v under the given metric.
double one_ring_area(const TriangleMesh& mesh, const EdgeMetric& metric, int v);

double total_area(const TriangleMesh& mesh, const EdgeMetric& metric);

/// Sum of vertex curvatures; equals 2*pi*chi(M) by discrete Gauss-Bonnet.
double total_curvature(const CurvatureField& curvature);

} // namespace riccishape
