#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mesh.hpp"

namespace riccishape {

struct PlanarEmbedding {
    std::vector<Eigen::Vector2d> position;
    int seed_face = -1;
    /// Max relative edge-length discrepancy observed at re-encountered
    /// vertices during the flood fill.
    double consistency_residual = 0;
};

constexpr int kAutoSeed = -1;

/// Isometric flattening of a flat-metric disk by breadth-first flood fill:
/// the seed face is placed directly, every further vertex at the circle
/// intersection that keeps its face counterclockwise. seed = kAutoSeed picks
/// the face with the largest minimum corner angle.
PlanarEmbedding embed_plane(const TriangleMesh& mesh, const EdgeMetric& metric,
                            int seed = kAutoSeed);

/// Line drawing of the embedding; optional circle overlay (centers at the
/// embedded vertices with the given per-vertex radii).
void export_embedding_svg(const TriangleMesh& mesh, const PlanarEmbedding& embedding,
                          const std::string& path,
                          const std::vector<double>* circle_radii = nullptr);

/// OBJ export with z = 0.
void export_embedding_obj(const TriangleMesh& mesh, const PlanarEmbedding& embedding,
                          const std::string& path);

} // namespace riccishape
