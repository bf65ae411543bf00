#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "ricci.hpp"

namespace riccishape {

/// Feature vertices: initial-metric curvature magnitude above the threshold.
struct VertexSelection {
    std::vector<int> indices; // ascending
    double tau = 0;
};

/// Vertices with K > tau or K < -tau. Errors when empty.
VertexSelection select_vertices(const CurvatureField& curvature, double tau);

/// m stage indices evenly spaced over [0, count-1]; always includes the
/// first and last stage for m >= 2. When m exceeds the number of distinct
/// stages, all stages are returned and *saturated is set.
std::vector<int> sample_stages(int stage_count, int m, bool* saturated = nullptr);

/// AD(v) = one-ring area under the stage-0 metric minus under the stage
/// metric, for every vertex.
std::vector<double> area_distortion(const TriangleMesh& mesh, const RicciTrace& trace, int stage);

/// Rows follow the vertex selection; columns are (u, AD, HK).
struct FeatureMatrix {
    int stage = 0;
    Eigen::MatrixXd values;
};

FeatureMatrix stage_features(const TriangleMesh& mesh, const RicciTrace& trace, int stage,
                             const VertexSelection& selection, const Eigen::VectorXd& hks);

/// One row per (stage, selected vertex): stage, vertex, u, AD, HK.
void export_features_csv(const std::vector<FeatureMatrix>& matrices,
                         const VertexSelection& selection, const std::string& path);

} // namespace riccishape
