#include "features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "errors.hpp"
#include "numeric.hpp"

namespace riccishape {

VertexSelection select_vertices(const CurvatureField& curvature, double tau) {
    if (tau < 0) fail(errc::invalid_argument, "curvature threshold must be non-negative");
    VertexSelection selection;
    selection.tau = tau;
    for (int v = 0; v < int(curvature.k.size()); ++v)
        if (std::abs(curvature.k[v]) > tau) selection.indices.push_back(v);
    if (selection.indices.empty())
        fail(errc::validation, "no vertex has |K| > " + format_double(tau) +
                                   "; lower the curvature threshold");
    return selection;
}

std::vector<int> sample_stages(int stage_count, int m, bool* saturated) {
    if (stage_count < 1) fail(errc::invalid_argument, "trace has no stages");
    if (m < 1) fail(errc::invalid_argument, "stage sample count must be positive");
    if (saturated) *saturated = false;
    const int last = stage_count - 1;
    if (m >= stage_count) {
        if (saturated) *saturated = m > stage_count;
        std::vector<int> all(stage_count);
        for (int i = 0; i < stage_count; ++i) all[i] = i;
        return all;
    }
    if (m == 1) return {last};

    std::vector<char> used(stage_count, 0);
    std::vector<int> out;
    out.reserve(m);
    for (int j = 0; j < m; ++j) {
        int idx = int(std::llround(double(j) * last / (m - 1)));
        if (used[idx]) {
            for (int d = 1; d < stage_count; ++d) {
                if (idx + d <= last && !used[idx + d]) {
                    idx += d;
                    break;
                }
                if (idx - d >= 0 && !used[idx - d]) {
                    idx -= d;
                    break;
                }
            }
        }
        used[idx] = 1;
        out.push_back(idx);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> area_distortion(const TriangleMesh& mesh, const RicciTrace& trace, int stage) {
    if (stage < 0 || stage >= int(trace.stages.size()))
        fail(errc::invalid_argument, "stage index out of range");
    const EdgeMetric& initial = trace.stages.front().metric;
    const EdgeMetric& current = trace.stages[size_t(stage)].metric;
    std::vector<double> ad(mesh.vertex_count(), 0.0);
    for (int f = 0; f < mesh.face_count(); ++f) {
        double delta = face_area(mesh, initial, f) - face_area(mesh, current, f);
        for (int c = 0; c < 3; ++c) ad[mesh.faces[f][c]] += delta;
    }
    return ad;
}

FeatureMatrix stage_features(const TriangleMesh& mesh, const RicciTrace& trace, int stage,
                             const VertexSelection& selection, const Eigen::VectorXd& hks) {
    if (stage < 0 || stage >= int(trace.stages.size()))
        fail(errc::invalid_argument, "stage index out of range");
    const RicciStage& snapshot = trace.stages[size_t(stage)];
    std::vector<double> ad = area_distortion(mesh, trace, stage);

    FeatureMatrix features;
    features.stage = stage;
    features.values.resize(long(selection.indices.size()), 3);
    for (size_t row = 0; row < selection.indices.size(); ++row) {
        int v = selection.indices[row];
        features.values(long(row), 0) = snapshot.u[v];
        features.values(long(row), 1) = ad[v];
        features.values(long(row), 2) = hks(v);
        for (int col = 0; col < 3; ++col)
            if (!std::isfinite(features.values(long(row), col)))
                fail(errc::numeric, "non-finite feature at stage " + std::to_string(stage) +
                                        ", vertex " + std::to_string(v));
    }
    return features;
}

void export_features_csv(const std::vector<FeatureMatrix>& matrices,
                         const VertexSelection& selection, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(errc::io, "cannot write features file: " + path);
    out << "stage,vertex,u,AD,HK\n";
    for (const auto& fm : matrices)
        for (size_t row = 0; row < selection.indices.size(); ++row)
            out << fm.stage << ',' << selection.indices[row] << ','
                << format_double(fm.values(long(row), 0)) << ','
                << format_double(fm.values(long(row), 1)) << ','
                << format_double(fm.values(long(row), 2)) << '\n';
    if (!out) fail(errc::io, "write failed: " + path);
}

} // namespace riccishape
