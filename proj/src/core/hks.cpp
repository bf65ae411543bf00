#include "hks.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "errors.hpp"

namespace riccishape {

CotangentWeights cotangent_weights(const TriangleMesh& mesh, const EdgeMetric& metric) {
    CornerAngles angles = corner_angles(mesh, metric);
    CotangentWeights weights;
    weights.w.assign(mesh.edge_count(), 0.0);
    for (int f = 0; f < mesh.face_count(); ++f)
        for (int c = 0; c < 3; ++c) {
            double a = angles.angle[f][c]; // angle opposite face_edges[f][c]
            weights.w[mesh.face_edges[f][c]] += 0.5 * std::cos(a) / std::sin(a);
        }
    for (double w : weights.w)
        if (w < 0) ++weights.negative_count;
    return weights;
}

LaplaceMatrix laplace_matrix(const TriangleMesh& mesh, const CotangentWeights& weights) {
    LaplaceMatrix laplace;
    laplace.weights = weights.w;
    laplace.negative_weight_count = weights.negative_count;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.edge_count() * 4);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        int i = mesh.edges[e].v0, j = mesh.edges[e].v1;
        double w = weights.w[e];
        triplets.emplace_back(i, j, -w);
        triplets.emplace_back(j, i, -w);
        triplets.emplace_back(i, i, w);
        triplets.emplace_back(j, j, w);
    }
    laplace.matrix.resize(mesh.vertex_count(), mesh.vertex_count());
    laplace.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return laplace;
}

Spectrum eigendecompose(const LaplaceMatrix& laplace, int k) {
    const int n = int(laplace.matrix.rows());
    if (k == kFullSpectrum || k > n) k = n;
    if (k < 1) fail(errc::invalid_argument, "spectrum size must be positive");
    Eigen::MatrixXd dense = Eigen::MatrixXd(laplace.matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success) fail(errc::numeric, "eigensolver failed to converge");
    Spectrum spectrum;
    spectrum.eigenvalues = solver.eigenvalues().head(k);
    spectrum.eigenvectors = solver.eigenvectors().leftCols(k);
    return spectrum;
}

Eigen::VectorXd vertex_masses(const TriangleMesh& mesh, const EdgeMetric& metric) {
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(mesh.vertex_count());
    for (int f = 0; f < mesh.face_count(); ++f) {
        double share = face_area(mesh, metric, f) / 3.0;
        for (int c = 0; c < 3; ++c) mass(mesh.faces[f][c]) += share;
    }
    return mass;
}

Spectrum eigendecompose(const LaplaceMatrix& laplace, const Eigen::VectorXd& mass, int k) {
    const int n = int(laplace.matrix.rows());
    if (k == kFullSpectrum || k > n) k = n;
    if (k < 1) fail(errc::invalid_argument, "spectrum size must be positive");
    Eigen::MatrixXd dense = Eigen::MatrixXd(laplace.matrix);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        dense, Eigen::MatrixXd(mass.asDiagonal()));
    if (solver.info() != Eigen::Success) fail(errc::numeric, "eigensolver failed to converge");
    Spectrum spectrum;
    spectrum.eigenvalues = solver.eigenvalues().head(k);
    spectrum.eigenvectors = solver.eigenvectors().leftCols(k);
    return spectrum;
}

int default_spectrum_size(int vertex_count) {
    return vertex_count <= 2000 ? vertex_count : 300;
}

double first_positive_eigenvalue(const Spectrum& spectrum) {
    double scale = std::max(std::abs(spectrum.eigenvalues(spectrum.size() - 1)), 1.0);
    for (int i = 0; i < spectrum.size(); ++i)
        if (spectrum.eigenvalues(i) > 1e-12 * scale) return spectrum.eigenvalues(i);
    fail(errc::numeric, "spectrum has no positive eigenvalue");
}

double time_scale(const Spectrum& spectrum) { return 1.0 / first_positive_eigenvalue(spectrum); }

Eigen::VectorXd heat_kernel_signature(const Spectrum& spectrum, double t) {
    if (t < 0) fail(errc::invalid_argument, "heat kernel time must be non-negative");
    Eigen::VectorXd decay = (-spectrum.eigenvalues.array() * t).exp();
    return (spectrum.eigenvectors.array().square().matrix() * decay);
}

double heat_trace(const Spectrum& spectrum, double t) {
    return (-spectrum.eigenvalues.array() * t).exp().sum();
}

Eigen::VectorXd hks_for_metric(const TriangleMesh& mesh, const EdgeMetric& metric,
                               double t_in_tscale) {
    LaplaceMatrix laplace = laplace_matrix(mesh, cotangent_weights(mesh, metric));
    Spectrum spectrum = eigendecompose(laplace, default_spectrum_size(mesh.vertex_count()));
    return heat_kernel_signature(spectrum, t_in_tscale * time_scale(spectrum));
}

} // namespace riccishape
