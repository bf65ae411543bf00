#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "mesh.hpp"

namespace riccishape {

/// Cotangent edge weights: 1/2 cot(alpha) on boundary edges,
/// 1/2 (cot(alpha) + cot(beta)) on interior edges, from the corner angles
/// opposite each edge. Negative weights are allowed and counted.
struct CotangentWeights {
    std::vector<double> w;
    int negative_count = 0;
};

CotangentWeights cotangent_weights(const TriangleMesh& mesh, const EdgeMetric& metric);

/// Discrete Laplace matrix: off-diagonal -w_ij, diagonal sum_k w_ik.
struct LaplaceMatrix {
    Eigen::SparseMatrix<double> matrix;
    std::vector<double> weights;
    int negative_weight_count = 0;
};

LaplaceMatrix laplace_matrix(const TriangleMesh& mesh, const CotangentWeights& weights);

/// Eigenvalues ascending with matching orthonormal eigenvectors (columns).
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors; // vertex x k
    int size() const { return int(eigenvalues.size()); }
};

constexpr int kFullSpectrum = -1;

/// k smallest eigenpairs of L (dense symmetric solve).
Spectrum eigendecompose(const LaplaceMatrix& laplace, int k = kFullSpectrum);

/// Barycentric lumped vertex masses (one-ring area / 3).
Eigen::VectorXd vertex_masses(const TriangleMesh& mesh, const EdgeMetric& metric);

/// Generalized problem L phi = lambda M phi with diagonal mass matrix;
/// eigenvectors are M-orthonormal.
Spectrum eigendecompose(const LaplaceMatrix& laplace, const Eigen::VectorXd& mass,
                        int k = kFullSpectrum);

/// Full spectrum up to 2000 vertices, 300 smallest pairs beyond.
int default_spectrum_size(int vertex_count);

/// First eigenvalue above numerical zero; t_scale = 1 / lambda_1 makes HKS
/// time values comparable across mesh scales.
double first_positive_eigenvalue(const Spectrum& spectrum);
double time_scale(const Spectrum& spectrum);

/// HKS(x, t) = sum_i exp(-lambda_i t) phi_i(x)^2 for every vertex.
Eigen::VectorXd heat_kernel_signature(const Spectrum& spectrum, double t);

/// sum_i exp(-lambda_i t); equals sum_x HKS(x, t) for the full spectrum.
double heat_trace(const Spectrum& spectrum, double t);

/// Convenience: cotangent Laplacian of the given metric, default spectrum
/// size, HKS at t = t_in_tscale * t_scale.
Eigen::VectorXd hks_for_metric(const TriangleMesh& mesh, const EdgeMetric& metric,
                               double t_in_tscale);

} // namespace riccishape
