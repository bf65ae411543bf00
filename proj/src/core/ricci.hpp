#pragma once

#include <Eigen/SparseCore>

#include <vector>

#include "mesh.hpp"

namespace riccishape {

/// Inversive-distance circle packing: per-vertex radii and per-edge
/// inversive distances inducing lengths l^2 = g_i^2 + g_j^2 + 2 g_i g_j eta.
/// Euclidean background geometry throughout.
struct CirclePackingMetric {
    std::vector<double> radius;    // per vertex, > 0
    std::vector<double> inversive; // per edge, symmetric, held fixed by the flow
    int clamped_edges = 0;         // inversive distances raised to the -0.999999 floor
};

/// Per-(face, corner) distance from the face's power (radical) center to the
/// edge opposite that corner, signed positive toward the face interior.
struct PowerHeights {
    std::vector<std::array<double, 3>> h; // h[f][c] pairs with face_edges[f][c]
};

struct TargetCurvature {
    std::vector<double> k_bar; // per vertex, radians
};

struct SolverConfig {
    double epsilon = 1e-6;
    int max_iterations = 200;
    double damping_min = 1e-8;
};

/// One recorded optimization stage. Conformal factors are cumulative from
/// the initial packing (u = 0 at stage 0, current radius = radius * e^u),
/// which keeps them on the zero-mean constraint hyperplane.
struct RicciStage {
    int iteration = 0;
    std::vector<double> u;
    EdgeMetric metric;
    CurvatureField curvature;
    double residual = 0; // max_i |target_i - K_i|
};

struct RicciTrace {
    CirclePackingMetric packing; // initial packing; inversive distances never change
    std::vector<RicciStage> stages;
    bool converged = false;
    int iterations = 0;

    const RicciStage& final_stage() const { return stages.back(); }
};

/// Algorithm: per-corner radii g_i^{jk} = (l_ij + l_ki - l_jk)/2, vertex
/// radius is the minimum over incident corners, then eta from the lengths.
CirclePackingMetric init_circle_packing(const TriangleMesh& mesh, const EdgeMetric& metric);

/// Induced lengths from the packing's current radii; verifies positivity
/// and the triangle inequality per face.
EdgeMetric packing_edge_lengths(const TriangleMesh& mesh, const CirclePackingMetric& packing);

/// Non-throwing variant with explicitly scaled radii (radius_scale = e^u).
/// Returns false when some induced length is non-real/non-positive or some
/// face violates the triangle inequality.
bool try_packing_edge_lengths(const TriangleMesh& mesh, const CirclePackingMetric& packing,
                              const std::vector<double>& u, EdgeMetric& out);

/// Radical center of the three vertex circles of each face, laid out in the
/// plane under the given metric.
PowerHeights power_heights(const TriangleMesh& mesh, const CirclePackingMetric& packing);
PowerHeights power_heights(const TriangleMesh& mesh, const std::vector<double>& radii,
                           const EdgeMetric& metric);

/// w_ij = (h_ij^k + h_ji^l)/l_ij on interior edges, h_ij^k/l_ij on boundary.
std::vector<double> edge_weights(const TriangleMesh& mesh, const PowerHeights& heights,
                                 const EdgeMetric& metric);

/// Sparse symmetric matrix with diagonal sum_k w_ik and off-diagonal -w_ij;
/// equals dK/du entry-wise.
Eigen::SparseMatrix<double> ricci_hessian(const TriangleMesh& mesh,
                                          const std::vector<double>& weights);

/// Interior vertices 0, boundary vertices uniform 2*pi*chi/|boundary|;
/// uniform everywhere on closed meshes.
TargetCurvature default_target_curvature(const TriangleMesh& mesh);

/// Gauss-Bonnet admissibility: sum of targets = 2*pi*chi within tol.
void check_admissible(const TriangleMesh& mesh, const TargetCurvature& target, double tol = 1e-9);

/// Damped Newton optimization of the Ricci energy toward the target
/// curvature, recording a snapshot per iteration (stage 0 = initial
/// packing). Returns converged = false when the iteration cap is hit;
/// throws Error(errc::no_convergence) on damping underflow.
RicciTrace optimize(const TriangleMesh& mesh, const TargetCurvature& target,
                    const SolverConfig& cfg = {});

/// Solves H x = b on the zero-mean subspace (both b and x mean-projected).
Eigen::VectorXd solve_zero_mean(const Eigen::SparseMatrix<double>& H, Eigen::VectorXd b);

void save_trace(const RicciTrace& trace, const std::string& path);
RicciTrace load_trace(const std::string& path);

} // namespace riccishape
