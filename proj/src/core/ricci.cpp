#include "ricci.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstring>
#include <fstream>

#include "errors.hpp"
#include "numeric.hpp"

namespace riccishape {

namespace {
constexpr double kInversiveFloor = -0.999999;

// Local planar layout of face f under the given lengths: corner 0 at the
// origin, corner 1 on the +x axis, corner 2 in the upper half plane.
std::array<Eigen::Vector2d, 3> layout_face(const TriangleMesh& mesh, const EdgeMetric& metric,
                                           int f) {
    double a = metric.length[mesh.face_edges[f][0]]; // opposite corner 0
    double b = metric.length[mesh.face_edges[f][1]];
    double c = metric.length[mesh.face_edges[f][2]];
    double cos0 = (b * b + c * c - a * a) / (2.0 * b * c);
    cos0 = std::clamp(cos0, -1.0, 1.0);
    double sin0 = std::sqrt(std::max(0.0, 1.0 - cos0 * cos0));
    return {Eigen::Vector2d(0, 0), Eigen::Vector2d(c, 0), Eigen::Vector2d(b * cos0, b * sin0)};
}
} // namespace

CirclePackingMetric init_circle_packing(const TriangleMesh& mesh, const EdgeMetric& metric) {
    CirclePackingMetric packing;
    packing.radius.assign(mesh.vertex_count(), std::numeric_limits<double>::infinity());
    for (int f = 0; f < mesh.face_count(); ++f) {
        for (int c = 0; c < 3; ++c) {
            double a = metric.length[mesh.face_edges[f][c]];
            double b = metric.length[mesh.face_edges[f][(c + 1) % 3]];
            double g = metric.length[mesh.face_edges[f][(c + 2) % 3]];
            double corner_radius = 0.5 * (b + g - a);
            if (corner_radius <= 0)
                fail(errc::numeric, "degenerate face shape: non-positive corner radius at face " +
                                        std::to_string(f));
            double& r = packing.radius[mesh.faces[f][c]];
            r = std::min(r, corner_radius);
        }
    }
    packing.inversive.resize(mesh.edge_count());
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const MeshEdge& edge = mesh.edges[e];
        double l = metric.length[e];
        double gi = packing.radius[edge.v0];
        double gj = packing.radius[edge.v1];
        double eta = (l * l - gi * gi - gj * gj) / (2.0 * gi * gj);
        if (eta < kInversiveFloor) {
            eta = kInversiveFloor;
            ++packing.clamped_edges;
        }
        packing.inversive[e] = eta;
    }
    return packing;
}

bool try_packing_edge_lengths(const TriangleMesh& mesh, const CirclePackingMetric& packing,
                              const std::vector<double>& u, EdgeMetric& out) {
    out.length.resize(mesh.edge_count());
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const MeshEdge& edge = mesh.edges[e];
        double gi = packing.radius[edge.v0] * std::exp(u[edge.v0]);
        double gj = packing.radius[edge.v1] * std::exp(u[edge.v1]);
        double sq = gi * gi + gj * gj + 2.0 * gi * gj * packing.inversive[e];
        if (!(sq > 0) || !std::isfinite(sq)) return false;
        out.length[e] = std::sqrt(sq);
    }
    for (int f = 0; f < mesh.face_count(); ++f) {
        double a = out.length[mesh.face_edges[f][0]];
        double b = out.length[mesh.face_edges[f][1]];
        double c = out.length[mesh.face_edges[f][2]];
        if (b + c <= a || c + a <= b || a + b <= c) return false;
    }
    return true;
}

EdgeMetric packing_edge_lengths(const TriangleMesh& mesh, const CirclePackingMetric& packing) {
    EdgeMetric metric;
    metric.length.resize(mesh.edge_count());
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const MeshEdge& edge = mesh.edges[e];
        double gi = packing.radius[edge.v0];
        double gj = packing.radius[edge.v1];
        double sq = gi * gi + gj * gj + 2.0 * gi * gj * packing.inversive[e];
        if (!(sq > 0))
            fail(errc::numeric, "non-positive induced squared length on edge " +
                                    std::to_string(edge.v0) + "-" + std::to_string(edge.v1));
        metric.length[e] = std::sqrt(sq);
    }
    for (int f = 0; f < mesh.face_count(); ++f) {
        double a = metric.length[mesh.face_edges[f][0]];
        double b = metric.length[mesh.face_edges[f][1]];
        double c = metric.length[mesh.face_edges[f][2]];
        if (b + c <= a || c + a <= b || a + b <= c)
            fail(errc::numeric,
                 "induced metric violates triangle inequality at face " + std::to_string(f));
    }
    return metric;
}

PowerHeights power_heights(const TriangleMesh& mesh, const std::vector<double>& radii,
                           const EdgeMetric& metric) {
    PowerHeights heights;
    heights.h.resize(mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f) {
        auto p = layout_face(mesh, metric, f);
        if (p[2].y() <= 0)
            fail(errc::numeric, "degenerate layout (collinear vertices) at face " + std::to_string(f));
        std::array<double, 3> r{};
        for (int c = 0; c < 3; ++c) r[c] = radii[mesh.faces[f][c]];

        // Radical center: the point with equal power w.r.t. all three circles.
        Eigen::Matrix2d A;
        Eigen::Vector2d rhs;
        for (int row = 0; row < 2; ++row) {
            int m = row + 1;
            A.row(row) = 2.0 * (p[m] - p[0]).transpose();
            rhs(row) = (p[m].squaredNorm() - r[m] * r[m]) - (p[0].squaredNorm() - r[0] * r[0]);
        }
        Eigen::Vector2d center = A.colPivHouseholderQr().solve(rhs);

        for (int c = 0; c < 3; ++c) {
            const Eigen::Vector2d& ea = p[(c + 1) % 3];
            const Eigen::Vector2d& eb = p[(c + 2) % 3];
            const Eigen::Vector2d& opposite = p[c];
            Eigen::Vector2d dir = eb - ea;
            Eigen::Vector2d normal(-dir.y(), dir.x());
            normal /= normal.norm();
            if (normal.dot(opposite - ea) < 0) normal = -normal;
            heights.h[f][c] = normal.dot(center - ea);
        }
    }
    return heights;
}

PowerHeights power_heights(const TriangleMesh& mesh, const CirclePackingMetric& packing) {
    return power_heights(mesh, packing.radius, packing_edge_lengths(mesh, packing));
}

std::vector<double> edge_weights(const TriangleMesh& mesh, const PowerHeights& heights,
                                 const EdgeMetric& metric) {
    std::vector<double> w(mesh.edge_count(), 0.0);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const MeshEdge& edge = mesh.edges[e];
        double sum = 0;
        for (int f : {edge.f0, edge.f1}) {
            if (f < 0) continue;
            for (int c = 0; c < 3; ++c)
                if (mesh.face_edges[f][c] == e) sum += heights.h[f][c];
        }
        w[e] = sum / metric.length[e];
    }
    return w;
}

Eigen::SparseMatrix<double> ricci_hessian(const TriangleMesh& mesh,
                                          const std::vector<double>& weights) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.edge_count() * 4);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        int i = mesh.edges[e].v0, j = mesh.edges[e].v1;
        double w = weights[e];
        triplets.emplace_back(i, j, -w);
        triplets.emplace_back(j, i, -w);
        triplets.emplace_back(i, i, w);
        triplets.emplace_back(j, j, w);
    }
    Eigen::SparseMatrix<double> H(mesh.vertex_count(), mesh.vertex_count());
    H.setFromTriplets(triplets.begin(), triplets.end());
    return H;
}

TargetCurvature default_target_curvature(const TriangleMesh& mesh) {
    TargetCurvature target;
    const double total = 2.0 * M_PI * mesh.euler_characteristic();
    if (mesh.closed()) {
        target.k_bar.assign(mesh.vertex_count(), total / mesh.vertex_count());
        return target;
    }
    target.k_bar.assign(mesh.vertex_count(), 0.0);
    const double per_boundary = total / mesh.boundary_vertex_count();
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (mesh.vertex_boundary[v]) target.k_bar[v] = per_boundary;
    return target;
}

void check_admissible(const TriangleMesh& mesh, const TargetCurvature& target, double tol) {
    if (int(target.k_bar.size()) != mesh.vertex_count())
        fail(errc::invalid_argument, "target curvature size mismatch");
    double sum = 0;
    for (double k : target.k_bar) sum += k;
    double expect = 2.0 * M_PI * mesh.euler_characteristic();
    if (std::abs(sum - expect) > tol)
        fail(errc::validation, "target curvature violates Gauss-Bonnet: sum " + format_double(sum) +
                                   " vs 2*pi*chi " + format_double(expect));
}

Eigen::VectorXd solve_zero_mean(const Eigen::SparseMatrix<double>& H, Eigen::VectorXd b) {
    const int n = int(H.rows());
    b.array() -= b.mean();
    if (n == 1) return Eigen::VectorXd::Zero(1);

    // H has the constants in its kernel; drop the last row/column and pin
    // that vertex, then project the solution back to the zero-mean subspace.
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(H.nonZeros());
    for (int col = 0; col < n - 1; ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(H, col); it; ++it)
            if (it.row() < n - 1) triplets.emplace_back(int(it.row()), col, it.value());
    Eigen::SparseMatrix<double> R(n - 1, n - 1);
    R.setFromTriplets(triplets.begin(), triplets.end());

    const double bnorm = std::max(b.norm(), 1e-300);
    auto extend = [n](const Eigen::VectorXd& xr) {
        Eigen::VectorXd x(n);
        x.head(n - 1) = xr;
        x(n - 1) = 0;
        x.array() -= x.mean();
        return x;
    };

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(R);
    if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd x = extend(ldlt.solve(b.head(n - 1)));
        for (int pass = 0; pass < 3; ++pass) {
            Eigen::VectorXd r = b - H * x;
            if (r.norm() <= 1e-12 * bnorm) break;
            x += extend(ldlt.solve(r.head(n - 1)));
        }
        if ((b - H * x).norm() <= 1e-10 * bnorm) return x;
    }

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(R);
    if (lu.info() == Eigen::Success) {
        Eigen::VectorXd x = extend(lu.solve(b.head(n - 1)));
        for (int pass = 0; pass < 3; ++pass) {
            Eigen::VectorXd r = b - H * x;
            if (r.norm() <= 1e-12 * bnorm) break;
            x += extend(lu.solve(r.head(n - 1)));
        }
        if ((b - H * x).norm() <= 1e-10 * bnorm) return x;
    }
    fail(errc::numeric, "Newton system solve failed to reach 1e-10 relative residual");
}

namespace {

double max_residual(const TargetCurvature& target, const CurvatureField& curvature) {
    double r = 0;
    for (size_t i = 0; i < curvature.k.size(); ++i)
        r = std::max(r, std::abs(target.k_bar[i] - curvature.k[i]));
    return r;
}

std::vector<double> scaled_radii(const CirclePackingMetric& packing, const std::vector<double>& u) {
    std::vector<double> radii(packing.radius.size());
    for (size_t i = 0; i < radii.size(); ++i) radii[i] = packing.radius[i] * std::exp(u[i]);
    return radii;
}

} // namespace

RicciTrace optimize(const TriangleMesh& mesh, const TargetCurvature& target,
                    const SolverConfig& cfg) {
    check_admissible(mesh, target);
    const EdgeMetric initial = euclidean_edge_metric(mesh);

    RicciTrace trace;
    trace.packing = init_circle_packing(mesh, initial);
    const int n = mesh.vertex_count();

    std::vector<double> u(n, 0.0);
    EdgeMetric metric;
    if (!try_packing_edge_lengths(mesh, trace.packing, u, metric))
        fail(errc::numeric, "initial circle packing induces a degenerate metric");
    CurvatureField curvature = gaussian_curvature(mesh, corner_angles(mesh, metric));
    double residual = max_residual(target, curvature);
    trace.stages.push_back({0, u, metric, curvature, residual});
    trace.converged = residual < cfg.epsilon;

    for (int iter = 1; !trace.converged && iter <= cfg.max_iterations; ++iter) {
        PowerHeights heights = power_heights(mesh, scaled_radii(trace.packing, u), metric);
        std::vector<double> weights = edge_weights(mesh, heights, metric);
        Eigen::SparseMatrix<double> H = ricci_hessian(mesh, weights);

        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) b(i) = target.k_bar[i] - curvature.k[i];
        Eigen::VectorXd du = solve_zero_mean(H, b);

        // Backtrack until the induced metric stays admissible and the
        // residual does not increase.
        bool accepted = false;
        std::vector<double> u_try(n);
        EdgeMetric metric_try;
        for (double lambda = 1.0; lambda >= cfg.damping_min; lambda *= 0.5) {
            for (int i = 0; i < n; ++i) u_try[i] = u[i] + lambda * du(i);
            if (!try_packing_edge_lengths(mesh, trace.packing, u_try, metric_try)) continue;
            CurvatureField curv_try = gaussian_curvature(mesh, corner_angles(mesh, metric_try));
            double res_try = max_residual(target, curv_try);
            if (res_try < residual || res_try < cfg.epsilon) {
                u = u_try;
                metric = std::move(metric_try);
                curvature = std::move(curv_try);
                residual = res_try;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            fail(errc::no_convergence,
                 "Newton step stalled at iteration " + std::to_string(iter) +
                     " (damping underflow below " + format_double(cfg.damping_min) + ")");

        double mean = 0;
        for (double v : u) mean += v;
        mean /= n;
        for (double& v : u) v -= mean;

        trace.stages.push_back({iter, u, metric, curvature, residual});
        trace.iterations = iter;
        trace.converged = residual < cfg.epsilon;
    }
    return trace;
}

namespace {
constexpr char kTraceMagic[8] = {'R', 'S', 'H', 'T', 'R', 'C', '0', '1'};

template <typename T> void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T> void read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}
void write_vec(std::ostream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
}
void read_vec(std::istream& in, std::vector<double>& v, size_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), std::streamsize(n * sizeof(double)));
}
} // namespace

void save_trace(const RicciTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io, "cannot write trace file: " + path);
    out.write(kTraceMagic, sizeof(kTraceMagic));
    std::int64_t nv = std::int64_t(trace.packing.radius.size());
    std::int64_t ne = std::int64_t(trace.packing.inversive.size());
    std::int64_t ns = std::int64_t(trace.stages.size());
    std::int64_t conv = trace.converged ? 1 : 0;
    std::int64_t iters = trace.iterations;
    std::int64_t clamped = trace.packing.clamped_edges;
    write_pod(out, nv);
    write_pod(out, ne);
    write_pod(out, ns);
    write_pod(out, conv);
    write_pod(out, iters);
    write_pod(out, clamped);
    write_vec(out, trace.packing.radius);
    write_vec(out, trace.packing.inversive);
    for (const auto& stage : trace.stages) {
        write_pod(out, std::int64_t(stage.iteration));
        write_pod(out, stage.residual);
        write_vec(out, stage.u);
        write_vec(out, stage.metric.length);
        write_vec(out, stage.curvature.k);
    }
    if (!out) fail(errc::io, "write failed: " + path);
}

RicciTrace load_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot open trace file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kTraceMagic, sizeof(magic)) != 0)
        fail(errc::parse, "not a trace file: " + path);
    std::int64_t nv, ne, ns, conv, iters, clamped;
    read_pod(in, nv);
    read_pod(in, ne);
    read_pod(in, ns);
    read_pod(in, conv);
    read_pod(in, iters);
    read_pod(in, clamped);
    if (!in || nv <= 0 || ne <= 0 || ns <= 0) fail(errc::parse, "corrupt trace header: " + path);
    RicciTrace trace;
    trace.converged = conv != 0;
    trace.iterations = int(iters);
    trace.packing.clamped_edges = int(clamped);
    read_vec(in, trace.packing.radius, size_t(nv));
    read_vec(in, trace.packing.inversive, size_t(ne));
    trace.stages.resize(size_t(ns));
    for (auto& stage : trace.stages) {
        std::int64_t iteration;
        read_pod(in, iteration);
        read_pod(in, stage.residual);
        stage.iteration = int(iteration);
        read_vec(in, stage.u, size_t(nv));
        read_vec(in, stage.metric.length, size_t(ne));
        read_vec(in, stage.curvature.k, size_t(nv));
    }
    if (!in) fail(errc::parse, "corrupt trace file: " + path);
    return trace;
}

} // namespace riccishape
