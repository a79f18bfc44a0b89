#include "qclust/sdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qclust/errors.hpp"

namespace qclust {

namespace {

constexpr double kEigClamp = 1e-10;
constexpr int kHardSizeCap = 256;
constexpr int kInteriorPointCap = 16;  // barrier method below, splitting above

struct Triangle {
    // Constraint X[a] + X[b] - X[c] <= 1 over three matrix positions
    // (row, col) with row < col.
    int a_r, a_c, b_r, b_c, c_r, c_c;
};

uint64_t triangle_key(int i, int j, int k, int variant) {
    return ((static_cast<uint64_t>(i) * 256 + j) * 256 + k) * 4 + variant;
}

Triangle make_triangle(int i, int j, int k, int variant) {
    // Edges of the triple (i < j < k): e0 = (i,j), e1 = (j,k), e2 = (i,k).
    switch (variant) {
        case 0: return {i, j, j, k, i, k};   // e0 + e1 - e2 <= 1
        case 1: return {i, j, i, k, j, k};   // e0 + e2 - e1 <= 1
        default: return {j, k, i, k, i, j};  // e1 + e2 - e0 <= 1
    }
}

double triangle_violation(const PairMatrix& m, const Triangle& t) {
    return m(t.a_r, t.a_c) + m(t.b_r, t.b_c) - m(t.c_r, t.c_c) - 1.0;
}

void project_triangle(PairMatrix& m, const Triangle& t) {
    double v = triangle_violation(m, t);
    if (v <= 0.0) return;
    double shift = v / 3.0;
    m(t.a_r, t.a_c) -= shift;
    m(t.a_c, t.a_r) = m(t.a_r, t.a_c);
    m(t.b_r, t.b_c) -= shift;
    m(t.b_c, t.b_r) = m(t.b_r, t.b_c);
    m(t.c_r, t.c_c) += shift;
    m(t.c_c, t.c_r) = m(t.c_r, t.c_c);
}

void project_box_diag(PairMatrix& m) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double v = std::clamp(m(i, j), 0.0, 1.0);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
}

// Worst violation over all 3 m^3/6 triangle inequalities.
double max_triangle_violation(const PairMatrix& m) {
    const int n = static_cast<int>(m.rows());
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double mij = m(i, j);
            for (int k = j + 1; k < n; ++k) {
                double mjk = m(j, k), mik = m(i, k);
                worst = std::max({worst, mij + mjk - mik - 1.0, mij + mik - mjk - 1.0,
                                  mjk + mik - mij - 1.0});
            }
        }
    return worst;
}

PairMatrix project_psd(const PairMatrix& m) {
    Eigen::SelfAdjointEigenSolver<PairMatrix> es(m);
    const auto& vals = es.eigenvalues();
    const int n = static_cast<int>(m.rows());
    int first_pos = n;
    for (int i = 0; i < n; ++i)
        if (vals(i) > kEigClamp) {
            first_pos = i;
            break;
        }
    int r = n - first_pos;
    if (r == 0) return PairMatrix::Zero(n, n);
    Eigen::MatrixXd w = es.eigenvectors().rightCols(r);
    for (int c = 0; c < r; ++c) w.col(c) *= std::sqrt(vals(first_pos + c));
    return w * w.transpose();
}

SdpSolution package(PairMatrix out, const PairMatrix& F, double tol, int iterations,
                    bool converged) {
    const int n = static_cast<int>(F.rows());
    double clamp_move = 0.0;
    for (int i = 0; i < n; ++i) {
        clamp_move = std::max(clamp_move, std::abs(out(i, i) - 1.0));
        out(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            double sym = 0.5 * (out(i, j) + out(j, i));
            double v = std::clamp(sym, 0.0, 1.0);
            clamp_move = std::max(clamp_move, std::abs(v - out(i, j)));
            out(i, j) = v;
            out(j, i) = v;
        }
    }

    SdpSolution sol;
    sol.X = std::move(out);
    sol.iterations = iterations;
    sol.objective = distance(sol.X, F);
    sol.triangle_residual = std::max(0.0, max_triangle_violation(sol.X));
    Eigen::SelfAdjointEigenSolver<PairMatrix> es(sol.X, Eigen::EigenvaluesOnly);
    sol.psd_residual = std::max(0.0, -es.eigenvalues().minCoeff());

    if (!converged || sol.triangle_residual > tol || sol.psd_residual > tol ||
        clamp_move > tol) {
        throw SolverError("solve_sdp: did not reach the residual targets",
                          sol.triangle_residual, sol.psd_residual, sol.iterations);
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Barrier (interior-point) path following for small instances. Variables are
// the strict upper triangle; the diagonal is fixed at 1. All 3*C(n,3)
// triangle constraints carry explicit log barriers, alongside the box and
// log det X.
// ---------------------------------------------------------------------------

struct BarrierWorkspace {
    int n = 0;
    int nv = 0;                              // number of edge variables
    std::vector<std::pair<int, int>> edges;  // var -> (u, v)
    Eigen::MatrixXi eid;                     // (u, v) -> var
    std::vector<std::array<int, 3>> tris;    // (e0, e1, e2): e0 + e1 - e2 <= 1
};

BarrierWorkspace barrier_workspace(int n) {
    BarrierWorkspace ws;
    ws.n = n;
    ws.eid = Eigen::MatrixXi::Constant(n, n, -1);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            ws.eid(u, v) = ws.nv;
            ws.eid(v, u) = ws.nv;
            ws.edges.emplace_back(u, v);
            ++ws.nv;
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                int e0 = ws.eid(i, j), e1 = ws.eid(j, k), e2 = ws.eid(i, k);
                ws.tris.push_back({e0, e1, e2});
                ws.tris.push_back({e0, e2, e1});
                ws.tris.push_back({e1, e2, e0});
            }
    return ws;
}

PairMatrix assemble(const BarrierWorkspace& ws, const Eigen::VectorXd& x) {
    PairMatrix X = PairMatrix::Identity(ws.n, ws.n);
    for (int e = 0; e < ws.nv; ++e) {
        auto [u, v] = ws.edges[e];
        X(u, v) = x(e);
        X(v, u) = x(e);
    }
    return X;
}

bool strictly_feasible(const BarrierWorkspace& ws, const Eigen::VectorXd& x, double margin) {
    for (int e = 0; e < ws.nv; ++e)
        if (x(e) <= margin || x(e) >= 1.0 - margin) return false;
    for (const auto& t : ws.tris)
        if (1.0 - x(t[0]) - x(t[1]) + x(t[2]) <= margin) return false;
    Eigen::LLT<PairMatrix> llt(assemble(ws, x));
    return llt.info() == Eigen::Success;
}

SdpSolution solve_sdp_barrier(const PairMatrix& F, double tol, int max_iters) {
    const int n = static_cast<int>(F.rows());
    BarrierWorkspace ws = barrier_workspace(n);
    const int nv = ws.nv;

    Eigen::VectorXd c(nv);
    for (int e = 0; e < nv; ++e) {
        auto [u, v] = ws.edges[e];
        c(e) = 1.0 - 2.0 * F(u, v);
    }

    // A uniform mild correlation is strictly inside every constraint.
    Eigen::VectorXd x = Eigen::VectorXd::Constant(nv, 0.25);

    const double nu = static_cast<double>(n) + 2.0 * nv + static_cast<double>(ws.tris.size());
    double t_bar = 1.0;
    const double target_gap = std::max(tol * 0.125, 1e-9);
    int iterations = 0;

    Eigen::VectorXd grad(nv), step(nv);
    Eigen::MatrixXd hess(nv, nv);

    while (nu / t_bar > target_gap && iterations < max_iters) {
        for (int newton = 0; newton < 60 && iterations < max_iters; ++newton) {
            ++iterations;
            PairMatrix X = assemble(ws, x);
            Eigen::LLT<PairMatrix> llt(X);
            if (llt.info() != Eigen::Success)
                throw SolverError("solve_sdp: barrier lost positive definiteness", 0.0, 0.0,
                                  iterations);
            PairMatrix Xinv = llt.solve(PairMatrix::Identity(n, n));

            grad = t_bar * c;
            hess.setZero();
            for (int e = 0; e < nv; ++e) {
                auto [u, v] = ws.edges[e];
                grad(e) += -2.0 * Xinv(u, v);
                grad(e) += -1.0 / x(e) + 1.0 / (1.0 - x(e));
                hess(e, e) += 1.0 / (x(e) * x(e)) + 1.0 / ((1.0 - x(e)) * (1.0 - x(e)));
            }
            for (int e = 0; e < nv; ++e) {
                auto [u, v] = ws.edges[e];
                for (int f = e; f < nv; ++f) {
                    auto [w, z] = ws.edges[f];
                    double h = 2.0 * (Xinv(u, w) * Xinv(v, z) + Xinv(u, z) * Xinv(v, w));
                    hess(e, f) += h;
                    if (f != e) hess(f, e) += h;
                }
            }
            for (const auto& t : ws.tris) {
                double slack = 1.0 - x(t[0]) - x(t[1]) + x(t[2]);
                double inv = 1.0 / slack;
                double inv2 = inv * inv;
                grad(t[0]) += inv;
                grad(t[1]) += inv;
                grad(t[2]) -= inv;
                hess(t[0], t[0]) += inv2;
                hess(t[1], t[1]) += inv2;
                hess(t[2], t[2]) += inv2;
                hess(t[0], t[1]) += inv2;
                hess(t[1], t[0]) += inv2;
                hess(t[0], t[2]) -= inv2;
                hess(t[2], t[0]) -= inv2;
                hess(t[1], t[2]) -= inv2;
                hess(t[2], t[1]) -= inv2;
            }

            Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
            step = ldlt.solve(-grad);
            double decrement = -grad.dot(step);
            if (!(decrement > 1e-10)) break;

            double alpha = 1.0;
            while (alpha > 1e-12 && !strictly_feasible(ws, x + alpha * step, 1e-12))
                alpha *= 0.5;
            if (alpha <= 1e-12) break;
            x += alpha * step;
            if (decrement * 0.5 < 1e-9) break;
        }
        t_bar *= 8.0;
    }

    return package(assemble(ws, x), F, tol, iterations, true);
}

// ---------------------------------------------------------------------------
// Splitting scheme for larger instances: ADMM alternating a PSD projection
// with a Dykstra projection onto the box/diagonal polytope and lazily
// separated triangle halfspaces. Tolerances at these sizes are loose.
// ---------------------------------------------------------------------------

SdpSolution solve_sdp_admm(const PairMatrix& F, double tol, int max_iters) {
    const int n = static_cast<int>(F.rows());

    // d(X,F) = const + sum_{u<v} (1 - 2 F_uv) X_uv.
    PairMatrix grad = PairMatrix::Ones(n, n) - 2.0 * F;
    for (int i = 0; i < n; ++i) grad(i, i) = 0.0;

    PairMatrix X = F, Z = F, U = PairMatrix::Zero(n, n), Zprev = F, Y = F;
    double rho = 1.0;

    std::vector<Triangle> active;
    std::unordered_map<uint64_t, size_t> active_ids;
    const double eps_primal = std::clamp(tol / (2.0 * n), 1e-6, 1e-3);
    const double sep_add = std::max(tol * 0.1, 1e-6);

    auto separate = [&](const PairMatrix& m, double thresh) {
        int added = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double mij = m(i, j);
                for (int k = j + 1; k < n; ++k) {
                    double v0 = mij + m(j, k) - m(i, k) - 1.0;
                    double v1 = mij + m(i, k) - m(j, k) - 1.0;
                    double v2 = m(j, k) + m(i, k) - mij - 1.0;
                    for (int var = 0; var < 3; ++var) {
                        double v = var == 0 ? v0 : (var == 1 ? v1 : v2);
                        if (v > thresh) {
                            uint64_t key = triangle_key(i, j, k, var);
                            if (active_ids.emplace(key, active.size()).second) {
                                active.push_back(make_triangle(i, j, k, var));
                                ++added;
                            }
                        }
                    }
                }
            }
        return added;
    };

    int iter = 0;
    bool converged = false;
    double prev_obj = std::numeric_limits<double>::infinity();
    int stable_checks = 0;
    const double obj_eps = std::max(tol * 0.02, 1e-9);
    for (; iter < max_iters; ++iter) {
        // Z-step: prox of the linear objective over the polytope, via
        // Dykstra run until the joint violation is negligible.
        Y = X + U - grad / rho;
        Z = Y;
        if (active.empty()) {
            project_box_diag(Z);
        } else {
            const double viol_eps = std::min(eps_primal * 0.05, 1e-7);
            PairMatrix box_corr = PairMatrix::Zero(n, n);
            std::vector<std::array<double, 3>> tri_corr(active.size(), {0.0, 0.0, 0.0});
            for (int pass = 0; pass < 64; ++pass) {
                Z += box_corr;
                PairMatrix before = Z;
                project_box_diag(Z);
                box_corr = before - Z;
                for (size_t t = 0; t < active.size(); ++t) {
                    const Triangle& tr = active[t];
                    auto& corr = tri_corr[t];
                    Z(tr.a_r, tr.a_c) += corr[0];
                    Z(tr.a_c, tr.a_r) = Z(tr.a_r, tr.a_c);
                    Z(tr.b_r, tr.b_c) += corr[1];
                    Z(tr.b_c, tr.b_r) = Z(tr.b_r, tr.b_c);
                    Z(tr.c_r, tr.c_c) += corr[2];
                    Z(tr.c_c, tr.c_r) = Z(tr.c_r, tr.c_c);
                    double a = Z(tr.a_r, tr.a_c), b = Z(tr.b_r, tr.b_c), c = Z(tr.c_r, tr.c_c);
                    project_triangle(Z, tr);
                    corr = {a - Z(tr.a_r, tr.a_c), b - Z(tr.b_r, tr.b_c),
                            c - Z(tr.c_r, tr.c_c)};
                }
                if (pass >= 2) {
                    double worst = 0.0;
                    for (const Triangle& tr : active)
                        worst = std::max(worst, triangle_violation(Z, tr));
                    for (int i = 0; i < n && worst <= viol_eps; ++i)
                        for (int j = i + 1; j < n; ++j) {
                            worst = std::max(worst, Z(i, j) - 1.0);
                            worst = std::max(worst, -Z(i, j));
                        }
                    if (worst <= viol_eps) break;
                }
            }
            project_box_diag(Z);
        }

        X = project_psd(Z - U);
        U += X - Z;

        if ((iter + 1) % 10 == 0) {
            double primal = (X - Z).cwiseAbs().maxCoeff();
            double dual = rho * (Z - Zprev).cwiseAbs().maxCoeff();
            if (primal > 10.0 * dual && dual > 0.0) {
                rho *= 1.5;
                U /= 1.5;
            } else if (dual > 10.0 * primal) {
                rho /= 1.5;
                U *= 1.5;
            }
            double obj = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) obj += std::abs(Z(i, j) - F(i, j));
            bool obj_stable = std::abs(obj - prev_obj) <= obj_eps;
            prev_obj = obj;
            stable_checks = obj_stable ? stable_checks + 1 : 0;
            if (primal <= eps_primal && stable_checks >= 6) {
                separate(Z, sep_add);
                if (max_triangle_violation(Z) <= 0.5 * tol) {
                    converged = true;
                    ++iter;
                    break;
                }
                stable_checks = 0;
            } else if ((iter + 1) % 50 == 0) {
                separate(Z, sep_add);
            }
        }
        Zprev = Z;
    }

    // A residual-feasible point is acceptable even when the stability gate
    // never fired; the tolerance is the contract.
    return package(Z, F, tol, iter, converged || iter >= max_iters);
}

}  // namespace

SdpSolution solve_sdp(const PairMatrix& F, double tol, int max_iters) {
    const int n = static_cast<int>(F.rows());
    if (n == 0 || F.cols() != n) throw std::invalid_argument("solve_sdp: F must be square");
    if (n > kHardSizeCap) throw ResourceError("solve_sdp: instance exceeds solver size cap");
    if (!is_binary_matrix(F) || !is_valid_pair_matrix(F))
        throw std::invalid_argument("solve_sdp: F must be binary symmetric with unit diagonal");
    if (tol <= 0.0) throw std::invalid_argument("solve_sdp: tol must be positive");
    if (n <= 2) {
        // With the diagonal pinned, a lone off-diagonal entry is free to sit
        // exactly on F's value.
        SdpSolution sol;
        sol.X = F;
        sol.iterations = 0;
        sol.objective = 0.0;
        return sol;
    }
    if (n <= kInteriorPointCap) return solve_sdp_barrier(F, tol, max_iters);
    return solve_sdp_admm(F, tol, max_iters);
}

}  // namespace qclust
