#pragma once

#include <Eigen/Dense>

#include "qclust/model.hpp"

namespace qclust {

// A near-feasible, near-optimal point for the correlation-clustering
// relaxation: entries in [0,1], unit diagonal, triangle and spectral
// residuals within the solver tolerance.
struct SdpSolution {
    PairMatrix X;
    double objective = 0.0;          // d(X, F)
    double triangle_residual = 0.0;  // max over triples of (X_uv + X_vw - X_uw - 1)+
    double psd_residual = 0.0;       // max(0, -lambda_min(X))
    int iterations = 0;
};

// Minimize d(X, F) subject to the triangle inequalities, box [0,1], unit
// diagonal and X PSD, up to an additive tolerance. Splitting scheme: an ADMM
// loop alternating a PSD projection (eigenvalue clamp) against a projection
// onto the box/diagonal polytope with lazily separated triangle constraints.
SdpSolution solve_sdp(const PairMatrix& F, double tol, int max_iters);

}  // namespace qclust
