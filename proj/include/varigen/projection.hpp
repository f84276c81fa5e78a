#pragma once

#include <Eigen/Core>

namespace varigen {

/// Anchor pairs for one localized fit: row i of source maps to row i of
/// target. Both are p x d.
struct AnchorPairs {
  Eigen::MatrixXd source;
  Eigen::MatrixXd target;

  Eigen::Index pair_count() const { return source.rows(); }
  Eigen::Index dim() const { return source.cols(); }
};

struct ProjectionMatrix {
  Eigen::MatrixXd W;          // d x d
  double residual_norm = 0;   // Frobenius norm of source*W - target at fit time
};

/// Ridge that keeps rank-deficient local systems solvable:
/// 1e-6 * trace(FᵀF) / d.
double default_ridge(const Eigen::MatrixXd& source);

/// Least-squares fit of W minimizing |FW - E|^2 + ridge*|W|^2 via the
/// normal equations (FᵀF + ridge I) W = FᵀE. Throws when the system is
/// numerically singular (use a larger ridge).
ProjectionMatrix fit_projection(const AnchorPairs& pairs, double ridge);

/// Row-vector product v * W.
Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& v,
                        const ProjectionMatrix& projection);

}  // namespace varigen
