#include "varigen/projection.hpp"

#include <Eigen/Cholesky>

#include <sstream>

#include "varigen/error.hpp"

namespace varigen {

double default_ridge(const Eigen::MatrixXd& source) {
  return 1e-6 * source.squaredNorm() / static_cast<double>(source.cols());
}

ProjectionMatrix fit_projection(const AnchorPairs& pairs, double ridge) {
  const Eigen::Index p = pairs.source.rows();
  const Eigen::Index d = pairs.source.cols();
  if (p < 1 || d < 1) fail("fit_projection: need at least one anchor pair");
  if (pairs.target.rows() != p || pairs.target.cols() != d)
    fail("fit_projection: source and target anchor shapes differ");
  if (ridge < 0.0) fail("fit_projection: ridge must be nonnegative");

  Eigen::MatrixXd gram = pairs.source.transpose() * pairs.source;
  gram.diagonal().array() += ridge;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14) {
    std::ostringstream msg;
    msg << "local projection system is numerically singular (p=" << p
        << ", d=" << d << "); increase the ridge term";
    fail(msg.str());
  }

  ProjectionMatrix out;
  out.W = ldlt.solve(pairs.source.transpose() * pairs.target);
  out.residual_norm = (pairs.source * out.W - pairs.target).norm();
  return out;
}

Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& v,
                        const ProjectionMatrix& projection) {
  if (v.size() != projection.W.rows())
    fail("project: vector dimension does not match the projection matrix");
  return projection.W.transpose() * v;  // row-vector convention v * W
}

}  // namespace varigen
