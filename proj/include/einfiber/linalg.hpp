#pragma once

#include <Eigen/Dense>

namespace einfiber {

// Numerical rank with a threshold relative to the largest singular value.
inline int numeric_rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++rank;
  return rank;
}

// Euclidean-orthonormal basis of the column span.
inline Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& a,
                                           double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[0] > 0.0 && s[i] > rel_tol * s[0]) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Euclidean-orthonormal basis of {x : a x = 0}.
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[0] > 0.0 && s[i] > rel_tol * s[0]) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

// sin of the largest principal angle between column spans; inputs must have
// orthonormal columns. Equal spans give 0, orthogonal (or different-dimension)
// spans give 1.
inline double subspace_distance(const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd diff = a * a.transpose() - b * b.transpose();
  if (diff.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(diff);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

}  // namespace einfiber
