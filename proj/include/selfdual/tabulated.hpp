#pragma once

#include <Eigen/Dense>
#include <vector>

namespace selfdual {

/// Convex function given by samples on a uniform 1D grid.
///
/// Evaluation between nodes is piecewise linear and +infinity outside the
/// grid range, so the object is itself a closed convex function (when the
/// samples are convex) rather than an approximation scheme. Conjugate
/// queries max_i (p*x_i - f_i) are answered exactly for arbitrary real p
/// through the lower convex hull of the sample points (the monotone-slope
/// discrete Legendre transform: O(n) build on sorted data, O(log n) query).
class Tabulated1D {
 public:
  Tabulated1D(double lo, double hi, Eigen::VectorXd values);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double spacing() const { return h_; }
  Eigen::Index size() const { return values_.size(); }
  const Eigen::VectorXd& values() const { return values_; }
  double node(Eigen::Index i) const { return lo_ + h_ * static_cast<double>(i); }

  /// True when the samples have nondecreasing slopes. Conjugation is
  /// hull-based either way; non-convex input yields the conjugate of the
  /// convex hull and this flag is the warning the caller can inspect.
  bool convex_on_grid() const { return convex_on_grid_; }

  /// Piecewise-linear value; +infinity is signalled by the caller-side
  /// domain check (use contains()).
  bool contains(double x) const { return x >= lo_ && x <= hi_; }
  double value(double x) const;

  /// Exact discrete conjugate sup_i (p*x_i - f_i).
  double conjugate(double p) const;

  /// Maximizing node index of the conjugate (smallest index on ties).
  Eigen::Index conjugate_argmax(double p) const;

  /// Value of the convex hull (the biconjugate) at x in [lo, hi].
  double hull_value(double x) const;

  /// Slope of the data cell containing x; exact piecewise-linear
  /// derivative, averaged at interior nodes.
  double slope(double x) const;

  double min_slope() const { return hull_slopes_.front(); }
  double max_slope() const { return hull_slopes_.back(); }

  /// Samples the exact conjugate on a uniform p-grid.
  Tabulated1D conjugate_table(double plo, double phi, Eigen::Index count) const;

 private:
  double lo_, hi_, h_;
  Eigen::VectorXd values_;
  bool convex_on_grid_;
  std::vector<Eigen::Index> hull_;       // lower hull vertex indices
  std::vector<double> hull_slopes_;      // slopes between consecutive hull vertices
};

/// Convex function sampled on a uniform 2D grid, bilinear between nodes.
/// Conjugate queries are exact discrete suprema, computed dimension-wise
/// (a 1D hull per grid column, then a scan over the second axis).
class Tabulated2D {
 public:
  Tabulated2D(double lox, double hix, double loy, double hiy, Eigen::MatrixXd values);

  Eigen::Index nx() const { return values_.rows(); }
  Eigen::Index ny() const { return values_.cols(); }
  double node_x(Eigen::Index i) const { return lox_ + hx_ * static_cast<double>(i); }
  double node_y(Eigen::Index j) const { return loy_ + hy_ * static_cast<double>(j); }
  const Eigen::MatrixXd& values() const { return values_; }

  bool convex_on_grid() const { return convex_on_grid_; }
  bool contains(double x, double y) const {
    return x >= lox_ && x <= hix_ && y >= loy_ && y <= hiy_;
  }

  double value(double x, double y) const;

  /// Exact sup_{i,j} (p1*x_i + p2*y_j - f_ij).
  double conjugate(double p1, double p2) const;

  double min_slope_x() const;
  double max_slope_x() const;
  double min_slope_y() const;
  double max_slope_y() const;

 private:
  double lox_, hix_, loy_, hiy_, hx_, hy_;
  Eigen::MatrixXd values_;
  bool convex_on_grid_;
  std::vector<Tabulated1D> columns_;  // 1D tables along x for each y node
};

}  // namespace selfdual
