#include "selfdual/tabulated.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfdual {

Tabulated1D::Tabulated1D(double lo, double hi, Eigen::VectorXd values)
    : lo_(lo), hi_(hi), values_(std::move(values)) {
  const Eigen::Index n = values_.size();
  if (n < 2) throw std::invalid_argument("Tabulated1D: need at least 2 samples");
  if (!(hi > lo)) throw std::invalid_argument("Tabulated1D: need hi > lo");
  h_ = (hi_ - lo_) / static_cast<double>(n - 1);

  convex_on_grid_ = true;
  for (Eigen::Index i = 0; i + 2 < n; ++i) {
    const double s0 = values_[i + 1] - values_[i];
    const double s1 = values_[i + 2] - values_[i + 1];
    if (s1 < s0 - 1e-12 * (std::abs(s0) + std::abs(s1) + 1.0)) {
      convex_on_grid_ = false;
      break;
    }
  }

  // Lower convex hull over sorted abscissae (monotone chain).
  hull_.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = node(i), fi = values_[i];
    while (hull_.size() >= 2) {
      const Eigen::Index a = hull_[hull_.size() - 2];
      const Eigen::Index b = hull_[hull_.size() - 1];
      const double xa = node(a), xb = node(b);
      // b above or on segment a->i: drop it.
      if ((values_[b] - values_[a]) * (xi - xa) >= (fi - values_[a]) * (xb - xa))
        hull_.pop_back();
      else
        break;
    }
    hull_.push_back(i);
  }
  hull_slopes_.reserve(hull_.size() - 1);
  for (std::size_t k = 0; k + 1 < hull_.size(); ++k) {
    const Eigen::Index a = hull_[k], b = hull_[k + 1];
    hull_slopes_.push_back((values_[b] - values_[a]) / (node(b) - node(a)));
  }
}

double Tabulated1D::value(double x) const {
  if (!contains(x)) throw std::domain_error("Tabulated1D::value: x outside grid range");
  const double t = (x - lo_) / h_;
  Eigen::Index i = static_cast<Eigen::Index>(std::floor(t));
  i = std::clamp<Eigen::Index>(i, 0, values_.size() - 2);
  const double w = t - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

Eigen::Index Tabulated1D::conjugate_argmax(double p) const {
  // Hull vertex whose bracketing hull slopes contain p.
  const auto it = std::lower_bound(hull_slopes_.begin(), hull_slopes_.end(), p);
  const std::size_t k = static_cast<std::size_t>(it - hull_slopes_.begin());
  return hull_[k];
}

double Tabulated1D::conjugate(double p) const {
  const Eigen::Index i = conjugate_argmax(p);
  return p * node(i) - values_[i];
}

double Tabulated1D::hull_value(double x) const {
  if (!contains(x)) throw std::domain_error("Tabulated1D::hull_value: x outside grid range");
  std::size_t lo = 0, hi = hull_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (node(hull_[mid]) <= x)
      lo = mid;
    else
      hi = mid;
  }
  const double xa = node(hull_[lo]), xb = node(hull_[hi]);
  const double w = (xb > xa) ? (x - xa) / (xb - xa) : 0.0;
  return (1.0 - w) * values_[hull_[lo]] + w * values_[hull_[hi]];
}

double Tabulated1D::slope(double x) const {
  if (!contains(x)) throw std::domain_error("Tabulated1D::slope: x outside grid range");
  const double t = (x - lo_) / h_;
  const Eigen::Index nearest = static_cast<Eigen::Index>(std::llround(t));
  if (std::abs(t - static_cast<double>(nearest)) < 1e-9 && nearest > 0 &&
      nearest < values_.size() - 1) {
    return (values_[nearest + 1] - values_[nearest - 1]) / (2.0 * h_);
  }
  Eigen::Index i = static_cast<Eigen::Index>(std::floor(t));
  i = std::clamp<Eigen::Index>(i, 0, values_.size() - 2);
  return (values_[i + 1] - values_[i]) / h_;
}

Tabulated1D Tabulated1D::conjugate_table(double plo, double phi, Eigen::Index count) const {
  Eigen::VectorXd v(count);
  const double dp = (phi - plo) / static_cast<double>(count - 1);
  for (Eigen::Index i = 0; i < count; ++i) v[i] = conjugate(plo + dp * static_cast<double>(i));
  return Tabulated1D(plo, phi, std::move(v));
}

Tabulated2D::Tabulated2D(double lox, double hix, double loy, double hiy, Eigen::MatrixXd values)
    : lox_(lox), hix_(hix), loy_(loy), hiy_(hiy), values_(std::move(values)) {
  if (values_.rows() < 2 || values_.cols() < 2)
    throw std::invalid_argument("Tabulated2D: need at least 2x2 samples");
  hx_ = (hix_ - lox_) / static_cast<double>(values_.rows() - 1);
  hy_ = (hiy_ - loy_) / static_cast<double>(values_.cols() - 1);

  columns_.reserve(static_cast<std::size_t>(values_.cols()));
  convex_on_grid_ = true;
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    columns_.emplace_back(lox_, hix_, values_.col(j));
    convex_on_grid_ = convex_on_grid_ && columns_.back().convex_on_grid();
  }
  // Convexity along the y axis and both grid diagonals (sampled check).
  auto second_diff_ok = [&](Eigen::Index i, Eigen::Index j, Eigen::Index di, Eigen::Index dj) {
    const double a = values_(i - di, j - dj), b = values_(i, j), c = values_(i + di, j + dj);
    return a + c - 2.0 * b >= -1e-12 * (std::abs(a) + std::abs(c) + 1.0);
  };
  for (Eigen::Index i = 0; i < values_.rows() && convex_on_grid_; ++i)
    for (Eigen::Index j = 1; j + 1 < values_.cols(); ++j)
      if (!second_diff_ok(i, j, 0, 1)) { convex_on_grid_ = false; break; }
  for (Eigen::Index i = 1; i + 1 < values_.rows() && convex_on_grid_; ++i)
    for (Eigen::Index j = 1; j + 1 < values_.cols(); ++j)
      if (!second_diff_ok(i, j, 1, 1) || !second_diff_ok(i, j, 1, -1)) {
        convex_on_grid_ = false;
        break;
      }
}

double Tabulated2D::value(double x, double y) const {
  if (!contains(x, y)) throw std::domain_error("Tabulated2D::value: point outside grid range");
  const double tx = (x - lox_) / hx_, ty = (y - loy_) / hy_;
  Eigen::Index i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(tx)), 0,
                                            values_.rows() - 2);
  Eigen::Index j = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(ty)), 0,
                                            values_.cols() - 2);
  const double wx = tx - static_cast<double>(i), wy = ty - static_cast<double>(j);
  return (1.0 - wx) * (1.0 - wy) * values_(i, j) + wx * (1.0 - wy) * values_(i + 1, j) +
         (1.0 - wx) * wy * values_(i, j + 1) + wx * wy * values_(i + 1, j + 1);
}

double Tabulated2D::conjugate(double p1, double p2) const {
  double best = -HUGE_VAL;
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    const double cand = p2 * node_y(j) + columns_[static_cast<std::size_t>(j)].conjugate(p1);
    best = std::max(best, cand);
  }
  return best;
}

double Tabulated2D::min_slope_x() const {
  double m = HUGE_VAL;
  for (const auto& c : columns_) m = std::min(m, c.min_slope());
  return m;
}
double Tabulated2D::max_slope_x() const {
  double m = -HUGE_VAL;
  for (const auto& c : columns_) m = std::max(m, c.max_slope());
  return m;
}
double Tabulated2D::min_slope_y() const {
  double m = HUGE_VAL;
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    for (Eigen::Index j = 0; j + 1 < values_.cols(); ++j)
      m = std::min(m, (values_(i, j + 1) - values_(i, j)) / hy_);
  return m;
}
double Tabulated2D::max_slope_y() const {
  double m = -HUGE_VAL;
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    for (Eigen::Index j = 0; j + 1 < values_.cols(); ++j)
      m = std::max(m, (values_(i, j + 1) - values_(i, j)) / hy_);
  return m;
}

}  // namespace selfdual
