#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace laros::testkit {

std::array<double, 2> singular_values_2x2(const Point4& m) {
  const double fro2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
  const double det = m[0] * m[3] - m[1] * m[2];
  const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
  const double s1 = std::sqrt(std::max(0.0, 0.5 * (fro2 + disc)));
  const double s2 = s1 > 0.0 ? std::abs(det) / s1 : 0.0;
  return {s1, s2};
}

Point4 grid_minimize(const std::function<double(const Point4&)>& f,
                     const Point4& centre, double radius, bool rotate,
                     int levels, int points) {
  using Basis = Eigen::Matrix4d;
  std::mt19937_64 gen(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> normal;
  Point4 best = centre;
  double best_val = f(best);
  double r = radius;
  int stalls = 0;
  Basis basis = Basis::Identity();
  for (int level = 0; level < levels && r > 1e-13 * radius; ++level) {
    const double step = 2.0 * r / (points - 1);
    const Point4 c = best;
    Eigen::Vector4d offset;
    Point4 p;
    for (int i0 = 0; i0 < points; ++i0)
      for (int i1 = 0; i1 < points; ++i1)
        for (int i2 = 0; i2 < points; ++i2)
          for (int i3 = 0; i3 < points; ++i3) {
            offset << -r + i0 * step, -r + i1 * step, -r + i2 * step, -r + i3 * step;
            const Eigen::Vector4d d = basis * offset;
            for (int k = 0; k < 4; ++k) p[k] = c[k] + d(k);
            const double v = f(p);
            if (v < best_val) {
              best_val = v;
              best = p;
            }
          }
    if (best == c) {
      if (!rotate || ++stalls >= 4) {
        r *= 0.5;
        stalls = 0;
      }
    } else {
      stalls = 0;
    }
    if (!rotate) continue;
    Basis g;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = normal(gen);
    basis = Eigen::HouseholderQR<Basis>(g).householderQ();
  }
  return best;
}

Point4 pack(const Matrix& m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

Matrix unpack(const Point4& p) {
  Matrix m(2, 2);
  m << p[0], p[1], p[2], p[3];
  return m;
}

double dual_theta_norm_grid(const Matrix& a, double theta) {
  const Point4 ap = pack(a);
  auto f = [&](const Point4& z) {
    Point4 y;
    double zinf = 0.0;
    for (int k = 0; k < 4; ++k) {
      y[k] = ap[k] - z[k];
      zinf = std::max(zinf, std::abs(z[k]));
    }
    return std::max(singular_values_2x2(y)[0], zinf / theta);
  };
  const double bound = theta * singular_values_2x2(ap)[0];
  const Point4 best = grid_minimize(f, {0.0, 0.0, 0.0, 0.0}, bound, true);
  return f(best);
}

Matrix svt_grid(const Matrix& a, double tau) {
  // X = R(alpha) diag(s) R(beta)^T covers every 2 x 2 matrix. For fixed
  // angles the best s is scalar shrinkage of the diagonal of
  // R(alpha)^T A R(beta), leaving a search over the two angles.
  auto rot = [](double t) {
    Eigen::Matrix2d r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return r;
  };
  auto shrink = [&](double b) {
    return b > tau ? b - tau : (b < -tau ? b + tau : 0.0);
  };
  auto build = [&](double al, double be) {
    const Eigen::Matrix2d b = rot(al).transpose() * a * rot(be);
    const Eigen::Vector2d sv(shrink(b(0, 0)), shrink(b(1, 1)));
    return Matrix(rot(al) * sv.asDiagonal() * rot(be).transpose());
  };
  auto f = [&](double al, double be) {
    const Matrix x = build(al, be);
    const auto s = singular_values_2x2(pack(x));
    return tau * (s[0] + s[1]) + 0.5 * (x - a).squaredNorm();
  };

  constexpr int kCoarse = 120;
  const double pi = std::acos(-1.0);
  double best_al = 0.0, best_be = 0.0, best = f(0.0, 0.0);
  for (int i = 0; i < kCoarse; ++i)
    for (int j = 0; j < kCoarse; ++j) {
      const double al = pi * i / kCoarse, be = 2.0 * pi * j / kCoarse;
      const double v = f(al, be);
      if (v < best) {
        best = v;
        best_al = al;
        best_be = be;
      }
    }
  double r = 2.0 * pi / kCoarse;
  while (r > 1e-13) {
    const double cal = best_al, cbe = best_be;
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j) {
        const double al = cal + r * i / 4.0, be = cbe + r * j / 4.0;
        const double v = f(al, be);
        if (v < best) {
          best = v;
          best_al = al;
          best_be = be;
        }
      }
    if (cal == best_al && cbe == best_be) r *= 0.5;
  }
  return build(best_al, best_be);
}

Matrix project_halfspace_grid(const Matrix& x, const Matrix& a, double level) {
  if ((a.array() * x.array()).sum() >= level) return x;
  // Infeasible points project onto the boundary; search it through an
  // orthonormal basis of the complement of A.
  const Eigen::Vector4d normal = Eigen::Vector4d(a(0, 0), a(0, 1), a(1, 0), a(1, 1)).normalized();
  Eigen::Matrix4d seed = Eigen::Matrix4d::Identity();
  seed.col(0) = normal;
  const Eigen::Matrix4d q = Eigen::HouseholderQR<Eigen::Matrix4d>(seed).householderQ();
  const Eigen::Matrix<double, 4, 3> basis = q.rightCols<3>();
  const Eigen::Vector4d base = normal * level / a.norm();
  const Eigen::Vector4d xv(x(0, 0), x(0, 1), x(1, 0), x(1, 1));
  auto point = [&](const Point4& t) {
    return Eigen::Vector4d(base + basis * Eigen::Vector3d(t[0], t[1], t[2]));
  };
  auto f = [&](const Point4& t) { return (point(t) - xv).squaredNorm() + t[3] * t[3]; };
  const double radius = xv.norm() + std::abs(level) / a.norm() + 1.0;
  const Eigen::Vector4d y = point(grid_minimize(f, {0.0, 0.0, 0.0, 0.0}, radius, false));
  return unpack({y(0), y(1), y(2), y(3)});
}

}  // namespace laros::testkit
