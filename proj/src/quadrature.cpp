#include "eddydg/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace eddydg {

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    T(k, k - 1) = T(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (es.eigenvalues()(i) + 1.0);
    const double v0 = es.eigenvectors()(0, i);
    w[i] = v0 * v0;  // sums to 1 on [0, 1]
  }
}

namespace {

QuadratureRule build(EntityKind kind, int degree) {
  QuadratureRule rule;
  rule.kind = kind;
  rule.degree = degree;
  if (degree <= 1) {
    switch (kind) {
      case EntityKind::Tetrahedron:
        rule.points = {{0.25, 0.25, 0.25, 0.25}};
        rule.weights = {1.0 / 6.0};
        break;
      case EntityKind::Triangle:
        rule.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0}};
        rule.weights = {0.5};
        break;
      case EntityKind::Segment:
        rule.points = {{0.5, 0.5, 0.0, 0.0}};
        rule.weights = {1.0};
        break;
    }
    return rule;
  }
  std::vector<double> x, w;
  switch (kind) {
    case EntityKind::Segment: {
      gauss_legendre_01((degree + 2) / 2, x, w);
      for (std::size_t i = 0; i < x.size(); ++i) {
        rule.points.push_back({1.0 - x[i], x[i], 0.0, 0.0});
        rule.weights.push_back(w[i]);
      }
      break;
    }
    case EntityKind::Triangle: {
      gauss_legendre_01((degree + 3) / 2, x, w);
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
          const double u = x[i], v = x[j] * (1.0 - x[i]);
          rule.points.push_back({1.0 - u - v, u, v, 0.0});
          rule.weights.push_back(w[i] * w[j] * (1.0 - x[i]));
        }
      break;
    }
    case EntityKind::Tetrahedron: {
      gauss_legendre_01((degree + 4) / 2, x, w);
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
          for (std::size_t k = 0; k < x.size(); ++k) {
            const double u = x[i];
            const double v = x[j] * (1.0 - u);
            const double t = x[k] * (1.0 - u) * (1.0 - x[j]);
            rule.points.push_back({1.0 - u - v - t, u, v, t});
            rule.weights.push_back(w[i] * w[j] * w[k] * (1.0 - u) * (1.0 - u) * (1.0 - x[j]));
          }
      break;
    }
  }
  return rule;
}

}  // namespace

const QuadratureRule& quadrature(EntityKind kind, int degree) {
  if (degree < 0 || degree > kMaxQuadratureDegree)
    throw std::invalid_argument("unsupported quadrature degree " + std::to_string(degree));
  static std::mutex mutex;
  static std::map<std::pair<int, int>, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(static_cast<int>(kind), degree);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build(kind, degree)).first;
  return it->second;
}

}  // namespace eddydg
