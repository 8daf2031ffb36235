#include "loctens/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace loctens {

namespace {

QuadRule build_gl(int n) {
  QuadRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return q;
}

TriangleRule build_triangle(int degree) {
  // collapsed coordinates (a(1-b), ab) with Jacobian a
  int na = (degree + 3) / 2;
  int nb = (degree + 2) / 2;
  const QuadRule& ga = gauss_legendre(na);
  const QuadRule& gb = gauss_legendre(nb);
  TriangleRule t;
  for (int i = 0; i < na; ++i) {
    double a = 0.5 * (ga.nodes[i] + 1.0);
    double wa = 0.5 * ga.weights[i];
    for (int j = 0; j < nb; ++j) {
      double b = 0.5 * (gb.nodes[j] + 1.0);
      double wb = 0.5 * gb.weights[j];
      t.points.emplace_back(a * (1.0 - b), a * b);
      t.weights.push_back(wa * wb * a);
    }
  }
  return t;
}

template <class T, class F>
const T& cached(std::map<int, std::unique_ptr<T>>& cache, std::mutex& mu, int key, F build) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<T>(build(key))).first;
  return *it->second;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  if (n < 1 || n > 4096) throw std::invalid_argument("gauss_legendre: bad order");
  static std::map<int, std::unique_ptr<QuadRule>> cache;
  static std::mutex mu;
  return cached(cache, mu, n, build_gl);
}

const TriangleRule& triangle_rule(int degree) {
  if (degree < 0 || degree > 200) throw std::invalid_argument("triangle_rule: bad degree");
  static std::map<int, std::unique_ptr<TriangleRule>> cache;
  static std::mutex mu;
  return cached(cache, mu, degree, build_triangle);
}

}  // namespace loctens
