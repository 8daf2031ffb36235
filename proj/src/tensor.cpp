#include "loctens/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/LU>

namespace loctens {

Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

Vec unit_vector(int dim, int axis) {
  Vec v = Vec::Zero(dim);
  v[axis] = 1.0;
  return v;
}

int multi_index_count(int n, int p) {
  if (p < 0) return 0;
  if (n == 2) return p + 1;
  if (n == 3) return (p + 1) * (p + 2) / 2;
  throw std::invalid_argument("dimension must be 2 or 3, got " + std::to_string(n));
}

int multi_index_offset(int n, const MultiIndex& alpha) {
  int p = alpha[0] + alpha[1] + alpha[2];
  int d = p - alpha[0];
  if (n == 2) return d;
  return d * (d + 1) / 2 + (d - alpha[1]);
}

namespace {

using IndexTable = std::array<std::vector<MultiIndex>, kMaxRank + 1>;

IndexTable build_table(int n) {
  IndexTable table;
  for (int p = 0; p <= kMaxRank; ++p) {
    auto& list = table[p];
    if (n == 2) {
      for (int a = p; a >= 0; --a) list.push_back({a, p - a, 0});
    } else {
      for (int a = p; a >= 0; --a)
        for (int b = p - a; b >= 0; --b) list.push_back({a, b, p - a - b});
    }
  }
  return table;
}

void check_dim(int n) {
  if (n != 2 && n != 3)
    throw std::invalid_argument("dimension must be 2 or 3, got " + std::to_string(n));
}

void check_rank(int p) {
  if (p < 0 || p > kMaxRank)
    throw std::invalid_argument("tensor rank out of range: " + std::to_string(p));
}

double alpha_factorial(const MultiIndex& a) {
  return factorial(a[0]) * factorial(a[1]) * factorial(a[2]);
}

}  // namespace

const std::vector<MultiIndex>& multi_indices(int n, int p) {
  check_dim(n);
  check_rank(p);
  static const IndexTable t2 = build_table(2);
  static const IndexTable t3 = build_table(3);
  return n == 2 ? t2[p] : t3[p];
}

double factorial(int k) {
  static const auto table = [] {
    std::array<double, 2 * kMaxRank + 2> f{};
    f[0] = 1.0;
    for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * static_cast<double>(i);
    return f;
  }();
  if (k < 0 || k >= static_cast<int>(table.size()))
    throw std::out_of_range("factorial argument out of range");
  return table[k];
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

SymTensor::SymTensor(int dim, int rank) : dim_(dim), rank_(rank) {
  check_dim(dim);
  check_rank(rank);
  coeffs_.assign(multi_index_count(dim, rank), 0.0);
}

SymTensor SymTensor::scalar(int dim, double c) {
  SymTensor t(dim, 0);
  t.coeffs_[0] = c;
  return t;
}

double SymTensor::coeff(const MultiIndex& alpha) const {
  return coeffs_.at(multi_index_offset(dim_, alpha));
}

double& SymTensor::coeff(const MultiIndex& alpha) {
  return coeffs_.at(multi_index_offset(dim_, alpha));
}

double SymTensor::component(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != rank_)
    throw std::invalid_argument("component: index count does not match rank");
  MultiIndex alpha{0, 0, 0};
  for (int i : indices) {
    if (i < 0 || i >= dim_) throw std::out_of_range("component: index out of range");
    ++alpha[i];
  }
  return coeff(alpha) * alpha_factorial(alpha) / factorial(rank_);
}

double SymTensor::eval(std::span<const Vec> args) const {
  if (static_cast<int>(args.size()) != rank_)
    throw std::invalid_argument("eval: expected " + std::to_string(rank_) + " arguments, got " +
                                std::to_string(args.size()));
  SymTensor prod = SymTensor::scalar(dim_, 1.0);
  for (const Vec& a : args) {
    if (a.size() != dim_) throw std::invalid_argument("eval: argument dimension mismatch");
    prod = sym_product(prod, vector_tensor(a));
  }
  const auto& idx = multi_indices(dim_, rank_);
  double sum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    sum += coeffs_[i] * prod.coeffs_[i] * alpha_factorial(idx[i]);
  return sum / factorial(rank_);
}

double SymTensor::eval(std::initializer_list<Vec> args) const {
  std::vector<Vec> v(args);
  return eval(std::span<const Vec>(v));
}

double SymTensor::eval_diagonal(const Vec& a) const {
  if (a.size() != dim_) throw std::invalid_argument("eval: argument dimension mismatch");
  const auto& idx = multi_indices(dim_, rank_);
  double sum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double m = coeffs_[i];
    for (int c = 0; c < dim_; ++c) m *= std::pow(a[c], idx[i][c]);
    sum += m;
  }
  return sum;
}

double SymTensor::max_norm() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool SymTensor::is_zero() const {
  for (double c : coeffs_)
    if (c != 0.0) return false;
  return true;
}

bool SymTensor::approx_equal(const SymTensor& other, double atol, double rtol) const {
  if (dim_ != other.dim_ || rank_ != other.rank_) return false;
  double scale = std::max(max_norm(), other.max_norm());
  double diff = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    diff = std::max(diff, std::abs(coeffs_[i] - other.coeffs_[i]));
  return diff <= atol + rtol * scale;
}

void SymTensor::check_same_shape(const SymTensor& o) const {
  if (dim_ != o.dim_ || rank_ != o.rank_)
    throw std::invalid_argument("tensor shape mismatch: " + describe() + " vs " + o.describe());
}

SymTensor& SymTensor::operator+=(const SymTensor& o) {
  check_same_shape(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SymTensor& SymTensor::operator-=(const SymTensor& o) {
  check_same_shape(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SymTensor& SymTensor::operator*=(double c) {
  for (double& x : coeffs_) x *= c;
  return *this;
}

void SymTensor::axpy(double c, const SymTensor& o) {
  check_same_shape(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += c * o.coeffs_[i];
}

std::string SymTensor::describe() const {
  std::ostringstream os;
  os << "rank-" << rank_ << " tensor on R^" << dim_;
  return os.str();
}

SymTensor sym_product(const SymTensor& a, const SymTensor& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("sym_product: dimension mismatch (" + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()) + ")");
  const int n = a.dim();
  SymTensor c(n, a.rank() + b.rank());
  const auto& ia = multi_indices(n, a.rank());
  const auto& ib = multi_indices(n, b.rank());
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  auto cc = c.coeffs();
  for (std::size_t i = 0; i < ia.size(); ++i) {
    if (ca[i] == 0.0) continue;
    for (std::size_t j = 0; j < ib.size(); ++j) {
      if (cb[j] == 0.0) continue;
      MultiIndex s{ia[i][0] + ib[j][0], ia[i][1] + ib[j][1], ia[i][2] + ib[j][2]};
      cc[multi_index_offset(n, s)] += ca[i] * cb[j];
    }
  }
  return c;
}

SymTensor vector_tensor(const Vec& v) {
  SymTensor t(static_cast<int>(v.size()), 1);
  for (int i = 0; i < v.size(); ++i) t.coeff(MultiIndex{i == 0, i == 1, i == 2}) = v[i];
  return t;
}

SymTensor vector_power(const Vec& v, int r) {
  if (r < 0) throw std::invalid_argument("vector_power: negative exponent");
  const int n = static_cast<int>(v.size());
  SymTensor t(n, r);
  const auto& idx = multi_indices(n, r);
  auto c = t.coeffs();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const MultiIndex& a = idx[i];
    double m = static_cast<double>(binomial(r, a[0]) * binomial(r - a[0], a[1]));
    for (int k = 0; k < n; ++k)
      for (int e = 0; e < a[k]; ++e) m *= v[k];
    c[i] = m;
  }
  return t;
}

SymTensor metric_Q(int n) {
  SymTensor q(n, 2);
  for (int i = 0; i < n; ++i) {
    MultiIndex a{0, 0, 0};
    a[i] = 2;
    q.coeff(a) = 1.0;
  }
  return q;
}

SymTensor metric_power(int n, int m) {
  if (m < 0) throw std::invalid_argument("metric_power: negative exponent");
  SymTensor r = SymTensor::scalar(n, 1.0);
  const SymTensor q = metric_Q(n);
  for (int i = 0; i < m; ++i) r = sym_product(r, q);
  return r;
}

SymTensor metric_QL(std::span<const Vec> basis) {
  if (basis.empty()) throw std::invalid_argument("metric_QL: empty basis");
  const int n = static_cast<int>(basis[0].size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (basis[j].size() != n) throw std::invalid_argument("metric_QL: dimension mismatch");
      double expect = i == j ? 1.0 : 0.0;
      if (std::abs(basis[i].dot(basis[j]) - expect) > 1e-10)
        throw std::invalid_argument("metric_QL: basis is not orthonormal");
    }
  SymTensor q(n, 2);
  for (const Vec& b : basis) q += vector_power(b, 2);
  return q;
}

Rotation::Rotation(const Mat& m) : m_(m) {
  if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 3))
    throw std::invalid_argument("rotation matrix must be 2x2 or 3x3");
  Mat g = m.transpose() * m;
  double err = (g - Mat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-12)
    throw std::invalid_argument("rotation matrix columns not orthonormal (error " +
                                std::to_string(err) + ")");
  det_ = m.determinant() > 0 ? 1 : -1;
}

Rotation Rotation::identity(int n) { return Rotation(Mat::Identity(n, n)); }

Rotation Rotation::planar(double angle) {
  Mat m(2, 2);
  m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return Rotation(m);
}

Rotation Rotation::about_axis(const Vec& axis, double angle) {
  if (axis.size() != 3) throw std::invalid_argument("about_axis needs a 3-vector");
  Vec k = axis.normalized();
  Mat kx(3, 3);
  kx << 0, -k[2], k[1], k[2], 0, -k[0], -k[1], k[0], 0;
  Mat m = Mat::Identity(3, 3) + std::sin(angle) * kx + (1 - std::cos(angle)) * kx * kx;
  return Rotation(m);
}

Rotation Rotation::reflection(const Vec& normal) {
  Vec k = normal.normalized();
  Mat m = Mat::Identity(k.size(), k.size()) - 2.0 * k * k.transpose();
  return Rotation(m);
}

Rotation Rotation::inverse() const { return Rotation(Mat(m_.transpose())); }

Rotation Rotation::operator*(const Rotation& o) const { return Rotation(Mat(m_ * o.m_)); }

SymTensor rotate_tensor(const SymTensor& t, const Rotation& theta) {
  const int n = t.dim();
  if (theta.dim() != n) throw std::invalid_argument("rotate_tensor: dimension mismatch");
  const int p = t.rank();
  // x_i is replaced by <column i of theta, x>
  std::vector<std::vector<SymTensor>> powers(n);
  for (int i = 0; i < n; ++i) {
    Vec col = theta.matrix().col(i);
    powers[i].reserve(p + 1);
    for (int k = 0; k <= p; ++k) powers[i].push_back(vector_power(col, k));
  }
  SymTensor out(n, p);
  const auto& idx = multi_indices(n, p);
  auto c = t.coeffs();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (c[i] == 0.0) continue;
    const MultiIndex& a = idx[i];
    SymTensor term = sym_product(powers[0][a[0]], powers[1][a[1]]);
    if (n == 3) term = sym_product(term, powers[2][a[2]]);
    out.axpy(c[i], term);
  }
  return out;
}

Vec cross3(const Vec& v, const Vec& u) {
  if (v.size() != 3 || u.size() != 3) throw std::invalid_argument("cross3 needs 3-vectors");
  return vec3(v[1] * u[2] - v[2] * u[1], v[2] * u[0] - v[0] * u[2], v[0] * u[1] - v[1] * u[0]);
}

Vec ubar2(const Vec& u) {
  if (u.size() != 2) throw std::invalid_argument("ubar2 needs a 2-vector");
  return vec2(-u[1], u[0]);
}

}  // namespace loctens
