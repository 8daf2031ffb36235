#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace loctens {

/// Point or direction in R^2 or R^3.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Exponent vector over the coordinates; unused trailing slots are zero.
using MultiIndex = std::array<int, 3>;

inline constexpr int kMaxRank = 40;

Vec vec2(double x, double y);
Vec vec3(double x, double y, double z);
Vec unit_vector(int dim, int axis);

/// Number of multi-indices of total degree p over n coordinates.
int multi_index_count(int n, int p);
/// Graded-lexicographic position of alpha among degree |alpha| indices.
int multi_index_offset(int n, const MultiIndex& alpha);
/// All degree-p multi-indices in storage order.
const std::vector<MultiIndex>& multi_indices(int n, int p);

double factorial(int k);
std::uint64_t binomial(int n, int k);

/// Dense symmetric tensor stored as polynomial coefficients.
///
/// The coefficient of x^alpha is kept, so that T(x,...,x) is the polynomial
/// value and the symmetric product is a polynomial multiply.
class SymTensor {
 public:
  SymTensor() : SymTensor(3, 0) {}
  SymTensor(int dim, int rank);

  static SymTensor scalar(int dim, double c);

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return coeffs_.size(); }

  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  double coeff(const MultiIndex& alpha) const;
  double& coeff(const MultiIndex& alpha);

  /// Full component T_{i1..ip}.
  double component(std::span<const int> indices) const;

  double eval(std::span<const Vec> args) const;
  double eval(std::initializer_list<Vec> args) const;
  /// T(a,...,a).
  double eval_diagonal(const Vec& a) const;

  double max_norm() const;
  bool is_zero() const;
  bool approx_equal(const SymTensor& other, double atol = 1e-12,
                    double rtol = 1e-10) const;

  SymTensor& operator+=(const SymTensor& o);
  SymTensor& operator-=(const SymTensor& o);
  SymTensor& operator*=(double c);
  /// this += c * o
  void axpy(double c, const SymTensor& o);

  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double c, SymTensor a) { return a *= c; }
  friend SymTensor operator*(SymTensor a, double c) { return a *= c; }
  SymTensor operator-() const { return -1.0 * *this; }

  /// Bitwise equality of shape and coefficients.
  bool operator==(const SymTensor& o) const = default;

  std::string describe() const;

 private:
  void check_same_shape(const SymTensor& o) const;

  int dim_;
  int rank_;
  std::vector<double> coeffs_;
};

SymTensor sym_product(const SymTensor& a, const SymTensor& b);
SymTensor vector_tensor(const Vec& v);
SymTensor vector_power(const Vec& v, int r);
SymTensor metric_Q(int n);
SymTensor metric_power(int n, int m);
SymTensor metric_QL(std::span<const Vec> basis);

/// Orthogonal map of R^n.
class Rotation {
 public:
  explicit Rotation(const Mat& m);

  static Rotation identity(int n);
  static Rotation planar(double angle);
  static Rotation about_axis(const Vec& axis, double angle);
  /// Reflection across the hyperplane orthogonal to normal.
  static Rotation reflection(const Vec& normal);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  bool proper() const { return det_ > 0; }
  int det() const { return det_; }

  Vec apply(const Vec& v) const { return m_ * v; }
  Rotation inverse() const;
  Rotation operator*(const Rotation& o) const;

 private:
  Mat m_;
  int det_;
};

SymTensor rotate_tensor(const SymTensor& t, const Rotation& theta);

Vec cross3(const Vec& v, const Vec& u);
Vec ubar2(const Vec& u);

}  // namespace loctens
