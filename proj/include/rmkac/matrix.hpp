// Small dense linear algebra for dimensions up to kMaxDim.
#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmkac {

inline constexpr int kMaxDim = 8;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPositiveSemidefinite : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Vector {
 public:
  Vector() = default;
  explicit Vector(int dim);
  Vector(std::initializer_list<double> values);
  explicit Vector(std::span<const double> values);

  static Vector unit(int dim, int axis);

  int dim() const { return dim_; }
  double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const { return {v_.data(), static_cast<std::size_t>(dim_)}; }
  std::span<double> values() { return {v_.data(), static_cast<std::size_t>(dim_)}; }

  double dot(const Vector& o) const;
  double norm() const;
  double squared_norm() const;
  Vector normalized() const;

  Vector& operator+=(const Vector& o);
  Vector& operator-=(const Vector& o);
  Vector& operator*=(double s);

 private:
  int dim_ = 0;
  std::array<double, kMaxDim> v_{};
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);
Vector operator-(Vector a);

// Square matrix, row-major with stride dim.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int dim);
  Matrix(int dim, std::initializer_list<double> row_major);
  Matrix(int dim, std::span<const double> row_major);
  Matrix(const Matrix& o) { copy_from(o); }
  Matrix& operator=(const Matrix& o) {
    if (this != &o) copy_from(o);
    return *this;
  }

  static Matrix identity(int dim);
  static Matrix diagonal(const Vector& diag);
  static Matrix outer(const Vector& u, const Vector& v);

  int dim() const { return dim_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * dim_ + j)]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * dim_ + j)]; }
  std::span<const double> data() const { return {a_.data(), static_cast<std::size_t>(dim_ * dim_)}; }
  std::span<double> data() { return {a_.data(), static_cast<std::size_t>(dim_ * dim_)}; }

  Matrix transpose() const;
  double trace() const;
  Vector column(int j) const;
  Vector row(int i) const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

 private:
  void copy_from(const Matrix& o);
  int dim_ = 0;
  std::array<double, kMaxDim * kMaxDim> a_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& v);
// a^T v without forming the transpose.
Vector transpose_times(const Matrix& a, const Vector& v);

// Frobenius norm, the natural submultiplicative norm for non-symmetric matrices.
double frobenius_norm(const Matrix& a);

class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim) : m_(dim) {}
  // Symmetrizes (a + a^T) / 2.
  explicit SymMatrix(const Matrix& a);
  SymMatrix(int dim, std::initializer_list<double> row_major);

  static SymMatrix identity(int dim);
  static SymMatrix diagonal(const Vector& diag);
  static SymMatrix outer(const Vector& u);
  // u^T a u style congruence a m a^T, symmetrized.
  static SymMatrix congruence(const Matrix& a, const SymMatrix& m);

  int dim() const { return m_.dim(); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v);
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace(); }
  double quadratic_form(const Vector& x) const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

 private:
  Matrix m_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

double psd_tolerance(const SymMatrix& m);

class PsdMatrix {
 public:
  PsdMatrix() = default;
  // Throws NotPositiveSemidefinite when an eigenvalue is below -psd_tolerance.
  explicit PsdMatrix(const SymMatrix& m);

  static PsdMatrix identity(int dim);
  // a s a^T; PSD by construction so the spectral check is skipped.
  static PsdMatrix congruence(const Matrix& a, const PsdMatrix& s);
  // Wraps a matrix known to be PSD by construction (sums, congruences, means).
  static PsdMatrix trusted(const SymMatrix& m);

  int dim() const { return m_.dim(); }
  double operator()(int i, int j) const { return m_(i, j); }
  const SymMatrix& sym() const { return m_; }
  const Matrix& matrix() const { return m_.matrix(); }
  double trace() const { return m_.trace(); }

  PsdMatrix& operator+=(const PsdMatrix& o);
  // s must be nonnegative.
  PsdMatrix& scale(double s);

 private:
  SymMatrix m_;
};

struct SpectralDecomposition {
  Vector values;               // descending
  std::vector<Vector> vectors;  // orthonormal, first nonzero component positive
  SymMatrix reconstruct() const;
};

SpectralDecomposition spectral_decompose(const SymMatrix& m);

enum class NormOrder { one, two, inf };

// Schatten norms: one = nuclear, two = Frobenius, inf = spectral.
double matrix_norm(const SymMatrix& m, NormOrder order);
double matrix_norm(const SpectralDecomposition& sd, NormOrder order);

PsdMatrix psd_sqrt(const PsdMatrix& m);

double trace_inner(const SymMatrix& a, const SymMatrix& b);

// Orthonormal basis of symmetric matrices under the trace inner product:
// E_ii and (E_ij + E_ji)/sqrt(2) for i < j.
int sym_basis_size(int dim);
SymMatrix sym_basis_element(int dim, int index);
std::vector<double> sym_coordinates(const SymMatrix& m);
SymMatrix sym_from_coordinates(int dim, std::span<const double> coords);

std::string to_string(const Matrix& m);

}  // namespace rmkac
