#include "rmkac/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace rmkac {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw DimensionMismatch(fmt::format("dimension {} outside [1, {}]", dim, kMaxDim));
}

void require_same(int a, int b, const char* what) {
  if (a != b) throw DimensionMismatch(fmt::format("{}: dimensions {} and {} differ", what, a, b));
}

}  // namespace

// ---- Vector ----

Vector::Vector(int dim) : dim_(dim) { check_dim(dim); }

Vector::Vector(std::initializer_list<double> values) : dim_(static_cast<int>(values.size())) {
  check_dim(dim_);
  std::copy(values.begin(), values.end(), v_.begin());
}

Vector::Vector(std::span<const double> values) : dim_(static_cast<int>(values.size())) {
  check_dim(dim_);
  std::copy(values.begin(), values.end(), v_.begin());
}

Vector Vector::unit(int dim, int axis) {
  Vector e(dim);
  e[axis] = 1.0;
  return e;
}

double Vector::dot(const Vector& o) const {
  require_same(dim_, o.dim_, "dot");
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += v_[i] * o.v_[i];
  return s;
}

double Vector::squared_norm() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += v_[i] * v_[i];
  return s;
}

double Vector::norm() const { return std::sqrt(squared_norm()); }

Vector Vector::normalized() const {
  double n = norm();
  if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
  Vector r = *this;
  r *= 1.0 / n;
  return r;
}

Vector& Vector::operator+=(const Vector& o) {
  require_same(dim_, o.dim_, "vector +");
  for (int i = 0; i < dim_; ++i) v_[i] += o.v_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& o) {
  require_same(dim_, o.dim_, "vector -");
  for (int i = 0; i < dim_; ++i) v_[i] -= o.v_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) v_[i] *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector a) { return a *= s; }
Vector operator-(Vector a) { return a *= -1.0; }

// ---- Matrix ----

Matrix::Matrix(int dim) : dim_(dim) {
  check_dim(dim);
  std::fill_n(a_.begin(), dim * dim, 0.0);
}

Matrix::Matrix(int dim, std::initializer_list<double> row_major) : Matrix(dim) {
  if (static_cast<int>(row_major.size()) != dim * dim)
    throw DimensionMismatch("matrix initializer has the wrong number of entries");
  std::copy(row_major.begin(), row_major.end(), a_.begin());
}

Matrix::Matrix(int dim, std::span<const double> row_major) : Matrix(dim) {
  if (static_cast<int>(row_major.size()) != dim * dim)
    throw DimensionMismatch("matrix data has the wrong number of entries");
  std::copy(row_major.begin(), row_major.end(), a_.begin());
}

void Matrix::copy_from(const Matrix& o) {
  dim_ = o.dim_;
  std::copy_n(o.a_.begin(), dim_ * dim_, a_.begin());
}

Matrix Matrix::identity(int dim) {
  Matrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& diag) {
  Matrix m(diag.dim());
  for (int i = 0; i < diag.dim(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::outer(const Vector& u, const Vector& v) {
  require_same(u.dim(), v.dim(), "outer");
  Matrix m(u.dim());
  for (int i = 0; i < u.dim(); ++i)
    for (int j = 0; j < u.dim(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::trace() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
  return s;
}

Vector Matrix::column(int j) const {
  Vector c(dim_);
  for (int i = 0; i < dim_; ++i) c[i] = (*this)(i, j);
  return c;
}

Vector Matrix::row(int i) const {
  Vector r(dim_);
  for (int j = 0; j < dim_; ++j) r[j] = (*this)(i, j);
  return r;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same(dim_, o.dim_, "matrix +");
  for (int k = 0; k < dim_ * dim_; ++k) a_[k] += o.a_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same(dim_, o.dim_, "matrix -");
  for (int k = 0; k < dim_ * dim_; ++k) a_[k] -= o.a_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (int k = 0; k < dim_ * dim_; ++k) a_[k] *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same(a.dim(), b.dim(), "matrix *");
  const int d = a.dim();
  Matrix c(d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& a, const Vector& v) {
  require_same(a.dim(), v.dim(), "matrix-vector *");
  const int d = a.dim();
  Vector r(d);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += a(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Vector transpose_times(const Matrix& a, const Vector& v) {
  require_same(a.dim(), v.dim(), "transpose-vector *");
  const int d = a.dim();
  Vector r(d);
  for (int i = 0; i < d; ++i) {
    double vi = v[i];
    if (vi == 0.0) continue;
    for (int j = 0; j < d; ++j) r[j] += a(i, j) * vi;
  }
  return r;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return std::sqrt(s);
}

// ---- SymMatrix ----

SymMatrix::SymMatrix(const Matrix& a) : m_(a.dim()) {
  const int d = a.dim();
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double v = 0.5 * (a(i, j) + a(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
}

SymMatrix::SymMatrix(int dim, std::initializer_list<double> row_major)
    : SymMatrix(Matrix(dim, row_major)) {}

SymMatrix SymMatrix::identity(int dim) { return SymMatrix(Matrix::identity(dim)); }
SymMatrix SymMatrix::diagonal(const Vector& diag) { return SymMatrix(Matrix::diagonal(diag)); }
SymMatrix SymMatrix::outer(const Vector& u) { return SymMatrix(Matrix::outer(u, u)); }

SymMatrix SymMatrix::congruence(const Matrix& a, const SymMatrix& m) {
  require_same(a.dim(), m.dim(), "congruence");
  const int d = a.dim();
  // t = a m, then r = t a^T
  Matrix t = a * m.matrix();
  SymMatrix r(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += t(i, k) * a(j, k);
      r.m_(i, j) = s;
      r.m_(j, i) = s;
    }
  return r;
}

void SymMatrix::set(int i, int j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

double SymMatrix::quadratic_form(const Vector& x) const {
  require_same(dim(), x.dim(), "quadratic form");
  const int d = dim();
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double row = 0.0;
    for (int j = 0; j < d; ++j) row += m_(i, j) * x[j];
    s += x[i] * row;
  }
  return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  m_ += o.m_;
  return *this;
}
SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  m_ -= o.m_;
  return *this;
}
SymMatrix& SymMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

double psd_tolerance(const SymMatrix& m) {
  return 1e-8 * std::max(1.0, matrix_norm(m, NormOrder::inf));
}

// ---- PsdMatrix ----

PsdMatrix::PsdMatrix(const SymMatrix& m) : m_(m) {
  SpectralDecomposition sd = spectral_decompose(m);
  double lo = sd.values[m.dim() - 1];
  double tol = 1e-8 * std::max(1.0, matrix_norm(sd, NormOrder::inf));
  if (lo < -tol)
    throw NotPositiveSemidefinite(fmt::format("smallest eigenvalue {:.3e} below -{:.1e}", lo, tol));
}

PsdMatrix PsdMatrix::identity(int dim) { return trusted(SymMatrix::identity(dim)); }

PsdMatrix PsdMatrix::congruence(const Matrix& a, const PsdMatrix& s) {
  return trusted(SymMatrix::congruence(a, s.m_));
}

PsdMatrix PsdMatrix::trusted(const SymMatrix& m) {
  PsdMatrix p;
  p.m_ = m;
  return p;
}

PsdMatrix& PsdMatrix::operator+=(const PsdMatrix& o) {
  m_ += o.m_;
  return *this;
}

PsdMatrix& PsdMatrix::scale(double s) {
  if (s < 0.0) throw std::domain_error("negative scaling of a PSD matrix");
  m_ *= s;
  return *this;
}

// ---- spectral ----

SymMatrix SpectralDecomposition::reconstruct() const {
  const int d = values.dim();
  Matrix m(d);
  for (int k = 0; k < d; ++k) {
    const Vector& v = vectors[k];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) += values[k] * v[i] * v[j];
  }
  return SymMatrix(m);
}

SpectralDecomposition spectral_decompose(const SymMatrix& sym) {
  const int d = sym.dim();
  Matrix a = sym.matrix();
  Matrix v = Matrix::identity(d);
  double total = 0.0;
  for (double x : a.data()) total += x * x;

  constexpr int kMaxSweeps = 100;
  bool done = false;
  for (int sweep = 0; sweep < kMaxSweeps && !done; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-32 * total || off == 0.0) {
      done = true;
      break;
    }
    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < d; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < d; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < d; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!done) {
    double off = 0.0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += a(p, q) * a(p, q);
    if (off > 1e-28 * std::max(total, 1e-300))
      throw ConvergenceError("Jacobi eigen-solver did not converge in 100 sweeps");
  }

  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) > a(y, y); });

  SpectralDecomposition sd;
  sd.values = Vector(d);
  sd.vectors.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    int c = order[static_cast<std::size_t>(k)];
    sd.values[k] = a(c, c);
    Vector col = v.column(c);
    for (int i = 0; i < d; ++i) {
      if (std::abs(col[i]) > 1e-12) {
        if (col[i] < 0.0) col *= -1.0;
        break;
      }
    }
    sd.vectors.push_back(col);
  }
  return sd;
}

double matrix_norm(const SpectralDecomposition& sd, NormOrder order) {
  const int d = sd.values.dim();
  double r = 0.0;
  for (int i = 0; i < d; ++i) {
    double a = std::abs(sd.values[i]);
    switch (order) {
      case NormOrder::one: r += a; break;
      case NormOrder::two: r += a * a; break;
      case NormOrder::inf: r = std::max(r, a); break;
    }
  }
  return order == NormOrder::two ? std::sqrt(r) : r;
}

double matrix_norm(const SymMatrix& m, NormOrder order) {
  if (order == NormOrder::two) return frobenius_norm(m.matrix());
  if (m.dim() == 1) return std::abs(m(0, 0));
  return matrix_norm(spectral_decompose(m), order);
}

PsdMatrix psd_sqrt(const PsdMatrix& m) {
  SpectralDecomposition sd = spectral_decompose(m.sym());
  const int d = m.dim();
  Matrix r(d);
  for (int k = 0; k < d; ++k) {
    double s = std::sqrt(std::max(0.0, sd.values[k]));
    if (s == 0.0) continue;
    const Vector& v = sd.vectors[k];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) r(i, j) += s * v[i] * v[j];
  }
  return PsdMatrix::trusted(SymMatrix(r));
}

double trace_inner(const SymMatrix& a, const SymMatrix& b) {
  require_same(a.dim(), b.dim(), "trace_inner");
  double s = 0.0;
  auto x = a.matrix().data();
  auto y = b.matrix().data();
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

// ---- symmetric basis ----

int sym_basis_size(int dim) { return dim * (dim + 1) / 2; }

namespace {
// index -> (i, j) with diagonal entries first, then upper off-diagonals row by row
std::pair<int, int> basis_pair(int dim, int index) {
  if (index < dim) return {index, index};
  int k = index - dim;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (k-- == 0) return {i, j};
  throw std::out_of_range("symmetric basis index out of range");
}
}  // namespace

SymMatrix sym_basis_element(int dim, int index) {
  auto [i, j] = basis_pair(dim, index);
  SymMatrix m(dim);
  if (i == j)
    m.set(i, i, 1.0);
  else
    m.set(i, j, 1.0 / std::sqrt(2.0));
  return m;
}

std::vector<double> sym_coordinates(const SymMatrix& m) {
  const int d = m.dim();
  std::vector<double> c;
  c.reserve(static_cast<std::size_t>(sym_basis_size(d)));
  for (int i = 0; i < d; ++i) c.push_back(m(i, i));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) c.push_back(std::sqrt(2.0) * m(i, j));
  return c;
}

SymMatrix sym_from_coordinates(int dim, std::span<const double> coords) {
  if (static_cast<int>(coords.size()) != sym_basis_size(dim))
    throw DimensionMismatch("wrong number of symmetric coordinates");
  SymMatrix m(dim);
  std::size_t k = 0;
  for (int i = 0; i < dim; ++i) m.set(i, i, coords[k++]);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) m.set(i, j, coords[k++] / std::sqrt(2.0));
  return m;
}

std::string to_string(const Matrix& m) {
  std::string s = "[";
  for (int i = 0; i < m.dim(); ++i) {
    s += i ? "; " : "";
    for (int j = 0; j < m.dim(); ++j) s += fmt::format("{}{:.6g}", j ? " " : "", m(i, j));
  }
  return s + "]";
}

}  // namespace rmkac
