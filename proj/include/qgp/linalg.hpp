#pragma once

// Dense complex linear algebra for small systems (N up to ~16).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qgp {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

/// Square N x N complex matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static Matrix identity(std::size_t dim);
  static Matrix diagonal(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }

  std::span<const Complex> data() const noexcept { return data_; }

  Vector column(std::size_t col) const;
  void set_column(std::size_t col, const Vector& values);

  Matrix adjoint() const;
  Complex trace() const;
  double max_abs() const;
  double frobenius_norm() const;
  bool is_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(Complex scale);

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Matrix operator*(Complex scale, Matrix m);
Vector operator*(const Matrix& m, const Vector& v);

Matrix commutator(const Matrix& a, const Matrix& b);

/// <a|b>, antilinear in the first argument.
Complex inner(const Vector& a, const Vector& b);
double norm(const Vector& v);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(Complex scale, const Vector& v);

/// ||H - H^dagger||_max.
double hermiticity_defect(const Matrix& h);

/// 1e-10 times the largest entry magnitude.
double default_hermiticity_tol(const Matrix& h);

namespace pauli {
Matrix x();
Matrix y();
Matrix z();
/// x sigma_x + y sigma_y + z sigma_z
Matrix from_vector(double x, double y, double z);
}  // namespace pauli

struct EigenSystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // orthonormal columns
  bool degenerate = false;     // some gap below 1e-10 of the spectral radius
};

/// Cyclic Jacobi eigensolver for complex Hermitian matrices. A negative
/// tolerance selects default_hermiticity_tol. Each eigenvector is phased so
/// that its largest-magnitude component is real and positive.
EigenSystem eigh(const Matrix& h, double hermiticity_tol = -1.0);

/// exp(-i H t) through the spectral decomposition of H.
Matrix expm_unitary(const Matrix& h, double t, double hermiticity_tol = -1.0);

/// ||U^dagger U - I||_max.
double unitarity_defect(const Matrix& u);

/// Determinant by partial-pivot LU; intended for small N.
Complex determinant(const Matrix& m);

}  // namespace qgp
