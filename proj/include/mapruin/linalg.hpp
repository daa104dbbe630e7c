#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace mapruin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

/// Matrix exponential e^{M}. Padé scaling-and-squaring.
Matrix expm(const Matrix& m);

/// Largest real part over the spectrum of a square matrix.
double spectral_abscissa(const Matrix& m);

/// Entrywise max |a_ij|; zero for empty matrices.
double sup_norm(const Matrix& m);

/// Submatrix m[rows, cols] for arbitrary index lists.
Matrix take(const Matrix& m, std::span<const int> rows, std::span<const int> cols);
Vector take(const Vector& v, std::span<const int> idx);
RowVector take(const RowVector& v, std::span<const int> idx);

/// Inverse of a small square matrix, throwing SingularBlock when the
/// reciprocal condition estimate falls below `rcond_min`.
Matrix checked_inverse(const Matrix& m, const char* what, double rcond_min = 1e-14);

}  // namespace mapruin
