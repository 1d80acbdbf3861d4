#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace phaselab {

using Complex = std::complex<double>;

// Signals and matrices are always stored complex; a Real field keeps the
// imaginary parts at zero.
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

enum class Field { Real, Complex };

std::string_view to_string(Field field);
Field field_from_string(std::string_view name);

/// True when every imaginary part is exactly zero.
bool is_real_valued(const Vector& x);
bool is_real_valued(const Matrix& x);

/// Hermitian check with a relative tolerance on ||X - X*||_F.
bool is_hermitian(const Matrix& x, double rel_tol = 1e-10);

}  // namespace phaselab
