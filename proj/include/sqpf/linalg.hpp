#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace sqpf {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using MatrixXcd = Matrix<Complex>;
using VectorXcd = Vector<Complex>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline int log2_exact(std::size_t n) {
  int bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

/// Kronecker product with the first operand occupying the most significant index.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  Matrix<typename DerivedA::Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Frobenius norm of U^H U - I.
template <typename Derived>
double unitarity_residual(const Eigen::MatrixBase<Derived>& u) {
  const auto n = u.cols();
  using S = typename Derived::Scalar;
  return (u.adjoint() * u - Matrix<S>::Identity(n, n)).norm();
}

}  // namespace sqpf
