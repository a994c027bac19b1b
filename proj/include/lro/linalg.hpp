#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>

#include <Eigen/Dense>

namespace lro {

using cplx = std::complex<double>;

/// Eigen-decomposition of a dense Hermitian matrix. Eigenvalues ascending;
/// eigenvectors are stored real whenever the input had no imaginary part.
struct HermitianEigen {
  Eigen::VectorXd values;
  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> vectors;

  bool is_real() const { return std::holds_alternative<Eigen::MatrixXd>(vectors); }
};

/// Full dense eigensolve (LAPACK divide and conquer). Throws
/// std::runtime_error with matrix diagnostics on non-convergence.
HermitianEigen eigh(const Eigen::MatrixXcd& matrix);
HermitianEigen eigh(const Eigen::MatrixXd& matrix);

/// Eigenvalues and eigenvectors of a real symmetric matrix.
void eigh_real(const Eigen::MatrixXd& matrix, Eigen::VectorXd& values,
               Eigen::MatrixXd& vectors);

/// Largest |a_ij| over the matrix.
double max_abs(const Eigen::MatrixXcd& m);
double max_abs(const Eigen::MatrixXd& m);

/// BLAS runs single-threaded; parallelism is owned by parallel_for so that
/// results never depend on the worker count.
void pin_blas_single_thread();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Results must
/// be written by index; iteration order is unspecified.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body);

/// Seed for the independent random stream `index` under a master seed
/// (SplitMix64 mixing of both).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Worker count from LRO_WORKERS if set, otherwise `fallback`.
int resolve_workers(int fallback);

}  // namespace lro
