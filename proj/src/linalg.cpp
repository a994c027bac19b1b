#include "lro/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <lapacke.h>

extern "C" void openblas_set_num_threads(int num_threads);

namespace lro {

namespace {

std::string diagnostics(Eigen::Index n, double norm, int info) {
  return fmt::format("Hermitian eigensolve failed (info={}) for {}x{} matrix, max|H|={:.6g}", info,
                     n, n, norm);
}

bool has_imaginary_part(const Eigen::MatrixXcd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j).imag() != 0.0) return true;
  return false;
}

}  // namespace

void eigh_real(const Eigen::MatrixXd& matrix, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("eigh: matrix is not square");
  const auto n = static_cast<lapack_int>(matrix.rows());
  vectors = matrix;
  values.resize(n);
  const int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, vectors.data(), n, values.data());
  if (info != 0) throw std::runtime_error(diagnostics(n, max_abs(matrix), info));
}

HermitianEigen eigh(const Eigen::MatrixXd& matrix) {
  HermitianEigen out;
  Eigen::MatrixXd vecs;
  eigh_real(matrix, out.values, vecs);
  out.vectors = std::move(vecs);
  return out;
}

HermitianEigen eigh(const Eigen::MatrixXcd& matrix) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("eigh: matrix is not square");
  if (!has_imaginary_part(matrix)) return eigh(Eigen::MatrixXd(matrix.real()));

  const auto n = static_cast<lapack_int>(matrix.rows());
  HermitianEigen out;
  Eigen::MatrixXcd vecs = matrix;
  out.values.resize(n);
  const int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n,
                                  reinterpret_cast<lapack_complex_double*>(vecs.data()), n,
                                  out.values.data());
  if (info != 0) throw std::runtime_error(diagnostics(n, max_abs(matrix), info));
  out.vectors = std::move(vecs);
  return out;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void pin_blas_single_thread() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  pin_blas_single_thread();
  const auto n_threads =
      static_cast<std::size_t>(std::clamp<long>(workers, 1, static_cast<long>(std::max<std::size_t>(count, 1))));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

int resolve_workers(int fallback) {
  if (const char* env = std::getenv("LRO_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, fallback);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(mix(seed) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

}  // namespace lro
