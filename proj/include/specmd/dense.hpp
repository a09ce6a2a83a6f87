#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace specmd {

using cplx = std::complex<double>;
using ZVec = std::vector<cplx>;

/// Dense row-major matrix.
template <typename T>
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, T value = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  T* row(std::size_t i) { return data_.data() + i * cols_; }
  const T* row(std::size_t i) const { return data_.data() + i * cols_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using DMat = Mat<double>;
using ZMat = Mat<cplx>;

DMat matmul(const DMat& a, const DMat& b);
ZMat to_complex(const DMat& a);

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace kernels {

/// Packed LU factors with partial pivoting: L below the diagonal (unit
/// diagonal implied), U on and above it. piv[k] is the row swapped into
/// position k during elimination.
struct Lu {
  ZMat a;
  std::vector<int> piv;
};

// OpenMP kernels. Results are bitwise independent of the thread count:
// every output element is produced by exactly one thread with a fixed
// accumulation order.
void matvec(const ZMat& a, std::span<const cplx> x, std::span<cplx> y);
void matvec_real(const DMat& a, std::span<const cplx> x, std::span<cplx> y);
Lu lu_factor(ZMat a);
void lu_solve_in_place(const Lu& f, std::span<cplx> b);

// Plain serial reference implementations, kept for testing and as the
// baseline in bench_kernels.
namespace serial {
void matvec(const ZMat& a, std::span<const cplx> x, std::span<cplx> y);
Lu lu_factor(ZMat a);
void lu_solve_in_place(const Lu& f, std::span<cplx> b);
}  // namespace serial

}  // namespace kernels
}  // namespace specmd
