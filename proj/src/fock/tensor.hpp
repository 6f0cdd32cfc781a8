#pragma once

// Slot-level tensor kernels shared by the Fock operations. Private to the library.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cvqec::fock::detail {

using Complex = std::complex<double>;

struct Tensor {
  std::vector<std::size_t> dims;
  std::vector<Complex> data;
};

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims);

// Offsets sum_s idx_s * stride_s over all index combinations of `slots`, in
// row-major order of those slots.
std::vector<std::size_t> enumerate_offsets(const std::vector<std::size_t>& dims,
                                           const std::vector<std::size_t>& strides,
                                           const std::vector<std::size_t>& slots);

std::vector<std::size_t> complement(std::size_t slot_count, const std::vector<std::size_t>& slots);

// out[.., i, ..] = sum_j m(i, j) in[.., j, ..]; the slot may change dimension.
Tensor apply_slot_matrix(const Tensor& in, std::size_t slot, const Eigen::MatrixXcd& m);

// Photon-number-conserving two-slot map. blocks[N](k, m) is the amplitude
// <k, N-k| U |m, N-m>. Components leaving the slot dimensions are dropped.
Tensor apply_pair_conserving(const Tensor& in, std::size_t slot_a, std::size_t slot_b,
                             const std::vector<Eigen::MatrixXd>& blocks, bool conjugate);

// Removes `slot`, contracting it with coefficients w: out = sum_i w_i in[.., i, ..].
Tensor contract_slot(const Tensor& in, std::size_t slot, const std::vector<Complex>& w);

// Removes two slots, contracting with w(i_a, i_b).
Tensor contract_pair(const Tensor& in, std::size_t slot_a, std::size_t slot_b, const Eigen::MatrixXcd& w);

// Removes two slots of equal dimension by summing their diagonal.
Tensor trace_pair(const Tensor& in, std::size_t slot_a, std::size_t slot_b);

}  // namespace cvqec::fock::detail
