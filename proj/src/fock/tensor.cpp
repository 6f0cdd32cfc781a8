#include "tensor.hpp"

#include <algorithm>

namespace cvqec::fock::detail {

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) strides[i - 1] = strides[i] * dims[i];
  return strides;
}

std::vector<std::size_t> enumerate_offsets(const std::vector<std::size_t>& dims,
                                           const std::vector<std::size_t>& strides,
                                           const std::vector<std::size_t>& slots) {
  std::vector<std::size_t> offsets{0};
  for (std::size_t s : slots) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * dims[s]);
    for (std::size_t base : offsets) {
      for (std::size_t i = 0; i < dims[s]; ++i) next.push_back(base + i * strides[s]);
    }
    offsets = std::move(next);
  }
  return offsets;
}

std::vector<std::size_t> complement(std::size_t slot_count, const std::vector<std::size_t>& slots) {
  std::vector<std::size_t> rest;
  for (std::size_t s = 0; s < slot_count; ++s) {
    if (std::find(slots.begin(), slots.end(), s) == slots.end()) rest.push_back(s);
  }
  return rest;
}

Tensor apply_slot_matrix(const Tensor& in, std::size_t slot, const Eigen::MatrixXcd& m) {
  Tensor out;
  out.dims = in.dims;
  out.dims[slot] = static_cast<std::size_t>(m.rows());
  std::size_t total = 1;
  for (auto d : out.dims) total *= d;
  out.data.assign(total, Complex{});

  const auto in_strides = strides_of(in.dims);
  const auto out_strides = strides_of(out.dims);
  const auto rest = complement(in.dims.size(), {slot});
  const auto in_bases = enumerate_offsets(in.dims, in_strides, rest);
  const auto out_bases = enumerate_offsets(out.dims, out_strides, rest);
  const std::size_t si = in_strides[slot];
  const std::size_t so = out_strides[slot];
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(m.cols());

  for (std::size_t b = 0; b < in_bases.size(); ++b) {
    const Complex* src = in.data.data() + in_bases[b];
    Complex* dst = out.data.data() + out_bases[b];
    for (std::size_t j = 0; j < cols; ++j) {
      const Complex v = src[j * si];
      if (v == Complex{}) continue;
      for (std::size_t i = 0; i < rows; ++i) dst[i * so] += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * v;
    }
  }
  return out;
}

Tensor apply_pair_conserving(const Tensor& in, std::size_t slot_a, std::size_t slot_b,
                             const std::vector<Eigen::MatrixXd>& blocks, bool conjugate) {
  Tensor out{in.dims, std::vector<Complex>(in.data.size())};
  const auto strides = strides_of(in.dims);
  const auto rest = complement(in.dims.size(), {slot_a, slot_b});
  const auto bases = enumerate_offsets(in.dims, strides, rest);
  const int da = static_cast<int>(in.dims[slot_a]);
  const int db = static_cast<int>(in.dims[slot_b]);
  const std::size_t sa = strides[slot_a];
  const std::size_t sb = strides[slot_b];
  (void)conjugate;  // the beam-splitter blocks are real

  for (std::size_t base : bases) {
    const Complex* src = in.data.data() + base;
    Complex* dst = out.data.data() + base;
    for (int total = 0; total <= da + db - 2; ++total) {
      const auto& u = blocks[static_cast<std::size_t>(total)];
      const int lo = std::max(0, total - (db - 1));
      const int hi = std::min(total, da - 1);
      for (int m = lo; m <= hi; ++m) {
        const Complex v = src[static_cast<std::size_t>(m) * sa + static_cast<std::size_t>(total - m) * sb];
        if (v == Complex{}) continue;
        for (int k = lo; k <= hi; ++k) {
          dst[static_cast<std::size_t>(k) * sa + static_cast<std::size_t>(total - k) * sb] += u(k, m) * v;
        }
      }
    }
  }
  return out;
}

Tensor contract_slot(const Tensor& in, std::size_t slot, const std::vector<Complex>& w) {
  Eigen::MatrixXcd row(1, static_cast<Eigen::Index>(in.dims[slot]));
  for (std::size_t i = 0; i < in.dims[slot]; ++i) row(0, static_cast<Eigen::Index>(i)) = i < w.size() ? w[i] : Complex{};
  Tensor reduced = apply_slot_matrix(in, slot, row);
  reduced.dims.erase(reduced.dims.begin() + static_cast<std::ptrdiff_t>(slot));
  return reduced;
}

Tensor contract_pair(const Tensor& in, std::size_t slot_a, std::size_t slot_b, const Eigen::MatrixXcd& w) {
  if (slot_a == 0 && slot_b == 1) {
    // Leading pair: the payload is a row-major (da*db) x rest matrix.
    const auto rows = static_cast<Eigen::Index>(in.dims[0] * in.dims[1]);
    const auto cols = static_cast<Eigen::Index>(in.data.size()) / rows;
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajor> m(in.data.data(), rows, cols);
    const RowMajor wt = w;  // row-major flattening matches (i_a, i_b)
    const Eigen::Map<const Eigen::RowVectorXcd> wf(wt.data(), rows);
    Tensor out;
    out.dims.assign(in.dims.begin() + 2, in.dims.end());
    out.data.resize(static_cast<std::size_t>(cols));
    Eigen::Map<Eigen::RowVectorXcd>(out.data.data(), cols).noalias() = wf * m;
    return out;
  }
  const auto strides = strides_of(in.dims);
  const auto rest = complement(in.dims.size(), {slot_a, slot_b});
  const auto bases = enumerate_offsets(in.dims, strides, rest);

  // Flatten the contraction weights against the pair offsets once.
  std::vector<std::size_t> pair_offsets;
  std::vector<Complex> pair_weights;
  for (std::size_t i = 0; i < in.dims[slot_a]; ++i) {
    for (std::size_t j = 0; j < in.dims[slot_b]; ++j) {
      const Complex c = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (c == Complex{}) continue;
      pair_offsets.push_back(i * strides[slot_a] + j * strides[slot_b]);
      pair_weights.push_back(c);
    }
  }

  Tensor out;
  for (std::size_t s : rest) out.dims.push_back(in.dims[s]);
  out.data.assign(bases.size(), Complex{});
  // Pair entries outermost so the inner sweep over the remaining slots is sequential.
  for (std::size_t p = 0; p < pair_offsets.size(); ++p) {
    const Complex c = pair_weights[p];
    const Complex* src = in.data.data() + pair_offsets[p];
    for (std::size_t b = 0; b < bases.size(); ++b) out.data[b] += c * src[bases[b]];
  }
  return out;
}

Tensor trace_pair(const Tensor& in, std::size_t slot_a, std::size_t slot_b) {
  const auto strides = strides_of(in.dims);
  const auto rest = complement(in.dims.size(), {slot_a, slot_b});
  const auto bases = enumerate_offsets(in.dims, strides, rest);
  const std::size_t step = strides[slot_a] + strides[slot_b];
  Tensor out;
  for (std::size_t s : rest) out.dims.push_back(in.dims[s]);
  out.data.assign(bases.size(), Complex{});
  for (std::size_t b = 0; b < bases.size(); ++b) {
    Complex acc{};
    for (std::size_t i = 0; i < in.dims[slot_a]; ++i) acc += in.data[bases[b] + i * step];
    out.data[b] = acc;
  }
  return out;
}

}  // namespace cvqec::fock::detail
