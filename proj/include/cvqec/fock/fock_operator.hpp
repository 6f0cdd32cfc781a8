#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cvqec::fock {

using Complex = std::complex<double>;

enum class PayloadKind { pure_vector, density_operator };

// Structured record of everything an operation had to drop or flag.
struct Diagnostics {
  double truncated_weight = 0.0;  // norm (pure) or trace (density) lost at cutoffs
  int truncation_events = 0;
  std::vector<std::string> warnings;

  void record_truncation(double lost, std::string_view where);
  void warn(std::string message);
  void merge(const Diagnostics& other);
};

// Dense state over a product Fock basis. Modes are addressed by label only.
//
// Storage is row-major with the first mode varying slowest. A density operator
// is stored as a tensor over 2n slots (all ket indices, then all bra indices),
// which is the same memory layout as the N x N matrix rho[ket][bra].
class FockOperator {
 public:
  FockOperator(std::vector<std::string> labels, std::vector<int> cutoffs, PayloadKind kind);

  static FockOperator vacuum(std::vector<std::string> labels, std::vector<int> cutoffs);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<int>& cutoffs() const noexcept { return cutoffs_; }
  std::size_t mode_count() const noexcept { return labels_.size(); }
  bool has_mode(std::string_view label) const noexcept;
  std::size_t mode_index(std::string_view label) const;
  int cutoff(std::string_view label) const { return cutoffs_[mode_index(label)]; }

  PayloadKind kind() const noexcept { return kind_; }
  bool is_pure() const noexcept { return kind_ == PayloadKind::pure_vector; }

  // Dimension of the product basis (not of the payload).
  std::size_t basis_size() const noexcept { return basis_size_; }

  // Tensor shape of the payload: one slot per mode for pure vectors, two for densities.
  std::vector<std::size_t> slot_dims() const;

  std::size_t flat_index(const std::vector<int>& occupation) const;
  Complex amplitude(const std::vector<int>& occupation) const;
  Complex& amplitude(const std::vector<int>& occupation);
  Complex element(const std::vector<int>& ket, const std::vector<int>& bra) const;
  Complex& element(const std::vector<int>& ket, const std::vector<int>& bra);

  const std::vector<Complex>& data() const noexcept { return data_; }
  std::vector<Complex>& data() noexcept { return data_; }

  // Squared norm for pure vectors, trace for density operators.
  double weight() const;

  const Diagnostics& diagnostics() const noexcept { return diagnostics_; }
  Diagnostics& diagnostics() noexcept { return diagnostics_; }

 private:
  std::vector<std::string> labels_;
  std::vector<int> cutoffs_;
  PayloadKind kind_;
  std::size_t basis_size_ = 1;
  std::vector<Complex> data_;
  Diagnostics diagnostics_;
};

}  // namespace cvqec::fock
