#include "cvqec/fock/fock_operator.hpp"

#include <algorithm>
#include <set>

#include "cvqec/errors.hpp"

namespace cvqec::fock {

void Diagnostics::record_truncation(double lost, std::string_view where) {
  if (lost <= 1e-15) return;
  truncated_weight += lost;
  ++truncation_events;
  (void)where;
}

void Diagnostics::warn(std::string message) {
  if (std::find(warnings.begin(), warnings.end(), message) == warnings.end()) {
    warnings.push_back(std::move(message));
  }
}

void Diagnostics::merge(const Diagnostics& other) {
  truncated_weight += other.truncated_weight;
  truncation_events += other.truncation_events;
  for (const auto& w : other.warnings) warn(w);
}

FockOperator::FockOperator(std::vector<std::string> labels, std::vector<int> cutoffs, PayloadKind kind)
    : labels_(std::move(labels)), cutoffs_(std::move(cutoffs)), kind_(kind) {
  if (labels_.size() != cutoffs_.size()) throw InvalidParameter("one cutoff per mode label is required");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw InvalidParameter("mode labels must be non-empty");
    if (!seen.insert(labels_[i]).second) throw InvalidParameter("duplicate mode label '" + labels_[i] + "'");
    if (cutoffs_[i] < 0) throw InvalidParameter("cutoff of mode '" + labels_[i] + "' is negative");
    basis_size_ *= static_cast<std::size_t>(cutoffs_[i]) + 1;
  }
  data_.assign(is_pure() ? basis_size_ : basis_size_ * basis_size_, Complex{});
}

FockOperator FockOperator::vacuum(std::vector<std::string> labels, std::vector<int> cutoffs) {
  FockOperator state(std::move(labels), std::move(cutoffs), PayloadKind::pure_vector);
  state.data_[0] = 1.0;
  return state;
}

bool FockOperator::has_mode(std::string_view label) const noexcept {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t FockOperator::mode_index(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InvalidParameter("unknown mode '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<std::size_t> FockOperator::slot_dims() const {
  std::vector<std::size_t> dims;
  const int copies = is_pure() ? 1 : 2;
  for (int c = 0; c < copies; ++c) {
    for (int cut : cutoffs_) dims.push_back(static_cast<std::size_t>(cut) + 1);
  }
  return dims;
}

std::size_t FockOperator::flat_index(const std::vector<int>& occupation) const {
  if (occupation.size() != cutoffs_.size()) throw InvalidParameter("occupation has wrong number of modes");
  std::size_t index = 0;
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
    if (occupation[i] < 0 || occupation[i] > cutoffs_[i]) throw InvalidParameter("occupation beyond cutoff");
    index = index * (static_cast<std::size_t>(cutoffs_[i]) + 1) + static_cast<std::size_t>(occupation[i]);
  }
  return index;
}

Complex FockOperator::amplitude(const std::vector<int>& occupation) const {
  if (!is_pure()) throw InvalidParameter("amplitude() needs a pure vector");
  return data_[flat_index(occupation)];
}

Complex& FockOperator::amplitude(const std::vector<int>& occupation) {
  if (!is_pure()) throw InvalidParameter("amplitude() needs a pure vector");
  return data_[flat_index(occupation)];
}

Complex FockOperator::element(const std::vector<int>& ket, const std::vector<int>& bra) const {
  if (is_pure()) throw InvalidParameter("element() needs a density operator");
  return data_[flat_index(ket) * basis_size_ + flat_index(bra)];
}

Complex& FockOperator::element(const std::vector<int>& ket, const std::vector<int>& bra) {
  if (is_pure()) throw InvalidParameter("element() needs a density operator");
  return data_[flat_index(ket) * basis_size_ + flat_index(bra)];
}

double FockOperator::weight() const {
  double w = 0.0;
  if (is_pure()) {
    for (const auto& a : data_) w += std::norm(a);
  } else {
    for (std::size_t i = 0; i < basis_size_; ++i) w += data_[i * basis_size_ + i].real();
  }
  return w;
}

}  // namespace cvqec::fock
