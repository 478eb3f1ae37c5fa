#include "finflow/numerics/param_group.hpp"

#include <algorithm>
#include <stdexcept>

namespace finflow::nn {

ParamGroup::ParamGroup(std::vector<std::span<double>> parts) : parts_(std::move(parts)) {
  for (const auto& p : parts_) {
    offsets_.push_back(size_);
    size_ += p.size();
  }
}

std::vector<double> ParamGroup::gather() const {
  std::vector<double> flat;
  flat.reserve(size_);
  for (const auto& p : parts_) flat.insert(flat.end(), p.begin(), p.end());
  return flat;
}

void ParamGroup::scatter(std::span<const double> flat) const {
  if (flat.size() != size_) throw std::invalid_argument("ParamGroup::scatter: size mismatch");
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offsets_[i]), parts_[i].size(), parts_[i].begin());
  }
}

std::span<double> ParamGroup::slice(std::span<double> flat, std::size_t i) const {
  return flat.subspan(offsets_[i], parts_[i].size());
}

void adam_step(Adam& adam, const ParamGroup& group, std::span<const double> grads) {
  auto flat = group.gather();
  adam.step(flat, grads);
  group.scatter(flat);
}

}  // namespace finflow::nn
