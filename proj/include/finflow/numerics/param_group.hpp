#pragma once

#include <span>
#include <vector>

#include "finflow/numerics/adam.hpp"

namespace finflow::nn {

/// Several parameter buffers optimized as one flat vector, in listed order.
class ParamGroup {
 public:
  ParamGroup() = default;
  explicit ParamGroup(std::vector<std::span<double>> parts);

  std::size_t size() const { return size_; }
  const std::vector<std::span<double>>& parts() const { return parts_; }
  std::vector<double> gather() const;
  void scatter(std::span<const double> flat) const;
  /// Sub-span of a flat gradient buffer belonging to part `i`.
  std::span<double> slice(std::span<double> flat, std::size_t i) const;

 private:
  std::vector<std::span<double>> parts_;
  std::vector<std::size_t> offsets_;
  std::size_t size_ = 0;
};

/// Adam step over a group: gather, update, scatter back.
void adam_step(Adam& adam, const ParamGroup& group, std::span<const double> grads);

}  // namespace finflow::nn
