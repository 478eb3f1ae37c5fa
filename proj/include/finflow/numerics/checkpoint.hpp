#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "finflow/numerics/dense_net.hpp"

namespace finflow::io {

/// Framed binary file: u64 little-endian header length, the JSON header bytes,
/// then an opaque body. Used by checkpoints and datasets.
void write_framed(std::ostream& out, const nlohmann::json& header, std::span<const std::uint8_t> body);
/// Reads a framed file; throws std::runtime_error on truncation or bad JSON.
std::pair<nlohmann::json, std::vector<std::uint8_t>> read_framed(std::istream& in);

void append_f64_le(std::vector<std::uint8_t>& out, double v);
void append_u16_le(std::vector<std::uint8_t>& out, std::uint16_t v);
double read_f64_le(const std::uint8_t* p);
std::uint16_t read_u16_le(const std::uint8_t* p);

/// FNV-1a 64-bit over a byte range, rendered as 16 hex digits.
std::string fnv1a_hex(std::span<const std::uint8_t> bytes);
std::string file_hash(const std::string& path);

}  // namespace finflow::io

namespace finflow::nn {

/// Named networks and flat vectors serialized as 64-bit little-endian floats
/// behind a JSON header that records layer dims and activations. Arbitrary
/// metadata rides along in the header under "metadata".
class Checkpoint {
 public:
  static constexpr int kVersion = 1;

  void add_net(const std::string& name, const DenseNet& net);
  void add_vector(const std::string& name, std::span<const double> values);

  nlohmann::json& metadata() { return metadata_; }
  const nlohmann::json& metadata() const { return metadata_; }

  bool has(const std::string& name) const;
  DenseNet net(const std::string& name) const;
  std::vector<double> vector(const std::string& name) const;

  void save(std::ostream& out) const;
  void save(const std::string& path) const;
  static Checkpoint load(std::istream& in);
  static Checkpoint load(const std::string& path);

  /// Hash of the parameter payload only (metadata excluded).
  std::string parameter_hash() const;

 private:
  struct Entry {
    std::string name;
    bool is_net = false;
    std::vector<int> layer_dims;
    std::vector<Activation> activations;
    std::vector<double> values;
  };
  const Entry& find(const std::string& name) const;

  std::vector<Entry> entries_;
  nlohmann::json metadata_ = nlohmann::json::object();
};

}  // namespace finflow::nn
