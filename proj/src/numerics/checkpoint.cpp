#include "finflow/numerics/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace finflow::io {

void append_f64_le(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

void append_u16_le(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

double read_f64_le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::uint16_t read_u16_le(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void write_framed(std::ostream& out, const nlohmann::json& header, std::span<const std::uint8_t> body) {
  const std::string text = header.dump();
  std::vector<std::uint8_t> len;
  const std::uint64_t n = text.size();
  for (int i = 0; i < 8; ++i) len.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.write(reinterpret_cast<const char*>(len.data()), 8);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error("write failed");
}

std::pair<nlohmann::json, std::vector<std::uint8_t>> read_framed(std::istream& in) {
  std::uint8_t len_bytes[8];
  if (!in.read(reinterpret_cast<char*>(len_bytes), 8)) throw std::runtime_error("truncated file: missing header length");
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(len_bytes[i]) << (8 * i);
  if (n > (1ULL << 32)) throw std::runtime_error("corrupt header length");
  std::string text(n, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(n))) throw std::runtime_error("truncated file: header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("corrupt header: ") + e.what());
  }
  std::vector<std::uint8_t> body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return {std::move(header), std::move(body)};
}

std::string fnv1a_hex(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(bytes);
}

}  // namespace finflow::io

namespace finflow::nn {

void Checkpoint::add_net(const std::string& name, const DenseNet& net) {
  if (has(name)) throw std::invalid_argument("checkpoint entry already present: " + name);
  Entry e;
  e.name = name;
  e.is_net = true;
  e.layer_dims = net.layer_dims();
  e.activations = net.activations();
  e.values.assign(net.params().begin(), net.params().end());
  entries_.push_back(std::move(e));
}

void Checkpoint::add_vector(const std::string& name, std::span<const double> values) {
  if (has(name)) throw std::invalid_argument("checkpoint entry already present: " + name);
  Entry e;
  e.name = name;
  e.values.assign(values.begin(), values.end());
  entries_.push_back(std::move(e));
}

bool Checkpoint::has(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

const Checkpoint::Entry& Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw std::runtime_error("checkpoint has no entry named " + name);
}

DenseNet Checkpoint::net(const std::string& name) const {
  const Entry& e = find(name);
  if (!e.is_net) throw std::runtime_error("checkpoint entry is not a network: " + name);
  DenseNet net(e.layer_dims, e.activations);
  std::copy(e.values.begin(), e.values.end(), net.params().begin());
  return net;
}

std::vector<double> Checkpoint::vector(const std::string& name) const { return find(name).values; }

void Checkpoint::save(std::ostream& out) const {
  nlohmann::json header;
  header["format"] = "finflow-checkpoint";
  header["version"] = kVersion;
  header["metadata"] = metadata_;
  nlohmann::json entries = nlohmann::json::array();
  std::vector<std::uint8_t> body;
  for (const auto& e : entries_) {
    nlohmann::json j;
    j["name"] = e.name;
    j["count"] = e.values.size();
    if (e.is_net) {
      j["layer_dims"] = e.layer_dims;
      std::vector<std::string> acts;
      for (auto a : e.activations) acts.push_back(to_string(a));
      j["activations"] = acts;
    }
    entries.push_back(j);
    for (double v : e.values) io::append_f64_le(body, v);
  }
  header["entries"] = entries;
  io::write_framed(out, header, body);
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  save(out);
}

Checkpoint Checkpoint::load(std::istream& in) {
  auto [header, body] = io::read_framed(in);
  if (header.value("format", "") != "finflow-checkpoint") throw std::runtime_error("not a finflow checkpoint");
  if (header.value("version", -1) != kVersion) throw std::runtime_error("checkpoint version mismatch");
  Checkpoint ck;
  ck.metadata_ = header.value("metadata", nlohmann::json::object());
  std::size_t offset = 0;
  for (const auto& j : header.at("entries")) {
    Entry e;
    e.name = j.at("name").get<std::string>();
    const auto count = j.at("count").get<std::size_t>();
    if (j.contains("layer_dims")) {
      e.is_net = true;
      e.layer_dims = j.at("layer_dims").get<std::vector<int>>();
      for (const auto& a : j.at("activations")) e.activations.push_back(activation_from_string(a.get<std::string>()));
      DenseNet probe(e.layer_dims, e.activations);
      if (probe.num_params() != count) throw std::runtime_error("checkpoint entry size mismatch: " + e.name);
    }
    if (body.size() < (offset + count) * 8) throw std::runtime_error("truncated checkpoint payload");
    e.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) e.values[i] = io::read_f64_le(body.data() + (offset + i) * 8);
    offset += count;
    ck.entries_.push_back(std::move(e));
  }
  if (body.size() != offset * 8) throw std::runtime_error("checkpoint payload has trailing bytes");
  return ck;
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  return load(in);
}

std::string Checkpoint::parameter_hash() const {
  std::vector<std::uint8_t> body;
  for (const auto& e : entries_) {
    for (double v : e.values) io::append_f64_le(body, v);
  }
  return io::fnv1a_hex(body);
}

}  // namespace finflow::nn
