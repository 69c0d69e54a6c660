#include "proxkit/instance_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "proxkit/text.hpp"

namespace proxkit {

namespace {

constexpr const char* kHeaderMagic = "PROXKIT-INSTANCE v1";
constexpr char kBinaryMagic[4] = {'P', 'X', 'K', 'B'};
constexpr std::uint32_t kVersion = 1;

// Little-endian regardless of host order.
template <class T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  for (std::size_t k = 0; k < sizeof(T); ++k) buf[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw std::runtime_error("instance: truncated binary payload");
  T v = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) v |= static_cast<T>(buf[k]) << (8 * k);
  return v;
}

void put_double(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }
double get_double(std::istream& in) { return std::bit_cast<double>(get<std::uint64_t>(in)); }

}  // namespace

void write_instance(std::ostream& out, const InstanceData& data) {
  out << kHeaderMagic << '\n';
  out << "kind: " << data.kind << '\n';
  out << "seed: " << data.seed << '\n';
  for (const auto& [key, value] : data.config) out << "config." << key << ": " << value << '\n';
  for (const auto& [key, value] : data.constants) out << "constant." << key << ": " << format_double(value) << '\n';
  for (const auto& a : data.arrays) out << "array." << a.name << ": " << a.rows << 'x' << a.cols << '\n';
  out << "end-header\n";

  out.write(kBinaryMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(data.arrays.size()));
  for (const auto& a : data.arrays) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(a.name.size()));
    out.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
    put<std::uint64_t>(out, a.rows);
    put<std::uint64_t>(out, a.cols);
    for (double v : a.values) put_double(out, v);
  }
  if (!out) throw std::runtime_error("instance: write failed");
}

InstanceData read_instance(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeaderMagic)
    throw std::runtime_error("instance: missing '" + std::string(kHeaderMagic) + "' header");
  InstanceData data;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "end-header") {
      ended = true;
      break;
    }
    const auto colon = line.find(": ");
    if (colon == std::string::npos) throw std::runtime_error("instance: malformed header line '" + line + "'");
    const std::string key = line.substr(0, colon);
    const std::string value = line.substr(colon + 2);
    if (key == "kind") {
      data.kind = value;
    } else if (key == "seed") {
      const auto s = parse_int(value);
      if (!s) throw std::runtime_error("instance: bad seed '" + value + "'");
      data.seed = static_cast<std::uint64_t>(*s);
    } else if (key.starts_with("config.")) {
      data.config.emplace_back(key.substr(7), value);
    } else if (key.starts_with("constant.")) {
      const auto v = parse_double(value);
      if (!v) throw std::runtime_error("instance: bad constant '" + line + "'");
      data.constants.emplace_back(key.substr(9), *v);
    } else if (!key.starts_with("array.")) {
      throw std::runtime_error("instance: unknown header key '" + key + "'");
    }
  }
  if (!ended) throw std::runtime_error("instance: header not terminated");

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kBinaryMagic, 4) != 0)
    throw std::runtime_error("instance: bad binary magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("instance: unsupported version " + std::to_string(version));
  const auto count = get<std::uint32_t>(in);
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedArray a;
    a.name.resize(get<std::uint32_t>(in));
    if (!in.read(a.name.data(), static_cast<std::streamsize>(a.name.size())))
      throw std::runtime_error("instance: truncated array name");
    a.rows = get<std::uint64_t>(in);
    a.cols = get<std::uint64_t>(in);
    a.values.resize(a.rows * a.cols);
    for (double& v : a.values) v = get_double(in);
    data.arrays.push_back(std::move(a));
  }
  return data;
}

void save_instance(const std::filesystem::path& path, const InstanceData& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("instance: cannot open " + path.string() + " for writing");
  write_instance(out, data);
}

InstanceData load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("instance: cannot open " + path.string());
  return read_instance(in);
}

}  // namespace proxkit
