#include "mscs/cube.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "mscs/errors.hpp"

namespace mscs {
namespace {

void check_wavelengths(const std::vector<double>& wl) {
  if (wl.empty()) throw ConfigError("cube needs at least one band");
  for (std::size_t i = 1; i < wl.size(); ++i) {
    if (!(wl[i] > wl[i - 1])) {
      throw ConfigError("cube wavelengths must be strictly increasing");
    }
  }
}

template <class T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class Stored>
void write_payload(std::ostream& os, std::span<const double> values) {
  std::vector<Stored> buf(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    buf[i] = byteswap_if_big(static_cast<Stored>(values[i]));
  }
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(Stored)));
}

template <class Stored>
std::vector<double> read_payload(std::istream& is, std::size_t count,
                                 const std::filesystem::path& path) {
  std::vector<Stored> buf(count);
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(count * sizeof(Stored)));
  if (static_cast<std::size_t>(is.gcount()) != count * sizeof(Stored)) {
    throw DataError("truncated payload in " + path.string());
  }
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = byteswap_if_big(buf[i]);
  return out;
}

}  // namespace

std::vector<double> uniform_wavelengths(std::size_t count, double first_nm,
                                        double last_nm) {
  std::vector<double> wl(count);
  for (std::size_t i = 0; i < count; ++i) {
    wl[i] = count == 1 ? first_nm
                       : first_nm + (last_nm - first_nm) * static_cast<double>(i) /
                                        static_cast<double>(count - 1);
  }
  return wl;
}

MSCube::MSCube(std::size_t n_u, std::size_t n_v, std::size_t n_bands)
    : MSCube(n_u, n_v, uniform_wavelengths(n_bands)) {}

MSCube::MSCube(std::size_t n_u, std::size_t n_v, std::vector<double> wavelengths_nm)
    : n_u_(n_u), n_v_(n_v), wavelengths_(std::move(wavelengths_nm)) {
  if (n_u == 0 || n_v == 0) throw ConfigError("cube dimensions must be positive");
  check_wavelengths(wavelengths_);
  data_.assign(n_u_ * n_v_ * wavelengths_.size(), 0.0);
}

MSCube::MSCube(std::size_t n_u, std::size_t n_v, std::vector<double> wavelengths_nm,
               std::vector<double> data)
    : MSCube(n_u, n_v, std::move(wavelengths_nm)) {
  if (data.size() != data_.size()) {
    throw ConfigError("cube data length does not match its dimensions");
  }
  data_ = std::move(data);
}

std::vector<double> vectorize(const MSCube& cube) {
  return {cube.data().begin(), cube.data().end()};
}

MSCube devectorize(std::span<const double> x, std::size_t n_u, std::size_t n_v,
                   std::vector<double> wavelengths_nm) {
  return MSCube(n_u, n_v, std::move(wavelengths_nm),
                std::vector<double>(x.begin(), x.end()));
}

void write_cube(const std::filesystem::path& path, const MSCube& cube) {
  std::ostringstream header;
  header.precision(17);
  header << "mscube " << cube.n_u() << ' ' << cube.n_v() << ' ' << cube.n_bands();
  for (double w : cube.wavelengths()) header << ' ' << w;
  header << '\n';
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  os << header.str();
  write_payload<float>(os, cube.data());
  if (!os) throw DataError("write failed for " + path.string());
}

MSCube read_cube(const std::filesystem::path& path) {
  std::filesystem::path header_path = path;
  std::filesystem::path payload_path = path;
  const bool sidecar = path.extension() == ".hdr";
  if (sidecar) payload_path.replace_extension(".raw");

  std::ifstream hs(header_path, std::ios::binary);
  if (!hs) throw DataError("cannot open " + header_path.string());
  std::string line;
  std::getline(hs, line);
  std::istringstream ls(line);
  std::string magic;
  std::size_t n_u = 0, n_v = 0, n_b = 0;
  ls >> magic >> n_u >> n_v >> n_b;
  if (!ls || magic != "mscube" || n_u == 0 || n_v == 0 || n_b == 0) {
    throw DataError("bad cube header in " + header_path.string());
  }
  std::vector<double> wl(n_b);
  for (auto& w : wl) ls >> w;
  if (!ls) throw DataError("missing wavelengths in " + header_path.string());

  std::vector<double> data;
  if (sidecar) {
    std::ifstream ps(payload_path, std::ios::binary);
    if (!ps) throw DataError("cannot open " + payload_path.string());
    data = read_payload<float>(ps, n_u * n_v * n_b, payload_path);
  } else {
    data = read_payload<float>(hs, n_u * n_v * n_b, path);
  }
  try {
    return MSCube(n_u, n_v, std::move(wl), std::move(data));
  } catch (const ConfigError& e) {
    throw DataError(std::string(e.what()) + " in " + header_path.string());
  }
}

void write_frame(const std::filesystem::path& path, const MeasurementFrame& frame) {
  if (frame.data.size() != frame.size()) {
    throw ConfigError("frame data length does not match its dimensions");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open " + path.string() + " for writing");
  os.precision(17);
  os << "msframe " << frame.m_u << ' ' << frame.m_v << ' ' << frame.snapshots << ' '
     << frame.noise_bound << '\n';
  write_payload<double>(os, frame.data);
  if (!os) throw DataError("write failed for " + path.string());
}

MeasurementFrame read_frame(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  std::istringstream ls(line);
  std::string magic;
  MeasurementFrame f;
  ls >> magic >> f.m_u >> f.m_v >> f.snapshots >> f.noise_bound;
  if (!ls || magic != "msframe" || f.m_u == 0 || f.m_v == 0 || f.snapshots == 0 ||
      f.noise_bound < 0.0) {
    throw DataError("bad frame header in " + path.string());
  }
  f.data = read_payload<double>(is, f.size(), path);
  return f;
}

}  // namespace mscs
