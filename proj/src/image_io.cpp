#include "marsense/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <vector>

namespace marsense {

namespace {

using Kind = ImageIoError::Kind;

struct NetpbmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 1;
  std::size_t payload_offset = 0;
};

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(Kind::MissingFile, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
int read_header_int(const std::vector<unsigned char>& buf, std::size_t& pos, const std::filesystem::path& path) {
  while (pos < buf.size()) {
    if (std::isspace(buf[pos])) {
      ++pos;
    } else if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= buf.size() || !std::isdigit(buf[pos])) {
    throw ImageIoError(Kind::MalformedHeader, "malformed netpbm header in " + path.string());
  }
  long value = 0;
  while (pos < buf.size() && std::isdigit(buf[pos])) {
    value = value * 10 + (buf[pos] - '0');
    if (value > 1'000'000) throw ImageIoError(Kind::MalformedHeader, "header value too large in " + path.string());
    ++pos;
  }
  return static_cast<int>(value);
}

NetpbmHeader parse_header(const std::vector<unsigned char>& buf, const std::filesystem::path& path) {
  if (buf.size() < 2 || buf[0] != 'P') {
    throw ImageIoError(Kind::MalformedHeader, "not a netpbm file: " + path.string());
  }
  NetpbmHeader h;
  h.magic = std::string{char(buf[0]), char(buf[1])};
  if (h.magic != "P4" && h.magic != "P5") {
    throw ImageIoError(Kind::MalformedHeader, "unsupported netpbm variant " + h.magic + " in " + path.string());
  }
  std::size_t pos = 2;
  h.width = read_header_int(buf, pos, path);
  h.height = read_header_int(buf, pos, path);
  if (h.magic == "P5") h.maxval = read_header_int(buf, pos, path);
  if (h.width < 1 || h.height < 1) {
    throw ImageIoError(Kind::MalformedHeader, "zero image dimension in " + path.string());
  }
  // exactly one whitespace byte separates the header from the raster
  if (pos >= buf.size() || !std::isspace(buf[pos])) {
    throw ImageIoError(Kind::MalformedHeader, "missing raster separator in " + path.string());
  }
  h.payload_offset = pos + 1;
  return h;
}

void write_bytes(const std::filesystem::path& path, const std::string& header, const std::vector<unsigned char>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageIoError(Kind::Unwritable, "cannot write " + path.string());
  out << header;
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw ImageIoError(Kind::Unwritable, "write failed for " + path.string());
}

unsigned char to_byte(double v) { return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  auto buf = read_all(path);
  auto h = parse_header(buf, path);
  if (h.magic != "P5") throw ImageIoError(Kind::MalformedHeader, "expected a P5 graymap: " + path.string());
  if (h.maxval != 255) {
    throw ImageIoError(Kind::UnsupportedDepth,
                       "unsupported maxval " + std::to_string(h.maxval) + " (only 8-bit, maxval 255) in " + path.string());
  }
  const std::size_t n = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  if (buf.size() - h.payload_offset < n) {
    throw ImageIoError(Kind::MalformedPayload, "truncated raster in " + path.string());
  }
  std::vector<double> px(n);
  for (std::size_t i = 0; i < n; ++i) px[i] = buf[h.payload_offset + i];
  return GrayImage(h.width, h.height, std::move(px));
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  std::vector<unsigned char> payload(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) payload[i] = to_byte(img[i]);
  write_bytes(path, "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n", payload);
}

MapFormat map_format_from_string(const std::string& name) {
  if (name == "pbm") return MapFormat::Pbm;
  if (name == "pgm") return MapFormat::Pgm;
  throw UsageError("unknown mask format '" + name + "' (expected pbm or pgm)");
}

void save_map(const BinaryMap& map, const std::filesystem::path& path, MapFormat format) {
  if (format == MapFormat::Pgm) {
    save_image(map.to_image(), path);
    return;
  }
  const std::size_t stride = (static_cast<std::size_t>(map.width()) + 7) / 8;
  std::vector<unsigned char> payload(stride * static_cast<std::size_t>(map.height()), 0);
  for (int r = 0; r < map.height(); ++r)
    for (int c = 0; c < map.width(); ++c)
      if (map(r, c)) payload[static_cast<std::size_t>(r) * stride + static_cast<std::size_t>(c / 8)] |= 0x80u >> (c % 8);
  write_bytes(path, "P4\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n", payload);
}

BinaryMap load_map(const std::filesystem::path& path) {
  auto buf = read_all(path);
  auto h = parse_header(buf, path);
  BinaryMap map(h.width, h.height);
  if (h.magic == "P5") {
    if (h.maxval != 255) throw ImageIoError(Kind::UnsupportedDepth, "unsupported maxval in " + path.string());
    if (buf.size() - h.payload_offset < map.size()) {
      throw ImageIoError(Kind::MalformedPayload, "truncated raster in " + path.string());
    }
    for (std::size_t i = 0; i < map.size(); ++i) map.set(i, buf[h.payload_offset + i] != 0);
    return map;
  }
  const std::size_t stride = (static_cast<std::size_t>(h.width) + 7) / 8;
  if (buf.size() - h.payload_offset < stride * static_cast<std::size_t>(h.height)) {
    throw ImageIoError(Kind::MalformedPayload, "truncated bitmap in " + path.string());
  }
  for (int r = 0; r < h.height; ++r)
    for (int c = 0; c < h.width; ++c) {
      unsigned char byte = buf[h.payload_offset + static_cast<std::size_t>(r) * stride + static_cast<std::size_t>(c / 8)];
      map.set(r, c, (byte & (0x80u >> (c % 8))) != 0);
    }
  return map;
}

}  // namespace marsense
