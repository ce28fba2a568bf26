#include "marsense/measurements_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "marsense/errors.hpp"

namespace marsense {

namespace {

static_assert(std::endian::native == std::endian::little, "binary measurement format assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DataError("truncated measurement file " + path.string());
  return v;
}

}  // namespace

MeasurementFormat measurement_format_from_string(const std::string& name) {
  if (name == "bin") return MeasurementFormat::Binary;
  if (name == "txt") return MeasurementFormat::Text;
  if (name == "json") return MeasurementFormat::Json;
  throw UsageError("unknown measurement format '" + name + "' (expected bin, txt or json)");
}

std::string extension_for(MeasurementFormat format) {
  switch (format) {
    case MeasurementFormat::Binary: return ".bin";
    case MeasurementFormat::Text: return ".txt";
    case MeasurementFormat::Json: return ".json";
  }
  return ".bin";
}

void save_measurements(const Measurements& meas, const std::filesystem::path& path, MeasurementFormat format) {
  const auto mode = format == MeasurementFormat::Binary ? std::ios::binary | std::ios::trunc : std::ios::trunc;
  std::ofstream out(path, mode);
  if (!out) throw DataError("cannot write " + path.string());
  const auto& pos = meas.positions();
  const auto& vals = meas.values();
  switch (format) {
    case MeasurementFormat::Binary:
      put<std::uint32_t>(out, static_cast<std::uint32_t>(meas.dims().width));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(meas.dims().height));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(meas.count()));
      for (std::size_t i = 0; i < meas.count(); ++i) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(pos[i].row));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(pos[i].col));
        put<double>(out, vals[i]);
      }
      break;
    case MeasurementFormat::Text:
      out << meas.dims().width << ' ' << meas.dims().height << ' ' << meas.count() << '\n';
      out << std::setprecision(17);
      for (std::size_t i = 0; i < meas.count(); ++i) out << pos[i].row << ' ' << pos[i].col << ' ' << vals[i] << '\n';
      break;
    case MeasurementFormat::Json: {
      nlohmann::json j;
      j["width"] = meas.dims().width;
      j["height"] = meas.dims().height;
      j["count"] = meas.count();
      auto& jp = j["positions"] = nlohmann::json::array();
      for (const auto& p : pos) jp.push_back({p.row, p.col});
      j["values"] = vals;
      out << j.dump() << '\n';
      break;
    }
  }
  if (!out) throw DataError("write failed for " + path.string());
}

Measurements load_measurements(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  std::ifstream in(path, ext == ".bin" ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Position> pos;
  std::vector<double> vals;
  Dims dims;
  if (ext == ".bin") {
    dims.width = static_cast<int>(get<std::uint32_t>(in, path));
    dims.height = static_cast<int>(get<std::uint32_t>(in, path));
    const auto count = get<std::uint32_t>(in, path);
    if (count > dims.size()) throw DataError("measurement count exceeds image size in " + path.string());
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto r = get<std::uint32_t>(in, path);
      const auto c = get<std::uint32_t>(in, path);
      pos.push_back({static_cast<int>(r), static_cast<int>(c)});
      vals.push_back(get<double>(in, path));
    }
  } else if (ext == ".txt") {
    std::size_t count = 0;
    if (!(in >> dims.width >> dims.height >> count)) throw DataError("malformed measurement header in " + path.string());
    if (count > dims.size()) throw DataError("measurement count exceeds image size in " + path.string());
    for (std::size_t i = 0; i < count; ++i) {
      Position p;
      double v = 0.0;
      if (!(in >> p.row >> p.col >> v)) throw DataError("truncated measurement file " + path.string());
      pos.push_back(p);
      vals.push_back(v);
    }
  } else if (ext == ".json") {
    nlohmann::json j;
    try {
      in >> j;
      dims.width = j.at("width").get<int>();
      dims.height = j.at("height").get<int>();
      for (const auto& p : j.at("positions")) pos.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
      vals = j.at("values").get<std::vector<double>>();
      if (j.at("count").get<std::size_t>() != vals.size()) throw DataError("count field disagrees with values");
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed measurement JSON in " + path.string() + ": " + e.what());
    }
  } else {
    throw UsageError("unrecognized measurement extension '" + ext + "' (expected .bin, .txt or .json)");
  }
  return Measurements(dims, std::move(pos), std::move(vals));
}

}  // namespace marsense
