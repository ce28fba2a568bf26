#pragma once

#include <filesystem>
#include <string>

#include "marsense/binary_map.hpp"
#include "marsense/errors.hpp"
#include "marsense/image.hpp"

namespace marsense {

class ImageIoError : public DataError {
 public:
  enum class Kind { MissingFile, MalformedHeader, MalformedPayload, UnsupportedDepth, Unwritable };

  ImageIoError(Kind kind, const std::string& message) : DataError(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads a binary PGM (P5, maxval 255).
GrayImage load_image(const std::filesystem::path& path);

/// Writes a binary PGM; intensities are rounded to nearest and clamped to [0, 255].
void save_image(const GrayImage& img, const std::filesystem::path& path);

enum class MapFormat { Pbm, Pgm };

MapFormat map_format_from_string(const std::string& name);

/// Binary maps go out either as packed PBM (P4) or as PGM with values {0, 255}.
void save_map(const BinaryMap& map, const std::filesystem::path& path, MapFormat format);

/// Accepts P4 or P5; any nonzero PGM value counts as set.
BinaryMap load_map(const std::filesystem::path& path);

}  // namespace marsense
