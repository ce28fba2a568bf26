#pragma once

#include <filesystem>
#include <string>

#include "marsense/mask_builder.hpp"

namespace marsense {

// bin:  little-endian u32 width, u32 height, u32 count, then count x (u32 row, u32 col, f64 value)
// txt:  "width height count" line, then one "row col value" line per sample
// json: {"width", "height", "count", "positions": [[row, col], ...], "values": [...]}
enum class MeasurementFormat { Binary, Text, Json };

MeasurementFormat measurement_format_from_string(const std::string& name);
std::string extension_for(MeasurementFormat format);

void save_measurements(const Measurements& meas, const std::filesystem::path& path, MeasurementFormat format);

/// Format is chosen from the extension (.bin, .txt, .json).
Measurements load_measurements(const std::filesystem::path& path);

}  // namespace marsense
