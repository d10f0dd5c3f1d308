#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "ctds/diagnostics.hpp"
#include "ctds/fits.hpp"
#include "ctds/maps.hpp"

namespace ctds {

using Rgb = std::array<std::uint8_t, 3>;

/// Label colour: the low three bytes of mix64(label + 1), each byte raised
/// to at least 32 so no label renders black. Unresolved cells are black.
Rgb label_color(std::int32_t label);

/// Maps a value in [0, 1] onto a dark blue -> red -> yellow ramp.
Rgb ramp_color(double x);

// Map CSVs are row-major, H lines of W comma-separated values; row 0 is the
// j_min edge. Unresolved labels are -1 and unresolved times "nan".
std::string label_csv(const BasinMap& map);
std::string time_csv(const BasinMap& map);
std::string phi_csv(const FsleMap& map);

// P3 pixmaps, drawn with j increasing upwards (row H-1 first).
std::string label_ppm(const BasinMap& map);
/// ln t mapped linearly between the smallest and largest resolved time.
std::string time_ppm(const BasinMap& map);
/// phi mapped linearly between 0 and its maximum.
std::string phi_ppm(const FsleMap& map);

/// Columns t,E,V,speed,accel, then s<i> and a<m> (1-based ids).
std::string diagnostics_csv(const TimeSeries& ts, std::span<const std::size_t> var_ids,
                            std::span<const std::size_t> clause_ids);

std::string fit_csv(const ScalingFit& fit);
std::string fit_json(const ScalingFit& fit);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace ctds
