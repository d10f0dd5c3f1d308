#include "ctds/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "ctds/error.hpp"
#include "ctds/rng.hpp"

namespace ctds {

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

template <class Cell>
std::string grid_csv(std::size_t w, std::size_t h, Cell&& cell) {
  std::string out;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (c) out += ',';
      out += cell(r * w + c);
    }
    out += '\n';
  }
  return out;
}

template <class Pixel>
std::string grid_ppm(std::size_t w, std::size_t h, Pixel&& pixel) {
  std::string out = "P3\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (std::size_t rr = 0; rr < h; ++rr) {
    const std::size_t r = h - 1 - rr;
    for (std::size_t c = 0; c < w; ++c) {
      const Rgb px = pixel(r * w + c);
      if (c) out += ' ';
      out += std::to_string(px[0]) + ' ' + std::to_string(px[1]) + ' ' + std::to_string(px[2]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

Rgb label_color(std::int32_t label) {
  if (label < 0) return {0, 0, 0};
  const std::uint64_t h = mix64(static_cast<std::uint64_t>(label) + 1);
  auto byte = [&](int shift) { return static_cast<std::uint8_t>(std::max<std::uint64_t>(32, (h >> shift) & 0xff)); };
  return {byte(0), byte(8), byte(16)};
}

Rgb ramp_color(double x) {
  x = std::clamp(std::isnan(x) ? 0.0 : x, 0.0, 1.0);
  // 0: (0, 0, 96), 0.5: (220, 30, 30), 1: (255, 240, 0)
  const double stops[3][3] = {{0, 0, 96}, {220, 30, 30}, {255, 240, 0}};
  const int seg = x < 0.5 ? 0 : 1;
  const double f = x < 0.5 ? x * 2.0 : (x - 0.5) * 2.0;
  Rgb out{};
  for (int k = 0; k < 3; ++k) {
    out[k] = static_cast<std::uint8_t>(std::lround(stops[seg][k] + f * (stops[seg + 1][k] - stops[seg][k])));
  }
  return out;
}

std::string label_csv(const BasinMap& map) {
  return grid_csv(map.plane.width, map.plane.height, [&](std::size_t i) { return std::to_string(map.labels[i]); });
}

std::string time_csv(const BasinMap& map) {
  return grid_csv(map.plane.width, map.plane.height, [&](std::size_t i) { return fmt(map.times[i]); });
}

std::string phi_csv(const FsleMap& map) {
  return grid_csv(map.plane.width, map.plane.height, [&](std::size_t i) { return fmt(map.phi[i]); });
}

std::string label_ppm(const BasinMap& map) {
  return grid_ppm(map.plane.width, map.plane.height, [&](std::size_t i) { return label_color(map.labels[i]); });
}

std::string time_ppm(const BasinMap& map) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double t : map.times) {
    if (std::isnan(t) || t <= 0.0) continue;
    lo = std::min(lo, std::log(t));
    hi = std::max(hi, std::log(t));
  }
  return grid_ppm(map.plane.width, map.plane.height, [&](std::size_t i) -> Rgb {
    const double t = map.times[i];
    if (std::isnan(t)) return {0, 0, 0};
    if (t <= 0.0 || !(hi > lo)) return ramp_color(0.0);
    return ramp_color((std::log(t) - lo) / (hi - lo));
  });
}

std::string phi_ppm(const FsleMap& map) {
  double hi = 0.0;
  for (double p : map.phi) hi = std::max(hi, p);
  return grid_ppm(map.plane.width, map.plane.height,
                  [&](std::size_t i) { return ramp_color(hi > 0.0 ? map.phi[i] / hi : 0.0); });
}

std::string diagnostics_csv(const TimeSeries& ts, std::span<const std::size_t> var_ids,
                            std::span<const std::size_t> clause_ids) {
  std::string out = "t,E,V,speed,accel";
  for (std::size_t j = 0; j < ts.s.size(); ++j) out += ",s" + std::to_string(j < var_ids.size() ? var_ids[j] + 1 : j + 1);
  for (std::size_t j = 0; j < ts.a.size(); ++j) {
    out += ",a" + std::to_string(j < clause_ids.size() ? clause_ids[j] + 1 : j + 1);
  }
  out += '\n';
  for (std::size_t i = 0; i < ts.t.size(); ++i) {
    out += fmt(ts.t[i]) + ',' + fmt(ts.E[i]) + ',' + fmt(ts.V[i]) + ',' + fmt(ts.speed[i]) + ',' + fmt(ts.accel[i]);
    for (const auto& col : ts.s) out += ',' + fmt(col[i]);
    for (const auto& col : ts.a) out += ',' + fmt(col[i]);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::pair<const char*, double>> parameters(const ScalingFit& fit) {
  return std::visit(
      [](const auto& m) -> std::vector<std::pair<const char*, double>> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExpDecay>) return {{"r", m.r}, {"lambda", m.lambda}};
        else if constexpr (std::is_same_v<T, RateLaw>) return {{"b", m.b}, {"beta", m.beta}};
        else if constexpr (std::is_same_v<T, StepPowerLaw>) return {{"u", m.u}, {"v", m.v}, {"eta", m.eta}};
        else return {{"d", m.d}, {"delta", m.delta}};
      },
      fit.model);
}

}  // namespace

std::string fit_csv(const ScalingFit& fit) {
  std::string header = "model", row = fit.kind();
  for (const auto& [name, value] : parameters(fit)) {
    header += std::string(",") + name;
    row += ',' + fmt(value);
  }
  header += ",window_lo,window_hi,r_squared,samples,points\n";
  row += ',' + fmt(fit.window_lo) + ',' + fmt(fit.window_hi) + ',' + fmt(fit.r_squared) + ',' +
         std::to_string(fit.samples) + ',' + std::to_string(fit.points) + '\n';
  return header + row;
}

std::string fit_json(const ScalingFit& fit) {
  nlohmann::ordered_json j;
  j["model"] = fit.kind();
  for (const auto& [name, value] : parameters(fit)) j["parameters"][name] = value;
  j["window"] = {fit.window_lo, fit.window_hi};
  j["r_squared"] = fit.r_squared;
  j["samples"] = fit.samples;
  j["points"] = fit.points;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::Io, "cannot write " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ctds
