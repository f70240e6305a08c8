#pragma once

// Reference implementations used as test oracles. They are written straight
// from the behavioural description and deliberately avoid the library's
// decode, truth-table and scan code paths.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "evoplc/evaluate.hpp"
#include "evoplc/genome.hpp"
#include "evoplc/plant.hpp"

namespace oracle {

using evoplc::OutputSignal;
using evoplc::genome::GenomeRow;
using evoplc::genome::Mode;
using evoplc::genome::Operator;

inline bool bit(std::size_t image, std::size_t i) { return (image >> i) & 1U; }

// One scan of the raw table: rows are read top to bottom, a rung writes its
// output when its mode is active, the last write wins.
inline std::array<bool, 4> scan_rows(const std::vector<GenomeRow>& rows, std::size_t image) {
  std::array<bool, 4> out{};
  const bool b1 = bit(image, 3);
  bool open = false;
  bool acc = false;
  std::size_t target = 0;
  Mode mode = Mode::Automatic;
  auto flush = [&] {
    if (open && (mode == Mode::Automatic) == b1) out[target] = acc;
  };
  for (const auto& r : rows) {
    const bool v = bit(image, static_cast<std::size_t>(r.input)) != r.negated;
    if (r.output) {
      flush();
      open = true;
      acc = v;
      target = static_cast<std::size_t>(*r.output);
      mode = r.mode;
    } else if (open) {
      acc = r.op == Operator::Or ? (acc || v) : (acc && v);
    }
  }
  flush();
  return out;
}

inline std::uint64_t output_table(const std::vector<GenomeRow>& rows, OutputSignal o) {
  std::uint64_t t = 0;
  for (std::size_t k = 0; k < 64; ++k) {
    if (scan_rows(rows, k)[static_cast<std::size_t>(o)]) t |= std::uint64_t{1} << k;
  }
  return t;
}

struct Sim {
  std::vector<double> level;
  std::vector<std::array<bool, 3>> sensors;
  std::vector<std::array<bool, 4>> outputs;
  double out_volume = 0.0;
  double in_volume = 0.0;
  std::array<double, 3> pump_seconds{};
  std::size_t overflow = 0;
  std::size_t underflow = 0;
};

// Tank with Schmitt-trigger switches, synchronous outputs and a clamped
// forward Euler step per scan.
inline Sim simulate(const std::vector<GenomeRow>& rows, const evoplc::plant::Scenario& sc) {
  const auto& p = sc.params;
  Sim sim;
  double level = p.initial_level;
  std::array<bool, 3> latch{};
  auto relatch = [&] {
    for (std::size_t i = 0; i < 3; ++i) {
      if (level >= p.thresholds[i] + p.hysteresis) latch[i] = true;
      if (level < p.thresholds[i] - p.hysteresis) latch[i] = false;
    }
    if (latch[2]) latch[1] = true;
    if (latch[1]) latch[0] = true;
  };
  relatch();
  const auto cycles = static_cast<std::size_t>(std::ceil(sc.duration / p.dt - 1e-9));
  for (std::size_t k = 0; k < cycles; ++k) {
    const double t = static_cast<double>(k) * p.dt;
    std::array<bool, 3> buttons{};
    for (const auto& seg : sc.inputs) {
      if (seg.t_start <= t + 1e-9) buttons = seg.buttons;
    }
    std::size_t image = 0;
    for (std::size_t i = 0; i < 3; ++i) image |= std::size_t{latch[i]} << i;
    for (std::size_t i = 0; i < 3; ++i) image |= std::size_t{buttons[i]} << (3 + i);
    const auto o = scan_rows(rows, image);
    sim.level.push_back(level);
    sim.sensors.push_back(latch);
    sim.outputs.push_back(o);
    const double in = o[0] ? p.q1 : 0.0;
    const double out = (o[1] ? p.q2 : 0.0) + (o[2] ? p.q3 : 0.0);
    for (std::size_t i = 0; i < 3; ++i) sim.pump_seconds[i] += o[i] ? p.dt : 0.0;
    double next = level + p.dt * (in - out);
    double moved_out = p.dt * out;
    if (next > p.tank_capacity) {
      ++sim.overflow;
      next = p.tank_capacity;
    } else if (next < 0.0) {
      ++sim.underflow;
      moved_out += next;
      next = 0.0;
    }
    sim.in_volume += p.dt * in;
    sim.out_volume += moved_out;
    level = next;
    relatch();
  }
  return sim;
}

inline bool pairwise_dominates(const evoplc::evaluate::ObjectiveVector& a, const evoplc::evaluate::ObjectiveVector& b) {
  const bool no_worse = a.f1 >= b.f1 && a.f2 <= b.f2 && a.f3 >= b.f3;
  const bool better = a.f1 > b.f1 || a.f2 < b.f2 || a.f3 > b.f3;
  return no_worse && better;
}

// O(n^2) pairwise front.
inline std::vector<std::size_t> front(const std::vector<evoplc::evaluate::ObjectiveVector>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) dominated = j != i && pairwise_dominates(pts[j], pts[i]);
    if (!dominated) out.push_back(i);
  }
  return out;
}

}  // namespace oracle
