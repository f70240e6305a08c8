#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evoplc/genome.hpp"

namespace evoplc::plant {

// Liquid station: one tank, fill pump P1, drain pumps P2 and P3, level
// switches S1 < S2 < S3. Volumes are normalized to the tank capacity.
struct PlantParams {
  double tank_capacity = 1.0;
  double q1 = 0.08;  // inflow of P1 per second
  double q2 = 0.05;  // outflow of P2 per second
  double q3 = 0.05;  // outflow of P3 per second
  std::array<double, 3> thresholds = {0.25, 0.50, 0.75};
  double hysteresis = 0.02;
  double dt = 0.1;
  double initial_level = 0.1;

  // Empty when every parameter invariant holds.
  std::vector<std::string> problems() const;

  friend bool operator==(const PlantParams&, const PlantParams&) = default;
};

using SensorLatch = std::array<bool, 3>;
using ButtonImage = std::array<bool, 3>;              // B1, B2, B3
using OutputImage = std::array<bool, kOutputCount>;  // P1, P2, P3, L1

struct PlantState {
  double level = 0.0;
  SensorLatch sensors{};
  ButtonImage inputs{};
  OutputImage outputs{};
  double time = 0.0;
  std::uint64_t cycle = 0;
  std::size_t overflow_events = 0;
  std::size_t underflow_events = 0;
  // Flows moved by the last step, after saturation.
  double last_inflow = 0.0;
  double last_outflow = 0.0;
};

PlantState initial_state(const PlantParams& params);

// Schmitt-trigger latches: a switch turns on at L + h, off below L - h and
// holds in between. Upper switches force the lower ones on.
SensorLatch read_sensors(const PlantState& state, const PlantParams& params);

PlantState step(const PlantState& state, const OutputImage& commanded, const PlantParams& params);

struct InputSegment {
  double t_start = 0.0;
  ButtonImage buttons{};

  friend bool operator==(const InputSegment&, const InputSegment&) = default;
};

struct Scenario {
  double duration = 120.0;
  std::vector<InputSegment> inputs;  // sorted by t_start, first at 0
  PlantParams params;

  std::vector<std::string> problems() const;
  ButtonImage inputs_at(double t) const;
  std::size_t cycle_count() const;

  // B1 held high for the whole episode.
  static Scenario automatic(PlantParams params = {}, double duration = 120.0);

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ScanRecord {
  double time = 0.0;
  double level = 0.0;
  SensorLatch sensors{};
  ButtonImage inputs{};
  OutputImage outputs{};

  friend bool operator==(const ScanRecord&, const ScanRecord&) = default;
};

struct ScanSummary {
  double total_out_volume = 0.0;
  double total_in_volume = 0.0;
  std::array<double, 3> pump_on_seconds{};
  std::size_t overflow_events = 0;
  std::size_t underflow_events = 0;

  friend bool operator==(const ScanSummary&, const ScanSummary&) = default;
};

struct ScanTrace {
  std::vector<ScanRecord> records;
  ScanSummary summary;
};

struct CompiledRung {
  OutputSignal target = OutputSignal::P1;
  genome::Mode mode = genome::Mode::Automatic;
  TruthTable table = kTableFalse;
};

// Rung truth tables in scan order; implicit rungs are dropped since every
// output starts the scan FALSE.
struct CompiledProgram {
  std::vector<CompiledRung> rungs;
};

CompiledProgram compile(std::span<const genome::RungExpression> rungs);

std::size_t input_image(const SensorLatch& sensors, const ButtonImage& buttons);

// One logic solve against a frozen input image: automatic rungs run while B1
// is high, manual rungs while it is low, later rungs overwrite earlier ones.
OutputImage scan(const CompiledProgram& program, std::size_t image);

ScanTrace run_episode(std::span<const genome::RungExpression> program, const Scenario& scenario);
ScanTrace run_episode(const CompiledProgram& program, const Scenario& scenario, bool keep_records = true);

// time,level,s1,s2,s3,B1,B2,B3,P1,P2,P3,L1
std::string trace_csv(const ScanTrace& trace);

}  // namespace evoplc::plant
