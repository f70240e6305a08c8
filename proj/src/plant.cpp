#include "evoplc/plant.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "evoplc/errors.hpp"

namespace evoplc::plant {

namespace {
constexpr double kTimeEps = 1e-9;
}

std::vector<std::string> PlantParams::problems() const {
  std::vector<std::string> out;
  const auto& [l1, l2, l3] = thresholds;
  if (!(tank_capacity > 0)) out.emplace_back("tank_capacity must be positive");
  if (!(0 < l1 && l1 < l2 && l2 < l3 && l3 < tank_capacity)) {
    out.emplace_back("sensor thresholds must satisfy 0 < L1 < L2 < L3 < capacity");
  }
  if (!(hysteresis >= 0 && hysteresis < (l2 - l1) / 2 && hysteresis < (l3 - l2) / 2)) {
    out.emplace_back("hysteresis bands must not overlap");
  }
  if (!(q1 > 0 && q2 > 0 && q3 > 0)) out.emplace_back("pump rates must be positive");
  if (!(dt > 0)) out.emplace_back("dt must be positive");
  if (!(initial_level >= 0 && initial_level <= tank_capacity)) {
    out.emplace_back("initial_level must lie within the tank");
  }
  return out;
}

SensorLatch read_sensors(const PlantState& state, const PlantParams& params) {
  SensorLatch s = state.sensors;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (state.level >= params.thresholds[i] + params.hysteresis) {
      s[i] = true;
    } else if (state.level < params.thresholds[i] - params.hysteresis) {
      s[i] = false;
    }
  }
  if (s[2]) s[1] = true;
  if (s[1]) s[0] = true;
  return s;
}

PlantState initial_state(const PlantParams& params) {
  PlantState st;
  st.level = params.initial_level;
  st.sensors = read_sensors(st, params);
  return st;
}

PlantState step(const PlantState& state, const OutputImage& commanded, const PlantParams& params) {
  const double p1 = commanded[index(OutputSignal::P1)] ? 1.0 : 0.0;
  const double p2 = commanded[index(OutputSignal::P2)] ? 1.0 : 0.0;
  const double p3 = commanded[index(OutputSignal::P3)] ? 1.0 : 0.0;

  PlantState next = state;
  next.outputs = commanded;
  const double raw = state.level + params.dt * (params.q1 * p1 - params.q2 * p2 - params.q3 * p3);
  const double requested_out = params.dt * (params.q2 * p2 + params.q3 * p3);
  next.last_inflow = params.dt * params.q1 * p1;
  next.last_outflow = requested_out;
  if (raw > params.tank_capacity) {
    ++next.overflow_events;
    next.level = params.tank_capacity;
  } else if (raw < 0.0) {
    ++next.underflow_events;
    next.level = 0.0;
    next.last_outflow = std::max(0.0, requested_out + raw);
  } else {
    next.level = raw;
  }
  next.sensors = read_sensors(next, params);
  ++next.cycle;
  next.time = static_cast<double>(next.cycle) * params.dt;
  return next;
}

std::vector<std::string> Scenario::problems() const {
  auto out = params.problems();
  if (!(duration > 0)) out.emplace_back("duration must be positive");
  if (inputs.empty() || std::abs(inputs.front().t_start) > kTimeEps) {
    out.emplace_back("input schedule must start at t = 0");
  }
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    if (!(inputs[i].t_start > inputs[i - 1].t_start)) {
      out.emplace_back("input segments must have increasing t_start");
      break;
    }
  }
  return out;
}

ButtonImage Scenario::inputs_at(double t) const {
  ButtonImage b{};
  for (const auto& seg : inputs) {
    if (seg.t_start <= t + kTimeEps) {
      b = seg.buttons;
    } else {
      break;
    }
  }
  return b;
}

std::size_t Scenario::cycle_count() const {
  return static_cast<std::size_t>(std::ceil(duration / params.dt - kTimeEps));
}

Scenario Scenario::automatic(PlantParams params, double duration) {
  Scenario s;
  s.duration = duration;
  s.params = params;
  s.inputs = {{0.0, {true, false, false}}};
  return s;
}

CompiledProgram compile(std::span<const genome::RungExpression> rungs) {
  CompiledProgram p;
  for (const auto& r : rungs) {
    if (index(r.target) >= kOutputCount) {
      throw EpisodeError(fmt::format("rung targets undefined output #{}", index(r.target)));
    }
    if (r.implicit) continue;
    p.rungs.push_back({r.target, r.mode, r.expr.truth_table()});
  }
  return p;
}

std::size_t input_image(const SensorLatch& sensors, const ButtonImage& buttons) {
  std::size_t image = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (sensors[i]) image |= std::size_t{1} << i;
    if (buttons[i]) image |= std::size_t{1} << (i + 3);
  }
  return image;
}

OutputImage scan(const CompiledProgram& program, std::size_t image) {
  OutputImage out{};
  const bool automatic = (image >> index(InputSignal::B1)) & 1U;
  const auto active = automatic ? genome::Mode::Automatic : genome::Mode::Manual;
  for (const auto& rung : program.rungs) {
    if (rung.mode == active) out[index(rung.target)] = table_at(rung.table, image);
  }
  return out;
}

ScanTrace run_episode(std::span<const genome::RungExpression> program, const Scenario& scenario) {
  return run_episode(compile(program), scenario, true);
}

ScanTrace run_episode(const CompiledProgram& program, const Scenario& scenario, bool keep_records) {
  const auto& params = scenario.params;
  const std::size_t cycles = scenario.cycle_count();
  ScanTrace trace;
  if (keep_records) trace.records.reserve(cycles);

  PlantState state = initial_state(params);
  for (std::size_t k = 0; k < cycles; ++k) {
    const double t = static_cast<double>(k) * params.dt;
    const ButtonImage buttons = scenario.inputs_at(t);
    const OutputImage outputs = scan(program, input_image(state.sensors, buttons));
    if (keep_records) trace.records.push_back({t, state.level, state.sensors, buttons, outputs});
    for (std::size_t p = 0; p < 3; ++p) {
      if (outputs[p]) trace.summary.pump_on_seconds[p] += params.dt;
    }
    state = step(state, outputs, params);
    trace.summary.total_in_volume += state.last_inflow;
    trace.summary.total_out_volume += state.last_outflow;
  }
  trace.summary.overflow_events = state.overflow_events;
  trace.summary.underflow_events = state.underflow_events;
  return trace;
}

std::string trace_csv(const ScanTrace& trace) {
  std::string out = "time,level,s1,s2,s3,B1,B2,B3,P1,P2,P3,L1\n";
  auto b = [](bool v) { return v ? '1' : '0'; };
  for (const auto& r : trace.records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.time, r.level, b(r.sensors[0]), b(r.sensors[1]),
                       b(r.sensors[2]), b(r.inputs[0]), b(r.inputs[1]), b(r.inputs[2]), b(r.outputs[0]),
                       b(r.outputs[1]), b(r.outputs[2]), b(r.outputs[3]));
  }
  return out;
}

}  // namespace evoplc::plant
