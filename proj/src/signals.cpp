#include "evoplc/signals.hpp"

namespace evoplc {

namespace {
constexpr std::array<std::string_view, kInputCount> kInputNames = {"S1", "S2", "S3", "B1", "B2", "B3"};
constexpr std::array<std::string_view, kOutputCount> kOutputNames = {"P1", "P2", "P3", "L1"};
}  // namespace

std::string_view name(InputSignal s) { return kInputNames[index(s)]; }
std::string_view name(OutputSignal s) { return kOutputNames[index(s)]; }

std::optional<InputSignal> parse_input(std::string_view text) {
  for (auto s : kAllInputs) {
    if (kInputNames[index(s)] == text) return s;
  }
  return std::nullopt;
}

std::optional<OutputSignal> parse_output(std::string_view text) {
  for (auto s : kAllOutputs) {
    if (kOutputNames[index(s)] == text) return s;
  }
  return std::nullopt;
}

}  // namespace evoplc
