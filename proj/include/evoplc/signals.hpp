#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace evoplc {

// Plant inputs: three level switches, the auto/manual selector and the two
// manual push buttons. The enumerator value is also the bit position of the
// signal inside an input image (see TruthTable).
enum class InputSignal : std::uint8_t { S1, S2, S3, B1, B2, B3 };

// Plant outputs: three pumps and the mode indicator light.
enum class OutputSignal : std::uint8_t { P1, P2, P3, L1 };

inline constexpr std::size_t kInputCount = 6;
inline constexpr std::size_t kOutputCount = 4;
inline constexpr std::size_t kImageCount = std::size_t{1} << kInputCount;

inline constexpr std::array<InputSignal, kInputCount> kAllInputs = {
    InputSignal::S1, InputSignal::S2, InputSignal::S3,
    InputSignal::B1, InputSignal::B2, InputSignal::B3};

inline constexpr std::array<OutputSignal, kOutputCount> kAllOutputs = {
    OutputSignal::P1, OutputSignal::P2, OutputSignal::P3, OutputSignal::L1};

constexpr std::size_t index(InputSignal s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index(OutputSignal s) { return static_cast<std::size_t>(s); }

std::string_view name(InputSignal s);
std::string_view name(OutputSignal s);

std::optional<InputSignal> parse_input(std::string_view text);
std::optional<OutputSignal> parse_output(std::string_view text);

}  // namespace evoplc
