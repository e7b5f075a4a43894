#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace bsn {

/// Fixed-size record a sensor node sends to the logger.
///
/// Wire layout, big-endian:
///   0      node_id
///   1..2   seq
///   3..6   timestamp_ms
///   7..12  x, y, z ADC codes
///   13     range codes: x in bits 0-1, y in bits 2-3, z in bits 4-5
///   14..15 CRC-16/CCITT-FALSE over bytes 0..13
struct SensorFrame {
    std::uint8_t node_id = 0;
    std::uint16_t seq = 0;
    std::uint32_t timestamp_ms = 0;
    std::array<std::uint16_t, 3> codes{};
    std::array<std::uint8_t, 3> range_codes{};

    friend bool operator==(const SensorFrame&, const SensorFrame&) = default;
};

inline constexpr std::size_t kFrameSize = 16;
inline constexpr std::size_t kFramePayloadSize = kFrameSize - 2;

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes);

/// Throws FrameError if a range code does not fit in two bits.
FrameBytes encode_frame(const SensorFrame& frame);

/// Throws FrameError on a short buffer or CRC mismatch.
SensorFrame decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace bsn
