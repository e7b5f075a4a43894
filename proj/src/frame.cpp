#include "bsn/frame.hpp"

#include <boost/crc.hpp>

#include "bsn/errors.hpp"

namespace bsn {

namespace {

void put_u16(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 8);
    p[1] = static_cast<std::uint8_t>(v);
}

void put_u32(std::uint8_t* p, std::uint32_t v) {
    put_u16(p, static_cast<std::uint16_t>(v >> 16));
    put_u16(p + 2, static_cast<std::uint16_t>(v));
}

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

std::uint32_t get_u32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(get_u16(p)) << 16) | get_u16(p + 2);
}

}  // namespace

std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes) {
    boost::crc_ccitt_type crc;  // poly 0x1021, init 0xFFFF, no reflection, no final xor
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

FrameBytes encode_frame(const SensorFrame& frame) {
    FrameBytes out{};
    out[0] = frame.node_id;
    put_u16(&out[1], frame.seq);
    put_u32(&out[3], frame.timestamp_ms);
    for (std::size_t axis = 0; axis < 3; ++axis) put_u16(&out[7 + 2 * axis], frame.codes[axis]);

    std::uint8_t packed = 0;
    for (std::size_t axis = 0; axis < 3; ++axis) {
        if (frame.range_codes[axis] > 3) throw FrameError("range code does not fit in two bits");
        packed |= static_cast<std::uint8_t>(frame.range_codes[axis] << (2 * axis));
    }
    out[13] = packed;
    put_u16(&out[kFramePayloadSize], crc16_ccitt(std::span(out).first(kFramePayloadSize)));
    return out;
}

SensorFrame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFrameSize) throw FrameError("short frame: " + std::to_string(bytes.size()) + " bytes");
    const std::uint16_t expected = get_u16(&bytes[kFramePayloadSize]);
    if (crc16_ccitt(bytes.first(kFramePayloadSize)) != expected) throw FrameError("frame CRC mismatch");
    if ((bytes[13] & 0xC0) != 0) throw FrameError("spare range bits set");

    SensorFrame f;
    f.node_id = bytes[0];
    f.seq = get_u16(&bytes[1]);
    f.timestamp_ms = get_u32(&bytes[3]);
    for (std::size_t axis = 0; axis < 3; ++axis) {
        f.codes[axis] = get_u16(&bytes[7 + 2 * axis]);
        f.range_codes[axis] = static_cast<std::uint8_t>((bytes[13] >> (2 * axis)) & 0x3);
    }
    return f;
}

}  // namespace bsn
