#ifndef GTF_WIRE_HPP
#define GTF_WIRE_HPP

#include <cstdint>
#include <vector>

#include "gtf/types.hpp"

namespace gtf::wire {

// Radio message layouts. The channel is request/response, so a receiver
// always knows what frame type it is waiting for; only control frames carry
// a type byte. All multi-byte fields are little-endian. The trailing
// checksum is the XOR of every preceding byte.

enum class ControlType : std::uint8_t {
  Ping = 0x01,         // opens a sync cycle
  Ack = 0x02,          // client's immediate confirmation
  TimeRequest = 0x03,  // master asks for the captured client timestamp
  MeasRequest = 0x04,  // master asks for the newest measurement
  NoData = 0x05,       // client has nothing new
};

inline constexpr std::size_t kControlLen = 2;      // [type][client_id]
inline constexpr std::size_t kTimeReplyLen = 10;   // [client_id][t_i:8][checksum]
inline constexpr std::size_t kMeasurementLen = 34;
// Measurement frame: [client_id][status][ha:f64][va:f64][range:f64][t_client:7][checksum]

std::vector<std::uint8_t> encode_control(ControlType type, int client_id);
// Returns (type, client_id); throws WireFormatError on bad length/type.
std::pair<ControlType, int> decode_control(const std::vector<std::uint8_t>& frame);

std::vector<std::uint8_t> encode_time_reply(int client_id, Timestamp t_i);
std::pair<int, Timestamp> decode_time_reply(const std::vector<std::uint8_t>& frame);

std::vector<std::uint8_t> encode_measurement(int client_id, const RawMeasurement& m);
std::pair<int, RawMeasurement> decode_measurement(const std::vector<std::uint8_t>& frame);

}  // namespace gtf::wire

#endif  // GTF_WIRE_HPP
