#include "gtf/wire.hpp"

#include <cstring>

#include "gtf/errors.hpp"

namespace gtf::wire {

namespace {

std::uint8_t xor_checksum(const std::uint8_t* data, std::size_t n) {
  std::uint8_t x = 0;
  for (std::size_t i = 0; i < n; ++i) x ^= data[i];
  return x;
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::vector<std::uint8_t>& in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
  return v;
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(out, bits, 8);
}

double get_f64(const std::vector<std::uint8_t>& in, std::size_t at) {
  const std::uint64_t bits = get_u64(in, at, 8);
  double d;
  std::memcpy(&d, &bits, sizeof(d));
  return d;
}

void check_client_id(int client_id) {
  if (client_id < 1 || client_id > 255) {
    throw WireFormatError("client id out of range");
  }
}

void verify_checksum(const std::vector<std::uint8_t>& frame) {
  if (xor_checksum(frame.data(), frame.size() - 1) != frame.back()) {
    throw WireFormatError("checksum mismatch");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_control(ControlType type, int client_id) {
  check_client_id(client_id);
  return {static_cast<std::uint8_t>(type), static_cast<std::uint8_t>(client_id)};
}

std::pair<ControlType, int> decode_control(const std::vector<std::uint8_t>& frame) {
  if (frame.size() != kControlLen) {
    throw WireFormatError("control frame must be 2 bytes");
  }
  const auto type = frame[0];
  if (type < 0x01 || type > 0x05) {
    throw WireFormatError("unknown control type");
  }
  return {static_cast<ControlType>(type), frame[1]};
}

std::vector<std::uint8_t> encode_time_reply(int client_id, Timestamp t_i) {
  check_client_id(client_id);
  if (t_i.micros < 0) {
    throw WireFormatError("negative timestamp on wire");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kTimeReplyLen);
  out.push_back(static_cast<std::uint8_t>(client_id));
  put_u64(out, static_cast<std::uint64_t>(t_i.micros), 8);
  out.push_back(xor_checksum(out.data(), out.size()));
  return out;
}

std::pair<int, Timestamp> decode_time_reply(const std::vector<std::uint8_t>& frame) {
  if (frame.size() != kTimeReplyLen) {
    throw WireFormatError("time reply must be 10 bytes");
  }
  verify_checksum(frame);
  return {frame[0], Timestamp(static_cast<std::int64_t>(get_u64(frame, 1, 8)))};
}

std::vector<std::uint8_t> encode_measurement(int client_id, const RawMeasurement& m) {
  check_client_id(client_id);
  if (m.t_client.micros < 0 || m.t_client.micros >= (std::int64_t{1} << 56)) {
    throw WireFormatError("timestamp does not fit the 7-byte wire field");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kMeasurementLen);
  out.push_back(static_cast<std::uint8_t>(client_id));
  out.push_back(static_cast<std::uint8_t>(m.status));
  put_f64(out, m.ha);
  put_f64(out, m.va);
  put_f64(out, m.range);
  put_u64(out, static_cast<std::uint64_t>(m.t_client.micros), 7);
  out.push_back(xor_checksum(out.data(), out.size()));
  return out;
}

std::pair<int, RawMeasurement> decode_measurement(const std::vector<std::uint8_t>& frame) {
  if (frame.size() != kMeasurementLen) {
    throw WireFormatError("measurement frame must be 34 bytes");
  }
  verify_checksum(frame);
  const int client_id = frame[0];
  RawMeasurement m;
  m.station = station_frame(client_id);
  switch (frame[1]) {
    case 0: m.status = Status::Ok; break;
    case 1: m.status = Status::PrismNotDetected; break;
    case 2: m.status = Status::PrismTooClose; break;
    case 3: m.status = Status::NotLevelled; break;
    default: m.status = Status::Invalid; break;  // unknown codes are errors
  }
  m.ha = get_f64(frame, 2);
  m.va = get_f64(frame, 10);
  m.range = get_f64(frame, 18);
  m.t_client = Timestamp(static_cast<std::int64_t>(get_u64(frame, 26, 7)));
  return {client_id, m};
}

}  // namespace gtf::wire
