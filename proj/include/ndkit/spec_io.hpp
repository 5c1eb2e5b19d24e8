#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ndkit/schedule.hpp"

namespace ndkit {

/// Reads a schedule document:
///
///   { "name": "...", "tick_us": 1,
///     "beacons":   { "durations": [..], "gaps": [..], "periodic": true, "offset": 0 },
///     "reception": { "period": N, "windows": [ {"offset": N, "duration": N}, .. ] }
///                | { "generator": "alternating", "gamma": "1/4", "seed": 0 },
///     "overheads": { "tx": 0, "rx": 0, "tx_rx": 0, "rx_tx": 0 } }
///
/// Unknown keys are rejected. Syntax errors carry line and column, type
/// errors the field path, and invariant violations the validate_schedule
/// diagnostics unchanged.
ProtocolSpec parse_spec(const std::string& path);
ProtocolSpec parse_spec_text(std::string_view text, std::string_view source = "<string>");

/// Serialises a spec to the same document format (2-space indented JSON).
std::string emit_spec(const ProtocolSpec& spec);

/// FNV-1a 64-bit digest of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

std::string read_file(const std::string& path);

}  // namespace ndkit
