#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace hawkes {

// Round-trip-safe decimal rendering (17 significant digits).
std::string format_double(double x);

// Write-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& bytes);
std::string to_hex(std::uint64_t x);

// Canonical bytes of a config: sorted keys, no whitespace, shortest
// round-trip float rendering (nlohmann's serializer is deterministic).
std::string canonical_dump(const nlohmann::json& j);
std::string config_hash(const nlohmann::json& j);

}  // namespace hawkes
