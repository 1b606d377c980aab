#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "ctmc/model.hpp"
#include "ctmc/rate_function.hpp"

namespace ctmc {

// Model file (JSON):
//   {
//     "schema": 1,
//     "class": "BirthDeath" | "BatchArrival" | "BatchService" | "BatchBoth",
//     "S": <int>,
//     "truncated": <bool>,
//     "birth":         { "<state>": <rate>, ... },
//     "death":         { ... },
//     "arrival_batch": { "<size>": <rate>, ... },
//     "service_batch": { ... }
//   }
// A <rate> is [c, [k, sin, cos], ...] or a bare number. Keys may be inclusive
// ranges "a..b"; the serializer merges consecutive equal rates that way.

inline constexpr int kModelSchemaVersion = 1;

nlohmann::ordered_json rate_to_json(const RateFunction& f);
RateFunction rate_from_json(const nlohmann::json& j);

std::string serialize_model(const ChainModel& model);
ChainModel parse_model(std::string_view text, std::string_view source = "<string>");

ChainModel load_model(const std::filesystem::path& path);
void save_model(const ChainModel& model, const std::filesystem::path& path);

/// 64-bit FNV-1a hash as lowercase hex.
std::string fnv1a_hex(std::string_view bytes);

/// FNV-1a hash of the serialized model; ties certificates to their model.
std::string model_fingerprint(const ChainModel& model);

}  // namespace ctmc
