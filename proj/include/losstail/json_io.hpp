#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "losstail/distribution.hpp"
#include "losstail/tail_model.hpp"

namespace losstail {

using Json = nlohmann::json;

/// {"family": "<tag>", "params": [...]}
Json to_json(const DistributionSpec& spec);
DistributionSpec distribution_from_json(const Json& j);

/// {"base": {...},
///  "upper": {"adjuster": {...}, "p_upper": p, "x_upper": x} | absent,
///  "lower": {"adjuster": {...}, "x_lower": x} | absent}
Json to_json(const AdjustedModel& model);
AdjustedModel model_from_json(const Json& j);

/// Deterministic text form: keys sorted, two-space indent, every floating
/// point number printed with 17 significant digits. Non-finite numbers are
/// written as null.
std::string dump_canonical(const Json& j);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace losstail
