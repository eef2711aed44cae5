#pragma once

// Internal JSON helpers shared by the config and bundle serializers.

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gazelink/config.hpp"

namespace gazelink::detail {

using ojson = nlohmann::ordered_json;

ojson config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const ojson& doc, std::string_view source);

/// Non-finite values are stored as null and read back as +infinity.
ojson number_or_null(double v);
double number_or_inf(const ojson& v);

}  // namespace gazelink::detail
