#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "evoplc/genome.hpp"

namespace evoplc::genome {

// Table rows as JSON objects in column order:
//   {"line":0,"output":"P1","input":"S3","op":"ASSIGN","neg":true,"mode":"A"}
nlohmann::ordered_json rows_to_json(const Individual& individual);
Individual rows_from_json(const nlohmann::ordered_json& array);

// One row object per line; parsing and re-serializing reproduces the bytes.
std::string to_json_text(const Individual& individual);
Individual from_json_text(std::string_view text);

}  // namespace evoplc::genome
