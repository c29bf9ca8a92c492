#pragma once

#include "json.hpp"
#include "xeo/value.hpp"

namespace xeo {

// Insertion-ordered JSON keeps file key order canonical.
using ordered_json = nlohmann::ordered_json;

inline ordered_json value_to_json(DataType t, const Value& v) {
  if (is_null(v)) return nullptr;
  switch (t) {
    case DataType::Integer:
    case DataType::Date:
    case DataType::Timestamp: return std::get<int64_t>(v);
    case DataType::Float:
    case DataType::Decimal: return std::get<double>(v);
    case DataType::Varchar: return std::get<std::string>(v);
    case DataType::Boolean: return std::get<bool>(v);
  }
  return nullptr;
}

inline Value value_from_json(DataType t, const ordered_json& j) {
  if (j.is_null()) return std::monostate{};
  switch (t) {
    case DataType::Integer:
    case DataType::Date:
    case DataType::Timestamp: return j.get<int64_t>();
    case DataType::Float:
    case DataType::Decimal: return j.get<double>();
    case DataType::Varchar: return j.get<std::string>();
    case DataType::Boolean: return j.get<bool>();
  }
  return std::monostate{};
}

}  // namespace xeo
