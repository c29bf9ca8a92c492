#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "xeo/common.hpp"

namespace xeo {

// The seven supported column types. Date is held as days since 1970-01-01,
// Timestamp as seconds since the epoch; both ride in the int64 alternative.
// Decimal values are quantized to two fractional digits and ride as double.
enum class DataType : uint8_t { Integer, Float, Decimal, Varchar, Boolean, Date, Timestamp };

constexpr int kNumDataTypes = 7;

const char* to_string(DataType t);
DataType data_type_from_string(const std::string& s);

bool is_numeric(DataType t);  // Integer, Float, Decimal

// SQL NULL is the monostate alternative.
using Value = std::variant<std::monostate, int64_t, double, std::string, bool>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Total order used for sorting and multiset comparison: NULL sorts first,
// numeric alternatives compare by numeric value, otherwise by alternative
// index then content. Returns <0, 0, >0.
int compare_values(const Value& a, const Value& b);

bool values_equal(const Value& a, const Value& b);

void hash_value(Fnv64& h, const Value& v);

double value_as_double(const Value& v);

// Encoded byte size of one value; fixed width per type, string length for
// varchar. Used for column statistics and literal featurization.
double value_byte_size(DataType t, const Value& v);

// -1 for varchar (variable width)
int64_t fixed_type_width(DataType t);

// SQL literal rendering, e.g. DATE '2020-01-31', 'abc', 12.5
std::string value_to_sql(DataType t, const Value& v);

std::string format_date(int64_t days);
std::string format_timestamp(int64_t secs);
int64_t parse_date(const std::string& s);       // "YYYY-MM-DD" -> days
int64_t parse_timestamp(const std::string& s);  // "YYYY-MM-DD HH:MM:SS" -> seconds

}  // namespace xeo
