#include "xeo/value.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace xeo {

const char* to_string(DataType t) {
  switch (t) {
    case DataType::Integer: return "integer";
    case DataType::Float: return "float";
    case DataType::Decimal: return "decimal";
    case DataType::Varchar: return "varchar";
    case DataType::Boolean: return "boolean";
    case DataType::Date: return "date";
    case DataType::Timestamp: return "timestamp";
  }
  return "?";
}

DataType data_type_from_string(const std::string& s) {
  if (s == "integer") return DataType::Integer;
  if (s == "float") return DataType::Float;
  if (s == "decimal") return DataType::Decimal;
  if (s == "varchar") return DataType::Varchar;
  if (s == "boolean") return DataType::Boolean;
  if (s == "date") return DataType::Date;
  if (s == "timestamp") return DataType::Timestamp;
  throw ValidationError("unknown data type: " + s);
}

bool is_numeric(DataType t) {
  return t == DataType::Integer || t == DataType::Float || t == DataType::Decimal;
}

int compare_values(const Value& a, const Value& b) {
  bool an = is_null(a), bn = is_null(b);
  if (an || bn) return an == bn ? 0 : (an ? -1 : 1);

  // numeric cross-comparison between int64 and double alternatives
  bool a_num = std::holds_alternative<int64_t>(a) || std::holds_alternative<double>(a);
  bool b_num = std::holds_alternative<int64_t>(b) || std::holds_alternative<double>(b);
  if (a_num && b_num) {
    if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b)) {
      int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    double x = value_as_double(a), y = value_as_double(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }

  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (std::holds_alternative<std::string>(a)) {
    return std::get<std::string>(a).compare(std::get<std::string>(b));
  }
  if (std::holds_alternative<bool>(a)) {
    int x = std::get<bool>(a), y = std::get<bool>(b);
    return x - y;
  }
  return 0;
}

bool values_equal(const Value& a, const Value& b) { return compare_values(a, b) == 0; }

void hash_value(Fnv64& h, const Value& v) {
  h.add_u8(static_cast<uint8_t>(v.index()));
  switch (v.index()) {
    case 0: break;
    case 1: h.add_i64(std::get<int64_t>(v)); break;
    case 2: h.add_double(std::get<double>(v)); break;
    case 3: h.add_string(std::get<std::string>(v)); break;
    case 4: h.add_u8(std::get<bool>(v) ? 1 : 0); break;
  }
}

double value_as_double(const Value& v) {
  if (std::holds_alternative<int64_t>(v)) return static_cast<double>(std::get<int64_t>(v));
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? 1.0 : 0.0;
  throw Error("value not numeric");
}

int64_t fixed_type_width(DataType t) {
  switch (t) {
    case DataType::Integer: return 8;
    case DataType::Float: return 8;
    case DataType::Decimal: return 8;
    case DataType::Varchar: return -1;
    case DataType::Boolean: return 1;
    case DataType::Date: return 4;
    case DataType::Timestamp: return 8;
  }
  return 8;
}

double value_byte_size(DataType t, const Value& v) {
  if (t == DataType::Varchar) {
    if (is_null(v)) return 0.0;
    return static_cast<double>(std::get<std::string>(v).size());
  }
  return static_cast<double>(fixed_type_width(t));
}

// --- civil date conversion (proleptic Gregorian), days since 1970-01-01 ---

static int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  int64_t era = (y >= 0 ? y : y - 399) / 400;
  unsigned yoe = static_cast<unsigned>(y - era * 400);
  unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

static void civil_from_days(int64_t z, int& y, int& m, int& d) {
  z += 719468;
  int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  unsigned doe = static_cast<unsigned>(z - era * 146097);
  unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  int64_t yy = static_cast<int64_t>(yoe) + era * 400;
  unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

std::string format_date(int64_t days) {
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

std::string format_timestamp(int64_t secs) {
  int64_t days = secs >= 0 ? secs / 86400 : (secs - 86399) / 86400;
  int64_t rem = secs - days * 86400;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s %02d:%02d:%02d", format_date(days).c_str(),
                static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                static_cast<int>(rem % 60));
  return buf;
}

int64_t parse_date(const std::string& s) {
  int y, m, d;
  if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 || d > 31) {
    throw ValidationError("bad date literal: '" + s + "'");
  }
  return days_from_civil(y, m, d);
}

int64_t parse_timestamp(const std::string& s) {
  int y, m, d, hh, mm, ss;
  if (std::sscanf(s.c_str(), "%d-%d-%d %d:%d:%d", &y, &m, &d, &hh, &mm, &ss) != 6 || m < 1 ||
      m > 12 || d < 1 || d > 31 || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 59) {
    throw ValidationError("bad timestamp literal: '" + s + "'");
  }
  return days_from_civil(y, m, d) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string value_to_sql(DataType t, const Value& v) {
  if (is_null(v)) return "NULL";
  switch (t) {
    case DataType::Integer: return std::to_string(std::get<int64_t>(v));
    case DataType::Float:
    case DataType::Decimal: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(v));
      std::string s = buf;
      if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
          s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
      }
      return s;
    }
    case DataType::Varchar: {
      std::string out = "'";
      for (char c : std::get<std::string>(v)) {
        if (c == '\'') out += "''";
        else out += c;
      }
      return out + "'";
    }
    case DataType::Boolean: return std::get<bool>(v) ? "TRUE" : "FALSE";
    case DataType::Date: return "DATE '" + format_date(std::get<int64_t>(v)) + "'";
    case DataType::Timestamp:
      return "TIMESTAMP '" + format_timestamp(std::get<int64_t>(v)) + "'";
  }
  return "NULL";
}

}  // namespace xeo
