#include "xeo/expr.hpp"

#include <algorithm>

namespace xeo {

bool schemas_equal(const std::vector<SchemaColumn>& a, const std::vector<SchemaColumn>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].type != b[i].type) return false;
  }
  return true;
}

const char* to_string(OpCategory c) {
  switch (c) {
    case OpCategory::Comparison: return "comparison";
    case OpCategory::Arithmetic: return "arithmetic";
    case OpCategory::Logical: return "logical";
    case OpCategory::SimpleAggregate: return "simple_aggregate";
    case OpCategory::ComplexAggregate: return "complex_aggregate";
    case OpCategory::String: return "string";
    case OpCategory::Cast: return "cast";
    case OpCategory::Datetime: return "datetime";
  }
  return "?";
}

// Closed operation registry. The "cast" category is reserved for casts of
// whole expressions; literal casts are carried by the isCasted flag instead,
// so no operation currently maps to it.
static const OpSignature kOps[] = {
    {"eq", OpCategory::Comparison, 2, 2},
    {"neq", OpCategory::Comparison, 2, 2},
    {"lt", OpCategory::Comparison, 2, 2},
    {"le", OpCategory::Comparison, 2, 2},
    {"gt", OpCategory::Comparison, 2, 2},
    {"ge", OpCategory::Comparison, 2, 2},
    {"between", OpCategory::Comparison, 3, 3},
    {"in", OpCategory::Comparison, 2, -1},
    {"add", OpCategory::Arithmetic, 2, 2},
    {"sub", OpCategory::Arithmetic, 2, 2},
    {"mul", OpCategory::Arithmetic, 2, 2},
    {"div", OpCategory::Arithmetic, 2, 2},
    {"neg", OpCategory::Arithmetic, 1, 1},
    {"and", OpCategory::Logical, 2, 2},
    {"or", OpCategory::Logical, 2, 2},
    {"not", OpCategory::Logical, 1, 1},
    {"sum", OpCategory::SimpleAggregate, 1, 1},
    {"count", OpCategory::SimpleAggregate, 1, 1},
    {"count_star", OpCategory::SimpleAggregate, 0, 0},
    {"min", OpCategory::SimpleAggregate, 1, 1},
    {"max", OpCategory::SimpleAggregate, 1, 1},
    {"avg", OpCategory::ComplexAggregate, 1, 1},
    {"count_distinct", OpCategory::ComplexAggregate, 1, 1},
    {"like", OpCategory::String, 2, 2},
    {"year", OpCategory::Datetime, 1, 1},
};

const OpSignature* find_op(const std::string& name) {
  for (const auto& op : kOps) {
    if (name == op.name) return &op;
  }
  return nullptr;
}

bool is_aggregate_op(const std::string& name) {
  const OpSignature* sig = find_op(name);
  return sig && (sig->category == OpCategory::SimpleAggregate ||
                 sig->category == OpCategory::ComplexAggregate);
}

bool exprs_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::FieldRef: return a.field_index == b.field_index;
    case Expr::Kind::Literal:
      return a.literal_type == b.literal_type && a.is_casted == b.is_casted &&
             a.literal_value.index() == b.literal_value.index() &&
             values_equal(a.literal_value, b.literal_value);
    case Expr::Kind::Operation: {
      if (a.op_name != b.op_name || a.args.size() != b.args.size()) return false;
      for (size_t i = 0; i < a.args.size(); ++i) {
        if (!exprs_equal(a.args[i], b.args[i])) return false;
      }
      return true;
    }
  }
  return false;
}

void hash_expr(Fnv64& h, const Expr& e) {
  h.add_u8(static_cast<uint8_t>(e.kind));
  switch (e.kind) {
    case Expr::Kind::FieldRef: h.add_u32(static_cast<uint32_t>(e.field_index)); break;
    case Expr::Kind::Literal:
      h.add_u8(static_cast<uint8_t>(e.literal_type));
      h.add_u8(e.is_casted ? 1 : 0);
      hash_value(h, e.literal_value);
      break;
    case Expr::Kind::Operation:
      h.add_string(e.op_name);
      h.add_u64(e.args.size());
      for (const auto& a : e.args) hash_expr(h, a);
      break;
  }
}

namespace {

bool comparable(DataType a, DataType b) {
  if (a == b) return a != DataType::Boolean || true;
  return is_numeric(a) && is_numeric(b);
}

DataType promote_numeric(DataType a, DataType b) {
  if (a == DataType::Float || b == DataType::Float) return DataType::Float;
  if (a == DataType::Decimal || b == DataType::Decimal) return DataType::Decimal;
  return DataType::Integer;
}

}  // namespace

DataType infer_expr_type(const Expr& e, const std::vector<SchemaColumn>& input) {
  switch (e.kind) {
    case Expr::Kind::FieldRef: {
      if (e.field_index < 0 || e.field_index >= static_cast<int32_t>(input.size())) {
        throw ValidationError("field reference " + std::to_string(e.field_index) +
                              " out of range (schema width " + std::to_string(input.size()) + ")");
      }
      return input[static_cast<size_t>(e.field_index)].type;
    }
    case Expr::Kind::Literal: {
      if (!is_null(e.literal_value)) {
        size_t want = 0;
        switch (e.literal_type) {
          case DataType::Integer:
          case DataType::Date:
          case DataType::Timestamp: want = 1; break;
          case DataType::Float:
          case DataType::Decimal: want = 2; break;
          case DataType::Varchar: want = 3; break;
          case DataType::Boolean: want = 4; break;
        }
        if (e.literal_value.index() != want) {
          throw ValidationError(std::string("literal value not representable as ") +
                                to_string(e.literal_type));
        }
      }
      return e.literal_type;
    }
    case Expr::Kind::Operation: {
      const OpSignature* sig = find_op(e.op_name);
      if (!sig) throw ValidationError("unknown operation: " + e.op_name);
      int n = static_cast<int>(e.args.size());
      if (n < sig->min_arity || (sig->max_arity >= 0 && n > sig->max_arity)) {
        throw ValidationError("operation " + e.op_name + " arity " + std::to_string(n) +
                              " outside [" + std::to_string(sig->min_arity) + "," +
                              (sig->max_arity < 0 ? std::string("inf") : std::to_string(sig->max_arity)) +
                              "]");
      }
      std::vector<DataType> at;
      at.reserve(e.args.size());
      for (const auto& a : e.args) at.push_back(infer_expr_type(a, input));

      const std::string& op = e.op_name;
      if (op == "eq" || op == "neq" || op == "lt" || op == "le" || op == "gt" || op == "ge") {
        if (!comparable(at[0], at[1])) {
          throw ValidationError("comparison " + op + " between " + to_string(at[0]) + " and " +
                                to_string(at[1]));
        }
        return DataType::Boolean;
      }
      if (op == "between") {
        if (!comparable(at[0], at[1]) || !comparable(at[0], at[2])) {
          throw ValidationError("between bounds incompatible with " + std::string(to_string(at[0])));
        }
        return DataType::Boolean;
      }
      if (op == "in") {
        for (size_t i = 1; i < at.size(); ++i) {
          if (!comparable(at[0], at[i])) {
            throw ValidationError("IN list element type " + std::string(to_string(at[i])) +
                                  " incompatible with " + to_string(at[0]));
          }
        }
        return DataType::Boolean;
      }
      if (op == "add" || op == "sub" || op == "mul" || op == "div") {
        if (!is_numeric(at[0]) || !is_numeric(at[1])) {
          throw ValidationError("arithmetic " + op + " requires numeric arguments");
        }
        return op == "div" ? DataType::Float : promote_numeric(at[0], at[1]);
      }
      if (op == "neg") {
        if (!is_numeric(at[0])) throw ValidationError("neg requires a numeric argument");
        return at[0];
      }
      if (op == "and" || op == "or" || op == "not") {
        for (DataType t : at) {
          if (t != DataType::Boolean) throw ValidationError(op + " requires boolean arguments");
        }
        return DataType::Boolean;
      }
      if (op == "sum") {
        if (!is_numeric(at[0])) throw ValidationError("sum requires a numeric argument");
        return at[0];
      }
      if (op == "count" || op == "count_star" || op == "count_distinct") return DataType::Integer;
      if (op == "min" || op == "max") return at[0];
      if (op == "avg") {
        if (!is_numeric(at[0])) throw ValidationError("avg requires a numeric argument");
        return DataType::Float;
      }
      if (op == "like") {
        if (at[0] != DataType::Varchar || at[1] != DataType::Varchar) {
          throw ValidationError("like requires varchar arguments");
        }
        return DataType::Boolean;
      }
      if (op == "year") {
        if (at[0] != DataType::Date && at[0] != DataType::Timestamp) {
          throw ValidationError("year requires a date or timestamp argument");
        }
        return DataType::Integer;
      }
      throw ValidationError("unhandled operation: " + op);
    }
  }
  throw ValidationError("malformed expression");
}

bool contains_aggregate(const Expr& e) {
  if (e.kind == Expr::Kind::Operation) {
    if (is_aggregate_op(e.op_name)) return true;
    for (const auto& a : e.args) {
      if (contains_aggregate(a)) return true;
    }
  }
  return false;
}

std::string expr_to_string(const Expr& e, const std::vector<SchemaColumn>& input) {
  switch (e.kind) {
    case Expr::Kind::FieldRef: {
      if (e.field_index >= 0 && e.field_index < static_cast<int32_t>(input.size())) {
        return input[static_cast<size_t>(e.field_index)].name;
      }
      return "$" + std::to_string(e.field_index);
    }
    case Expr::Kind::Literal: return value_to_sql(e.literal_type, e.literal_value);
    case Expr::Kind::Operation: {
      std::string s = e.op_name + "(";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) s += ", ";
        s += expr_to_string(e.args[i], input);
      }
      return s + ")";
    }
  }
  return "?";
}

void collect_field_refs(const Expr& e, std::vector<int32_t>& out) {
  if (e.kind == Expr::Kind::FieldRef) {
    out.push_back(e.field_index);
  } else if (e.kind == Expr::Kind::Operation) {
    for (const auto& a : e.args) collect_field_refs(a, out);
  }
}

Expr remap_field_refs(const Expr& e, const std::vector<int32_t>& mapping) {
  Expr out = e;
  if (e.kind == Expr::Kind::FieldRef) {
    out.field_index = mapping[static_cast<size_t>(e.field_index)];
  } else if (e.kind == Expr::Kind::Operation) {
    for (auto& a : out.args) a = remap_field_refs(a, mapping);
  }
  return out;
}

}  // namespace xeo
