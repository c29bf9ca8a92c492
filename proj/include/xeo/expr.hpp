#pragma once

#include <string>
#include <vector>

#include "xeo/value.hpp"

namespace xeo {

struct SchemaColumn {
  std::string name;
  DataType type = DataType::Integer;
};

bool schemas_equal(const std::vector<SchemaColumn>& a, const std::vector<SchemaColumn>& b);

// Expression categories; each operation maps to exactly one. The grouping
// follows computational complexity, mirroring the featurizer's one-hot set.
enum class OpCategory : uint8_t {
  Comparison,
  Arithmetic,
  Logical,
  SimpleAggregate,
  ComplexAggregate,
  String,
  Cast,
  Datetime
};

constexpr int kNumOpCategories = 8;

const char* to_string(OpCategory c);

struct OpSignature {
  const char* name;
  OpCategory category;
  int min_arity;
  int max_arity;  // -1 = unbounded (IN lists)
};

// nullptr when unknown
const OpSignature* find_op(const std::string& name);
bool is_aggregate_op(const std::string& name);

struct Expr {
  enum class Kind : uint8_t { FieldRef, Literal, Operation };

  Kind kind = Kind::Literal;

  // FieldRef: index into the owning node's input schema (concatenated child
  // output schemas, left before right for joins)
  int32_t field_index = -1;

  // Literal
  DataType literal_type = DataType::Integer;
  Value literal_value{};
  bool is_casted = false;

  // Operation
  std::string op_name;
  std::vector<Expr> args;

  static Expr field(int32_t index) {
    Expr e;
    e.kind = Kind::FieldRef;
    e.field_index = index;
    return e;
  }
  static Expr literal(DataType t, Value v, bool casted = false) {
    Expr e;
    e.kind = Kind::Literal;
    e.literal_type = t;
    e.literal_value = std::move(v);
    e.is_casted = casted;
    return e;
  }
  static Expr op(std::string name, std::vector<Expr> call_args) {
    Expr e;
    e.kind = Kind::Operation;
    e.op_name = std::move(name);
    e.args = std::move(call_args);
    return e;
  }
  static Expr boolean(bool b) { return literal(DataType::Boolean, Value{b}); }

  bool is_literal_bool(bool b) const {
    return kind == Kind::Literal && literal_type == DataType::Boolean && !is_null(literal_value) &&
           std::get<bool>(literal_value) == b;
  }
  bool is_null_literal() const { return kind == Kind::Literal && is_null(literal_value); }
};

bool exprs_equal(const Expr& a, const Expr& b);
void hash_expr(Fnv64& h, const Expr& e);

// Result type of an expression over the given input schema; throws
// ValidationError on unknown ops, arity or typing violations.
DataType infer_expr_type(const Expr& e, const std::vector<SchemaColumn>& input);

bool contains_aggregate(const Expr& e);

// compact rendering for plan printing and diagnostics
std::string expr_to_string(const Expr& e, const std::vector<SchemaColumn>& input);

// every field index referenced anywhere in the expression
void collect_field_refs(const Expr& e, std::vector<int32_t>& out);

// rewrite field indices through a mapping (old index -> new index)
Expr remap_field_refs(const Expr& e, const std::vector<int32_t>& mapping);

}  // namespace xeo
