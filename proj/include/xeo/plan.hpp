#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xeo/catalog.hpp"
#include "xeo/expr.hpp"

namespace xeo {

enum class RelKind : uint8_t { TableScan, Filter, Project, Join, Aggregate, Sort, Limit };

constexpr int kNumRelKinds = 7;

const char* to_string(RelKind k);
RelKind rel_kind_from_string(const std::string& s);

struct PlanHints {
  double est_rows = 0.0;
  double avg_row_size = 0.0;
};

// One relational operator. Every node produces an "intrinsic" row layout
// determined by its kind, then `emit` selects/permutes the columns that are
// actually output:
//   TableScan  intrinsic = all table columns
//   Filter     intrinsic = child output           exprs = [predicate]
//   Project    intrinsic = child output ++ exprs  exprs = computed columns
//   Join       intrinsic = left ++ right output   exprs = [condition]
//   Aggregate  intrinsic = keys ++ aggregates     exprs = key refs then agg calls
//   Sort       intrinsic = child output           exprs = sort keys (ascending)
//   Limit      intrinsic = child output           exprs = [integer literal]
// FieldRefs inside exprs index the concatenated child output schemas.
struct RelationNode {
  uint32_t id = 0;
  RelKind kind = RelKind::TableScan;
  std::string table_name;  // TableScan only
  std::vector<RelationNode> children;
  std::vector<Expr> exprs;
  std::vector<SchemaColumn> output_schema;
  std::vector<int32_t> emit;
  std::optional<PlanHints> hints;

  std::vector<SchemaColumn> input_schema() const;  // concatenated child outputs
};

struct LogicalPlan {
  RelationNode root;
};

// Intrinsic (pre-emit) schema; children's output_schema must already be set.
std::vector<SchemaColumn> intrinsic_schema(const RelationNode& node, const Catalog& catalog);

// Recompute output_schema bottom-up from the catalog, overwriting stored
// schemas. Throws on structural errors.
void recompute_schemas(RelationNode& node, const Catalog& catalog);

// Number of leading group-key expressions of an Aggregate node.
int aggregate_group_count(const RelationNode& node);

// Fresh sequential ids in preorder.
void renumber_plan(LogicalPlan& plan);

uint32_t max_node_id(const RelationNode& node);

struct Violation {
  uint32_t node_id = 0;
  std::string message;
};

// Full structural/typing validation. Returns all violations found; never
// throws on malformed plans.
std::vector<Violation> validate_plan(const LogicalPlan& plan, const Catalog& catalog);

// Throws ValidationError listing the violations, if any.
void expect_valid(const LogicalPlan& plan, const Catalog& catalog, const std::string& context);

// Structural equality ignoring node ids.
bool plan_equal_modulo_ids(const LogicalPlan& a, const LogicalPlan& b);

// Digest of structure, kinds, expressions, emit lists and hints; invariant
// under node-id relabeling.
uint64_t plan_fingerprint(const LogicalPlan& plan);

// One node per line, children indented.
std::string print_plan(const LogicalPlan& plan);

bool plan_has_hints(const RelationNode& node);

}  // namespace xeo
