#pragma once

#include <cstdint>
#include <vector>

#include "xeo/plan.hpp"

namespace xeo {

struct ExecOptions {
  // hard cap on any node's output cardinality; exceeding it aborts the query
  int64_t max_intermediate_rows = 1000000;
};

struct NodeProfile {
  uint32_t node_id = 0;
  RelKind kind = RelKind::TableScan;
  std::vector<int64_t> rows_in;  // one entry per child
  int64_t rows_out = 0;
  int64_t scan_rows = 0;  // full table cardinality for TableScan nodes
};

struct ExecProfile {
  std::vector<NodeProfile> nodes;
  int64_t output_rows = 0;
};

struct ResultSet {
  std::vector<SchemaColumn> schema;
  std::vector<std::vector<Value>> rows;
};

// Three-valued expression evaluation over one input row (concatenated child
// outputs). Boolean results use Value{bool} with NULL for unknown.
Value eval_expr(const Expr& e, const std::vector<Value>& row);

// Reference executor: exact inner-join/aggregate/sort semantics over the
// catalog's materialized data. Throws ResourceCapError when any intermediate
// exceeds the cap. The profile, when requested, records true per-node
// cardinalities.
ResultSet execute(const LogicalPlan& plan, const Catalog& catalog, const ExecOptions& opts = {},
                  ExecProfile* profile = nullptr);

// order-insensitive comparison used by semantic-preservation checks
bool result_multisets_equal(const ResultSet& a, const ResultSet& b);

uint64_t result_multiset_digest(const ResultSet& r);

}  // namespace xeo
