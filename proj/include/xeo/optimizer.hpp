#pragma once

#include <optional>

#include "xeo/plan.hpp"

namespace xeo {

// System-R style per-shape constants. Composition: AND -> product,
// OR -> s1 + s2 - s1*s2, NOT -> 1 - s; results clamped into (0, 1].
struct SelectivityModel {
  double range = 1.0 / 3.0;   // <, >, <=, >=
  double between = 0.25;
  double like = 0.1;
  double in_list_cap = 0.5;
  double missing = 0.1;       // fallback when stats are unavailable
  double floor = 1e-9;
};

// What the estimator knows about one input column of a predicate.
struct ColumnStatsView {
  bool known = false;
  int64_t ndv = 0;
  int64_t num_nulls = 0;
};

double estimate_selectivity(const Expr& predicate, const std::vector<ColumnStatsView>& stats,
                            const SelectivityModel& model = {});

// Catalog origin of an output column, when it traces to a base table column.
struct ColumnOrigin {
  std::string table;
  int column = -1;
};

// Per output column of `node`; nullopt for computed columns.
std::vector<std::optional<ColumnOrigin>> column_origins(const RelationNode& node,
                                                        const Catalog& catalog);

// Bottom-up cardinality estimate from catalog statistics and the
// selectivity model (no hints required).
double estimate_plan_rows(const RelationNode& node, const Catalog& catalog,
                          const SelectivityModel& model = {});

// Constant folding and boolean simplification; pure, deterministic.
Expr simplify_expr(const Expr& e);

// Drops unused columns everywhere: every node's emit keeps only columns an
// ancestor (or the final output) consumes. Root output is preserved exactly.
LogicalPlan trim_plan(const LogicalPlan& plan, const Catalog& catalog);

// Pushes every conjunct to the lowest node whose schema covers it, merges
// adjacent Filters/Projects, folds constants, removes tautologies and
// collapses contradictions into constant-false Filters.
LogicalPlan pushdown_and_simplify(const LogicalPlan& plan, const Catalog& catalog);

// Greedy bushy join ordering: repeatedly joins the forest pair with minimal
// estimated output rows, applying every pool predicate that becomes
// applicable. Cross joins are considered only when no predicate-connected
// pair exists.
LogicalPlan order_joins(const LogicalPlan& plan, const Catalog& catalog);

// Bottom-up hint propagation; result has hints on every node.
LogicalPlan annotate_hints(const LogicalPlan& plan, const Catalog& catalog);

// trim -> pushdown_and_simplify -> order_joins -> annotate_hints
LogicalPlan optimize(const LogicalPlan& plan, const Catalog& catalog);

}  // namespace xeo
