#include "xeo/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace xeo {

namespace {

double clamp01(double s, const SelectivityModel& m) {
  return std::min(1.0, std::max(m.floor, s));
}

const ColumnStatsView* column_of(const Expr& e, const std::vector<ColumnStatsView>& stats) {
  if (e.kind != Expr::Kind::FieldRef) return nullptr;
  if (e.field_index < 0 || e.field_index >= static_cast<int32_t>(stats.size())) return nullptr;
  const ColumnStatsView& v = stats[static_cast<size_t>(e.field_index)];
  return v.known ? &v : nullptr;
}

double eq_selectivity(const Expr& lhs, const Expr& rhs, const std::vector<ColumnStatsView>& stats,
                      const SelectivityModel& m) {
  const ColumnStatsView* a = column_of(lhs, stats);
  const ColumnStatsView* b = column_of(rhs, stats);
  bool lhs_const = lhs.kind == Expr::Kind::Literal;
  bool rhs_const = rhs.kind == Expr::Kind::Literal;
  if (a && rhs_const) return 1.0 / static_cast<double>(std::max<int64_t>(1, a->ndv));
  if (b && lhs_const) return 1.0 / static_cast<double>(std::max<int64_t>(1, b->ndv));
  if (a && b) {
    // equi-join rule: 1 / max(NDV_l, NDV_r)
    return 1.0 / static_cast<double>(std::max<int64_t>(1, std::max(a->ndv, b->ndv)));
  }
  return m.missing;
}

}  // namespace

double estimate_selectivity(const Expr& predicate, const std::vector<ColumnStatsView>& stats,
                            const SelectivityModel& m) {
  if (predicate.kind == Expr::Kind::Literal) {
    if (predicate.is_literal_bool(true)) return 1.0;
    return m.floor;  // constant false or NULL keeps nothing
  }
  if (predicate.kind == Expr::Kind::FieldRef) {
    // bare boolean column
    const ColumnStatsView* c = column_of(predicate, stats);
    if (c) return clamp01(1.0 / static_cast<double>(std::max<int64_t>(1, c->ndv)), m);
    return clamp01(m.missing, m);
  }

  const std::string& op = predicate.op_name;

  if (op == "and") {
    return clamp01(estimate_selectivity(predicate.args[0], stats, m) *
                       estimate_selectivity(predicate.args[1], stats, m),
                   m);
  }
  if (op == "or") {
    double s1 = estimate_selectivity(predicate.args[0], stats, m);
    double s2 = estimate_selectivity(predicate.args[1], stats, m);
    return clamp01(s1 + s2 - s1 * s2, m);
  }
  if (op == "not") {
    return clamp01(1.0 - estimate_selectivity(predicate.args[0], stats, m), m);
  }
  if (op == "eq") {
    return clamp01(eq_selectivity(predicate.args[0], predicate.args[1], stats, m), m);
  }
  if (op == "neq") {
    return clamp01(1.0 - eq_selectivity(predicate.args[0], predicate.args[1], stats, m), m);
  }
  if (op == "lt" || op == "le" || op == "gt" || op == "ge") {
    return clamp01(m.range, m);
  }
  if (op == "between") {
    return clamp01(m.between, m);
  }
  if (op == "in") {
    size_t list_size = predicate.args.size() - 1;
    const ColumnStatsView* c = column_of(predicate.args[0], stats);
    double per_item = c ? 1.0 / static_cast<double>(std::max<int64_t>(1, c->ndv)) : m.missing;
    return clamp01(std::min(static_cast<double>(list_size) * per_item, m.in_list_cap), m);
  }
  if (op == "like") {
    return clamp01(m.like, m);
  }
  // anything else (arithmetic comparisons wrapped oddly, datetime exprs)
  return clamp01(m.missing, m);
}

}  // namespace xeo
