#include "xeo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "xeo/executor.hpp"

namespace xeo {

// ---------------------------------------------------------------------------
// Expression simplification
// ---------------------------------------------------------------------------

namespace {

bool is_const(const Expr& e) { return e.kind == Expr::Kind::Literal; }

bool all_const(const std::vector<Expr>& args) {
  for (const auto& a : args) {
    if (!is_const(a)) return false;
  }
  return true;
}

}  // namespace

Expr simplify_expr(const Expr& e) {
  if (e.kind != Expr::Kind::Operation) return e;

  Expr out = e;
  for (auto& a : out.args) a = simplify_expr(a);
  const std::string& op = out.op_name;

  if (op == "and") {
    const Expr& a = out.args[0];
    const Expr& b = out.args[1];
    if (a.is_literal_bool(false) || b.is_literal_bool(false)) return Expr::boolean(false);
    if (a.is_literal_bool(true)) return b;
    if (b.is_literal_bool(true)) return a;
    return out;
  }
  if (op == "or") {
    const Expr& a = out.args[0];
    const Expr& b = out.args[1];
    if (a.is_literal_bool(true) || b.is_literal_bool(true)) return Expr::boolean(true);
    if (a.is_literal_bool(false)) return b;
    if (b.is_literal_bool(false)) return a;
    return out;
  }
  if (op == "not") {
    const Expr& a = out.args[0];
    if (a.is_literal_bool(true)) return Expr::boolean(false);
    if (a.is_literal_bool(false)) return Expr::boolean(true);
    if (a.kind == Expr::Kind::Operation && a.op_name == "not") return a.args[0];
    return out;
  }

  if (all_const(out.args)) {
    try {
      DataType t = infer_expr_type(out, {});
      Value v = eval_expr(out, {});
      return Expr::literal(t, std::move(v));
    } catch (const Error&) {
      return out;  // not foldable; leave for the executor
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Column provenance and statistics views
// ---------------------------------------------------------------------------

std::vector<std::optional<ColumnOrigin>> column_origins(const RelationNode& node,
                                                        const Catalog& catalog) {
  std::vector<std::optional<ColumnOrigin>> intrinsic;
  std::vector<std::optional<ColumnOrigin>> input;
  for (const auto& c : node.children) {
    auto co = column_origins(c, catalog);
    input.insert(input.end(), co.begin(), co.end());
  }

  switch (node.kind) {
    case RelKind::TableScan: {
      const TableDef* t = catalog.find_table(node.table_name);
      size_t n = t ? t->columns.size() : 0;
      for (size_t i = 0; i < n; ++i) intrinsic.push_back(ColumnOrigin{node.table_name, static_cast<int>(i)});
      break;
    }
    case RelKind::Filter:
    case RelKind::Sort:
    case RelKind::Limit:
    case RelKind::Join: intrinsic = input; break;
    case RelKind::Project: {
      intrinsic = input;
      for (const auto& e : node.exprs) {
        if (e.kind == Expr::Kind::FieldRef) {
          intrinsic.push_back(input[static_cast<size_t>(e.field_index)]);
        } else {
          intrinsic.push_back(std::nullopt);
        }
      }
      break;
    }
    case RelKind::Aggregate: {
      int g = aggregate_group_count(node);
      for (size_t i = 0; i < node.exprs.size(); ++i) {
        if (static_cast<int>(i) < g && node.exprs[i].kind == Expr::Kind::FieldRef) {
          intrinsic.push_back(input[static_cast<size_t>(node.exprs[i].field_index)]);
        } else {
          intrinsic.push_back(std::nullopt);
        }
      }
      break;
    }
  }

  std::vector<std::optional<ColumnOrigin>> out;
  for (int32_t i : node.emit) out.push_back(intrinsic[static_cast<size_t>(i)]);
  return out;
}

namespace {

ColumnStatsView view_of(const std::optional<ColumnOrigin>& origin, const Catalog& catalog) {
  ColumnStatsView v;
  if (!origin) return v;
  const TableDef* t = catalog.find_table(origin->table);
  if (!t || origin->column < 0 || origin->column >= static_cast<int>(t->columns.size())) return v;
  const ColumnStats& s = t->columns[static_cast<size_t>(origin->column)].stats;
  v.known = true;
  v.ndv = s.num_distinct;
  v.num_nulls = s.num_nulls;
  return v;
}

std::vector<ColumnStatsView> input_stats(const RelationNode& node, const Catalog& catalog) {
  std::vector<ColumnStatsView> out;
  for (const auto& c : node.children) {
    for (const auto& origin : column_origins(c, catalog)) out.push_back(view_of(origin, catalog));
  }
  return out;
}

double column_width(const std::optional<ColumnOrigin>& origin, DataType type,
                    const Catalog& catalog) {
  if (origin) {
    const ColumnDef* c = catalog.find_column(origin->table, "");
    (void)c;
    const TableDef* t = catalog.find_table(origin->table);
    if (t && origin->column >= 0 && origin->column < static_cast<int>(t->columns.size())) {
      return t->columns[static_cast<size_t>(origin->column)].stats.avg_col_size;
    }
  }
  int64_t w = fixed_type_width(type);
  return w > 0 ? static_cast<double>(w) : 10.0;
}

// ---------------------------------------------------------------------------
// Hint propagation (also the single implementation of row estimation)
// ---------------------------------------------------------------------------

double annotate_rec(RelationNode& node, const Catalog& catalog, const SelectivityModel& model) {
  std::vector<double> child_rows;
  for (auto& c : node.children) child_rows.push_back(annotate_rec(c, catalog, model));

  double rows = 0.0;
  switch (node.kind) {
    case RelKind::TableScan: {
      const TableDef* t = catalog.find_table(node.table_name);
      rows = t ? static_cast<double>(t->stats.num_rows) : 0.0;
      break;
    }
    case RelKind::Filter: {
      const Expr& pred = node.exprs[0];
      if (pred.is_literal_bool(false) || pred.is_null_literal()) {
        rows = 0.0;  // contradiction: empty relation
      } else {
        rows = child_rows[0] * estimate_selectivity(pred, input_stats(node, catalog), model);
      }
      break;
    }
    case RelKind::Project: rows = child_rows[0]; break;
    case RelKind::Join: {
      double sel = estimate_selectivity(node.exprs[0], input_stats(node, catalog), model);
      rows = child_rows[0] * child_rows[1] * sel;
      break;
    }
    case RelKind::Aggregate: {
      int g = aggregate_group_count(node);
      if (g == 0) {
        rows = 1.0;  // global aggregate always yields one row
      } else {
        auto stats = input_stats(node, catalog);
        double ndv_product = 1.0;
        for (int k = 0; k < g; ++k) {
          const Expr& key = node.exprs[static_cast<size_t>(k)];
          double ndv = child_rows[0];
          if (key.kind == Expr::Kind::FieldRef) {
            const ColumnStatsView& v = stats[static_cast<size_t>(key.field_index)];
            if (v.known) ndv = static_cast<double>(std::max<int64_t>(1, v.ndv));
          }
          ndv_product *= ndv;
          if (ndv_product > child_rows[0]) break;  // already capped
        }
        rows = std::min(child_rows[0], ndv_product);
      }
      break;
    }
    case RelKind::Sort: rows = child_rows[0]; break;
    case RelKind::Limit: {
      double cap = static_cast<double>(std::get<int64_t>(node.exprs[0].literal_value));
      rows = std::min(child_rows[0], cap);
      break;
    }
  }

  double width = 0.0;
  if (node.kind == RelKind::TableScan) {
    const TableDef* t = catalog.find_table(node.table_name);
    width = t ? t->stats.avg_row_size : 1.0;
  } else {
    auto origins = column_origins(node, catalog);
    for (size_t i = 0; i < node.output_schema.size(); ++i) {
      width += column_width(origins[i], node.output_schema[i].type, catalog);
    }
  }
  if (width <= 0) width = 1.0;

  node.hints = PlanHints{rows, width};
  return rows;
}

}  // namespace

double estimate_plan_rows(const RelationNode& node, const Catalog& catalog,
                          const SelectivityModel& model) {
  RelationNode copy = node;
  return annotate_rec(copy, catalog, model);
}

LogicalPlan annotate_hints(const LogicalPlan& plan, const Catalog& catalog) {
  LogicalPlan out = plan;
  annotate_rec(out.root, catalog, SelectivityModel{});
  expect_valid(out, catalog, "annotate_hints");
  return out;
}

// ---------------------------------------------------------------------------
// Trimming
// ---------------------------------------------------------------------------

namespace {

std::vector<int32_t> sorted_unique(std::vector<int32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// `needed` lists output ordinals to keep, in the order the parent wants them.
RelationNode trim_rec(const RelationNode& n, const std::vector<int32_t>& needed,
                      const Catalog& catalog) {
  // intrinsic targets the kept outputs point at
  std::vector<int32_t> targets;
  targets.reserve(needed.size());
  for (int32_t i : needed) targets.push_back(n.emit[static_cast<size_t>(i)]);

  RelationNode out;
  out.id = n.id;
  out.kind = n.kind;
  out.table_name = n.table_name;
  out.hints = n.hints;

  switch (n.kind) {
    case RelKind::TableScan: {
      out.emit = targets;
      return out;
    }
    case RelKind::Filter:
    case RelKind::Sort:
    case RelKind::Limit: {
      std::vector<int32_t> refs = targets;
      for (const auto& e : n.exprs) collect_field_refs(e, refs);
      std::vector<int32_t> child_needed = sorted_unique(refs);
      std::vector<int32_t> remap(n.children[0].output_schema.size(), -1);
      for (size_t i = 0; i < child_needed.size(); ++i) {
        remap[static_cast<size_t>(child_needed[i])] = static_cast<int32_t>(i);
      }
      out.children.push_back(trim_rec(n.children[0], child_needed, catalog));
      for (const auto& e : n.exprs) out.exprs.push_back(remap_field_refs(e, remap));
      for (int32_t t : targets) out.emit.push_back(remap[static_cast<size_t>(t)]);
      return out;
    }
    case RelKind::Project: {
      size_t cw = n.children[0].output_schema.size();
      std::vector<int32_t> kept_exprs;  // indices into n.exprs
      std::vector<int32_t> child_refs;
      for (int32_t t : targets) {
        if (t < static_cast<int32_t>(cw)) {
          child_refs.push_back(t);
        } else {
          int32_t xi = t - static_cast<int32_t>(cw);
          if (std::find(kept_exprs.begin(), kept_exprs.end(), xi) == kept_exprs.end()) {
            kept_exprs.push_back(xi);
          }
        }
      }
      std::sort(kept_exprs.begin(), kept_exprs.end());
      for (int32_t xi : kept_exprs) collect_field_refs(n.exprs[static_cast<size_t>(xi)], child_refs);
      std::vector<int32_t> child_needed = sorted_unique(child_refs);
      std::vector<int32_t> remap(cw, -1);
      for (size_t i = 0; i < child_needed.size(); ++i) {
        remap[static_cast<size_t>(child_needed[i])] = static_cast<int32_t>(i);
      }
      out.children.push_back(trim_rec(n.children[0], child_needed, catalog));
      for (int32_t xi : kept_exprs) {
        out.exprs.push_back(remap_field_refs(n.exprs[static_cast<size_t>(xi)], remap));
      }
      size_t cw2 = child_needed.size();
      for (int32_t t : targets) {
        if (t < static_cast<int32_t>(cw)) {
          out.emit.push_back(remap[static_cast<size_t>(t)]);
        } else {
          int32_t xi = t - static_cast<int32_t>(cw);
          auto it = std::find(kept_exprs.begin(), kept_exprs.end(), xi);
          out.emit.push_back(static_cast<int32_t>(cw2) +
                             static_cast<int32_t>(it - kept_exprs.begin()));
        }
      }
      return out;
    }
    case RelKind::Join: {
      size_t lw = n.children[0].output_schema.size();
      std::vector<int32_t> refs = targets;
      collect_field_refs(n.exprs[0], refs);
      std::vector<int32_t> left_needed, right_needed;
      for (int32_t r : sorted_unique(refs)) {
        if (r < static_cast<int32_t>(lw)) left_needed.push_back(r);
        else right_needed.push_back(r - static_cast<int32_t>(lw));
      }
      std::vector<int32_t> remap(lw + n.children[1].output_schema.size(), -1);
      for (size_t i = 0; i < left_needed.size(); ++i) {
        remap[static_cast<size_t>(left_needed[i])] = static_cast<int32_t>(i);
      }
      for (size_t i = 0; i < right_needed.size(); ++i) {
        remap[static_cast<size_t>(right_needed[i]) + lw] =
            static_cast<int32_t>(left_needed.size() + i);
      }
      out.children.push_back(trim_rec(n.children[0], left_needed, catalog));
      out.children.push_back(trim_rec(n.children[1], right_needed, catalog));
      out.exprs.push_back(remap_field_refs(n.exprs[0], remap));
      for (int32_t t : targets) out.emit.push_back(remap[static_cast<size_t>(t)]);
      return out;
    }
    case RelKind::Aggregate: {
      int g = aggregate_group_count(n);
      // all group keys stay; unused aggregate outputs are dropped
      std::vector<int32_t> kept_aggs;
      for (int32_t t : targets) {
        if (t >= g) {
          int32_t ai = t - g;
          if (std::find(kept_aggs.begin(), kept_aggs.end(), ai) == kept_aggs.end()) {
            kept_aggs.push_back(ai);
          }
        }
      }
      std::sort(kept_aggs.begin(), kept_aggs.end());
      std::vector<int32_t> child_refs;
      for (int k = 0; k < g; ++k) collect_field_refs(n.exprs[static_cast<size_t>(k)], child_refs);
      for (int32_t ai : kept_aggs) {
        collect_field_refs(n.exprs[static_cast<size_t>(g + ai)], child_refs);
      }
      std::vector<int32_t> child_needed = sorted_unique(child_refs);
      std::vector<int32_t> remap(n.children[0].output_schema.size(), -1);
      for (size_t i = 0; i < child_needed.size(); ++i) {
        remap[static_cast<size_t>(child_needed[i])] = static_cast<int32_t>(i);
      }
      out.children.push_back(trim_rec(n.children[0], child_needed, catalog));
      for (int k = 0; k < g; ++k) {
        out.exprs.push_back(remap_field_refs(n.exprs[static_cast<size_t>(k)], remap));
      }
      for (int32_t ai : kept_aggs) {
        out.exprs.push_back(remap_field_refs(n.exprs[static_cast<size_t>(g + ai)], remap));
      }
      for (int32_t t : targets) {
        if (t < g) {
          out.emit.push_back(t);
        } else {
          auto it = std::find(kept_aggs.begin(), kept_aggs.end(), t - g);
          out.emit.push_back(g + static_cast<int32_t>(it - kept_aggs.begin()));
        }
      }
      return out;
    }
  }
  return out;
}

}  // namespace

LogicalPlan trim_plan(const LogicalPlan& plan, const Catalog& catalog) {
  std::vector<int32_t> all;
  for (size_t i = 0; i < plan.root.output_schema.size(); ++i) {
    all.push_back(static_cast<int32_t>(i));
  }
  LogicalPlan out;
  out.root = trim_rec(plan.root, all, catalog);
  bool had_hints = plan_has_hints(plan.root);
  recompute_schemas(out.root, catalog);
  renumber_plan(out);
  if (had_hints) out = annotate_hints(out, catalog);
  expect_valid(out, catalog, "trim_plan");
  return out;
}

// ---------------------------------------------------------------------------
// Predicate pushdown and plan simplification
// ---------------------------------------------------------------------------

namespace {

void flatten_and_exprs(const Expr& e, std::vector<Expr>& out) {
  if (e.kind == Expr::Kind::Operation && e.op_name == "and") {
    flatten_and_exprs(e.args[0], out);
    flatten_and_exprs(e.args[1], out);
  } else {
    out.push_back(e);
  }
}

Expr and_fold(const std::vector<Expr>& conjuncts) {
  if (conjuncts.empty()) return Expr::boolean(true);
  Expr out = conjuncts[0];
  for (size_t i = 1; i < conjuncts.size(); ++i) {
    out = Expr::op("and", {std::move(out), conjuncts[i]});
  }
  return out;
}

bool is_contradiction(const Expr& e) {
  return e.is_literal_bool(false) || (e.kind == Expr::Kind::Literal && is_null(e.literal_value) &&
                                      e.literal_type == DataType::Boolean);
}

// substitute FieldRef(i) with table[i]
Expr subst_field_exprs(const Expr& e, const std::vector<Expr>& table) {
  if (e.kind == Expr::Kind::FieldRef) return table[static_cast<size_t>(e.field_index)];
  if (e.kind == Expr::Kind::Operation) {
    Expr out = e;
    for (auto& a : out.args) a = subst_field_exprs(a, table);
    return out;
  }
  return e;
}

struct Pusher {
  const Catalog& catalog;

  static void identity_emit_for(RelationNode& n, size_t width) {
    n.emit.clear();
    for (size_t i = 0; i < width; ++i) n.emit.push_back(static_cast<int32_t>(i));
  }

  // wrap `node` (whose emit/output stands) with the residual conjuncts
  RelationNode wrap(RelationNode node, std::vector<Expr> conjuncts) const {
    std::vector<Expr> kept;
    for (auto& c : conjuncts) {
      if (c.is_literal_bool(true)) continue;
      if (is_contradiction(c)) {
        kept.clear();
        kept.push_back(Expr::boolean(false));
        break;
      }
      kept.push_back(std::move(c));
    }
    if (kept.empty()) return node;
    RelationNode f;
    f.kind = RelKind::Filter;
    f.output_schema = node.output_schema;
    size_t width = node.output_schema.size();
    f.children.push_back(std::move(node));
    f.exprs.push_back(and_fold(kept));
    identity_emit_for(f, width);
    return f;
  }

  // re-apply a dissolved node's emit with a bare Project when not identity
  RelationNode apply_emit(RelationNode inner, const std::vector<int32_t>& emit) const {
    bool identity = emit.size() == inner.output_schema.size();
    for (size_t i = 0; identity && i < emit.size(); ++i) {
      identity = emit[i] == static_cast<int32_t>(i);
    }
    if (identity) return inner;
    RelationNode p;
    p.kind = RelKind::Project;
    for (int32_t e : emit) p.output_schema.push_back(inner.output_schema[static_cast<size_t>(e)]);
    p.children.push_back(std::move(inner));
    p.emit = emit;
    return p;
  }

  static std::vector<int32_t> emit_mapping(const RelationNode& n) { return n.emit; }

  // `incoming` conjuncts are in n's OUTPUT space
  RelationNode push(const RelationNode& n, std::vector<Expr> incoming) const {
    // a contradiction above this subtree empties it outright
    for (const auto& c : incoming) {
      if (is_contradiction(c)) {
        RelationNode inner = push(n, {});
        return wrap(std::move(inner), {Expr::boolean(false)});
      }
    }

    switch (n.kind) {
      case RelKind::TableScan: {
        RelationNode scan = n;
        return wrap(std::move(scan), std::move(incoming));
      }

      case RelKind::Filter: {
        std::vector<Expr> all;
        for (const auto& c : incoming) {
          all.push_back(remap_field_refs(c, emit_mapping(n)));  // into child space
        }
        std::vector<Expr> own;
        flatten_and_exprs(simplify_expr(n.exprs[0]), own);
        all.insert(all.end(), own.begin(), own.end());
        RelationNode inner = push(n.children[0], std::move(all));
        return apply_emit(std::move(inner), n.emit);
      }

      case RelKind::Project: {
        size_t cw = n.children[0].output_schema.size();
        std::vector<Expr> sub_table;
        for (size_t i = 0; i < cw; ++i) sub_table.push_back(Expr::field(static_cast<int32_t>(i)));
        for (const auto& e : n.exprs) sub_table.push_back(simplify_expr(e));

        std::vector<Expr> down;
        for (const auto& c : incoming) {
          Expr intrinsic = remap_field_refs(c, emit_mapping(n));
          down.push_back(simplify_expr(subst_field_exprs(intrinsic, sub_table)));
        }
        RelationNode out = n;
        for (auto& e : out.exprs) e = simplify_expr(e);
        out.children[0] = push(n.children[0], std::move(down));
        return merge_projects(std::move(out));
      }

      case RelKind::Join: {
        size_t lw = n.children[0].output_schema.size();
        size_t rw = n.children[1].output_schema.size();
        std::vector<Expr> conjuncts;
        for (const auto& c : incoming) conjuncts.push_back(remap_field_refs(c, emit_mapping(n)));
        flatten_and_exprs(simplify_expr(n.exprs[0]), conjuncts);

        std::vector<Expr> left_list, right_list, stays;
        for (auto& c : conjuncts) {
          c = simplify_expr(c);
          if (c.is_literal_bool(true)) continue;
          if (is_contradiction(c)) {
            stays.clear();
            stays.push_back(Expr::boolean(false));
            left_list.clear();
            right_list.clear();
            break;
          }
          std::vector<int32_t> refs;
          collect_field_refs(c, refs);
          bool left_only = true, right_only = true;
          for (int32_t r : refs) {
            if (r >= static_cast<int32_t>(lw)) left_only = false;
            else right_only = false;
          }
          if (refs.empty()) {
            stays.push_back(c);  // non-foldable constant
          } else if (left_only) {
            left_list.push_back(c);
          } else if (right_only) {
            std::vector<int32_t> remap(lw + rw);
            for (size_t i = 0; i < lw + rw; ++i) {
              remap[i] = static_cast<int32_t>(i) - static_cast<int32_t>(lw);
            }
            right_list.push_back(remap_field_refs(c, remap));
          } else {
            stays.push_back(c);
          }
        }

        RelationNode out = n;
        out.children[0] = push(n.children[0], std::move(left_list));
        out.children[1] = push(n.children[1], std::move(right_list));
        out.exprs[0] = and_fold(stays);
        return out;
      }

      case RelKind::Aggregate: {
        int g = aggregate_group_count(n);
        std::vector<Expr> key_table;
        for (int k = 0; k < g; ++k) key_table.push_back(n.exprs[static_cast<size_t>(k)]);

        std::vector<Expr> down, stays;
        for (const auto& c : incoming) {
          Expr intrinsic = remap_field_refs(c, emit_mapping(n));
          std::vector<int32_t> refs;
          collect_field_refs(intrinsic, refs);
          bool keys_only = true;
          for (int32_t r : refs) {
            if (r >= g) keys_only = false;
          }
          if (keys_only && !refs.empty()) {
            down.push_back(subst_field_exprs(intrinsic, key_table));
          } else {
            stays.push_back(c);
          }
        }
        RelationNode out = n;
        for (auto& e : out.exprs) e = simplify_expr(e);
        out.children[0] = push(n.children[0], std::move(down));
        return wrap(std::move(out), std::move(stays));
      }

      case RelKind::Sort: {
        std::vector<Expr> down;
        for (const auto& c : incoming) down.push_back(remap_field_refs(c, emit_mapping(n)));
        RelationNode out = n;
        out.children[0] = push(n.children[0], std::move(down));
        return out;
      }

      case RelKind::Limit: {
        RelationNode out = n;
        out.children[0] = push(n.children[0], {});
        return wrap(std::move(out), std::move(incoming));
      }
    }
    throw Error("push: unreachable");
  }

  // fuse Project over Project into one node
  RelationNode merge_projects(RelationNode p) const {
    if (p.children[0].kind != RelKind::Project) return p;
    RelationNode c = std::move(p.children[0]);
    size_t ccw = c.children[0].output_schema.size();

    // child's output column i as an expression over the grandchild
    auto expand = [&](int32_t i) -> Expr {
      int32_t t = c.emit[static_cast<size_t>(i)];
      if (t < static_cast<int32_t>(ccw)) return Expr::field(t);
      return c.exprs[static_cast<size_t>(t) - ccw];
    };

    size_t pw = c.emit.size();  // parent's child width
    std::vector<Expr> expand_table;
    for (size_t i = 0; i < pw; ++i) expand_table.push_back(expand(static_cast<int32_t>(i)));

    RelationNode merged;
    merged.kind = RelKind::Project;
    merged.id = p.id;
    merged.hints = p.hints;
    merged.output_schema = p.output_schema;
    merged.children.push_back(std::move(c.children[0]));

    std::vector<Expr> new_exprs;
    auto expr_slot = [&](const Expr& e) -> int32_t {
      if (e.kind == Expr::Kind::FieldRef) return e.field_index;
      for (size_t i = 0; i < new_exprs.size(); ++i) {
        if (exprs_equal(new_exprs[i], e)) return static_cast<int32_t>(ccw + i);
      }
      new_exprs.push_back(e);
      return static_cast<int32_t>(ccw + new_exprs.size() - 1);
    };

    for (int32_t t : p.emit) {
      Expr source = t < static_cast<int32_t>(pw)
                        ? expand_table[static_cast<size_t>(t)]
                        : subst_field_exprs(p.exprs[static_cast<size_t>(t) - pw], expand_table);
      merged.emit.push_back(expr_slot(simplify_expr(source)));
    }
    merged.exprs = std::move(new_exprs);
    return merged;
  }
};

}  // namespace

LogicalPlan pushdown_and_simplify(const LogicalPlan& plan, const Catalog& catalog) {
  Pusher pusher{catalog};
  LogicalPlan out;
  bool had_hints = plan_has_hints(plan.root);
  out.root = pusher.push(plan.root, {});
  recompute_schemas(out.root, catalog);
  renumber_plan(out);
  if (had_hints) out = annotate_hints(out, catalog);
  expect_valid(out, catalog, "pushdown_and_simplify");
  return out;
}

// ---------------------------------------------------------------------------
// Greedy bushy join ordering
// ---------------------------------------------------------------------------

namespace {

struct JoinRegion {
  std::vector<RelationNode> inputs;          // non-Join subtrees, left to right
  std::vector<Expr> pool;                    // conjuncts over global column ids
  std::vector<int32_t> root_output_gids;     // per original root output column
  int next_gid = 0;
};

struct Orderer {
  const Catalog& catalog;
  SelectivityModel model;

  // returns per-output-column global ids of `node` within the region
  std::vector<int32_t> collect(const RelationNode& node, JoinRegion& region) const {
    if (node.kind == RelKind::Join) {
      std::vector<int32_t> gids = collect(node.children[0], region);
      std::vector<int32_t> right = collect(node.children[1], region);
      gids.insert(gids.end(), right.begin(), right.end());

      std::vector<Expr> conjuncts;
      flatten_and_exprs(simplify_expr(node.exprs[0]), conjuncts);
      for (auto& c : conjuncts) {
        if (c.is_literal_bool(true)) continue;
        region.pool.push_back(remap_field_refs(c, gids));
      }
      std::vector<int32_t> out;
      for (int32_t e : node.emit) out.push_back(gids[static_cast<size_t>(e)]);
      return out;
    }
    RelationNode input = order_rec(node);  // nested regions inside the input
    std::vector<int32_t> out;
    for (size_t i = 0; i < input.output_schema.size(); ++i) {
      out.push_back(region.next_gid + static_cast<int32_t>(i));
    }
    region.next_gid += static_cast<int32_t>(input.output_schema.size());
    region.inputs.push_back(std::move(input));
    return out;
  }

  struct Entry {
    RelationNode node;
    std::vector<int32_t> gids;
    double rows = 0.0;
    uint64_t order_key = 0;  // subtree fingerprint; id-stable tie break
  };

  static uint64_t entry_key(const RelationNode& n) {
    LogicalPlan p;
    p.root = n;
    return plan_fingerprint(p);
  }

  RelationNode order_rec(const RelationNode& node) const {
    if (node.kind != RelKind::Join) {
      RelationNode out = node;
      for (auto& c : out.children) c = order_rec(c);
      return out;
    }

    JoinRegion region;
    region.root_output_gids = collect(node, region);

    // per-gid statistics for selectivity estimation
    std::vector<ColumnStatsView> gid_stats;
    for (const auto& input : region.inputs) {
      for (const auto& origin : column_origins(input, catalog)) {
        gid_stats.push_back(view_of(origin, catalog));
      }
    }

    std::vector<Entry> entries;
    {
      int32_t gid = 0;
      for (const auto& input : region.inputs) {
        Entry e;
        e.rows = estimate_plan_rows(input, catalog, model);
        e.node = input;
        e.order_key = entry_key(e.node);
        for (size_t i = 0; i < e.node.output_schema.size(); ++i) e.gids.push_back(gid++);
        entries.push_back(std::move(e));
      }
    }

    struct PoolPred {
      Expr expr;
      std::vector<int32_t> refs;
      bool used = false;
    };
    std::vector<PoolPred> pool;
    for (const auto& p : region.pool) {
      PoolPred pp;
      pp.expr = p;
      collect_field_refs(p, pp.refs);
      pool.push_back(std::move(pp));
    }

    auto applicable = [&](const std::set<int32_t>& gids) {
      std::vector<size_t> out;
      for (size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].used) continue;
        bool all_in = true;
        for (int32_t r : pool[i].refs) {
          if (!gids.count(r)) all_in = false;
        }
        if (all_in && !pool[i].refs.empty()) out.push_back(i);
      }
      return out;
    };

    while (entries.size() > 1) {
      struct Candidate {
        size_t i, j;
        double est;
        std::vector<size_t> preds;
        size_t width;
        std::pair<uint64_t, uint64_t> key;
      };
      std::vector<Candidate> connected, all_pairs;

      for (size_t i = 0; i < entries.size(); ++i) {
        for (size_t j = i + 1; j < entries.size(); ++j) {
          std::set<int32_t> combined(entries[i].gids.begin(), entries[i].gids.end());
          combined.insert(entries[j].gids.begin(), entries[j].gids.end());
          Candidate c;
          c.i = i;
          c.j = j;
          c.preds = applicable(combined);
          double sel = 1.0;
          for (size_t pi : c.preds) {
            // selectivity evaluated in global-gid space
            sel *= estimate_selectivity(pool[pi].expr, gid_stats, model);
          }
          c.est = entries[i].rows * entries[j].rows * sel;
          c.width = entries[i].gids.size() + entries[j].gids.size();
          uint64_t a = entries[i].order_key, b = entries[j].order_key;
          c.key = {std::min(a, b), std::max(a, b)};
          (c.preds.empty() ? all_pairs : connected).push_back(std::move(c));
        }
      }

      std::vector<Candidate>& candidates = connected.empty() ? all_pairs : connected;
      auto better = [](const Candidate& a, const Candidate& b) {
        if (a.est != b.est) return a.est < b.est;
        if (a.width != b.width) return a.width < b.width;
        return a.key < b.key;
      };
      size_t best = 0;
      for (size_t k = 1; k < candidates.size(); ++k) {
        if (better(candidates[k], candidates[best])) best = k;
      }
      // greedy invariant: the chosen pair's estimate is minimal
      for (const auto& c : candidates) {
        if (c.est < candidates[best].est) throw Error("order_joins: greedy minimum violated");
      }

      Candidate chosen = candidates[best];
      Entry& a = entries[chosen.i];
      Entry& b = entries[chosen.j];

      std::vector<int32_t> combined_gids = a.gids;
      combined_gids.insert(combined_gids.end(), b.gids.begin(), b.gids.end());
      std::vector<int32_t> gid_to_local(static_cast<size_t>(region.next_gid), -1);
      for (size_t i = 0; i < combined_gids.size(); ++i) {
        gid_to_local[static_cast<size_t>(combined_gids[i])] = static_cast<int32_t>(i);
      }

      std::vector<Expr> cond;
      for (size_t pi : chosen.preds) {
        cond.push_back(remap_field_refs(pool[pi].expr, gid_to_local));
        pool[pi].used = true;
      }

      RelationNode join;
      join.kind = RelKind::Join;
      join.output_schema = a.node.output_schema;
      join.output_schema.insert(join.output_schema.end(), b.node.output_schema.begin(),
                                b.node.output_schema.end());
      join.children.push_back(std::move(a.node));
      join.children.push_back(std::move(b.node));
      join.exprs.push_back(cond.empty() ? Expr::boolean(true) : and_fold(cond));
      for (size_t i = 0; i < combined_gids.size(); ++i) {
        join.emit.push_back(static_cast<int32_t>(i));
      }

      Entry merged;
      merged.rows = chosen.est;
      merged.gids = std::move(combined_gids);
      merged.node = std::move(join);
      merged.order_key = entry_key(merged.node);

      entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(chosen.j));
      entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(chosen.i));
      entries.push_back(std::move(merged));
    }

    // leftover pool predicates (none should remain: every pred's refs are in
    // the final entry) — fold any stragglers into the top condition
    RelationNode top = std::move(entries[0].node);
    std::vector<int32_t> gid_to_local(static_cast<size_t>(region.next_gid), -1);
    for (size_t i = 0; i < entries[0].gids.size(); ++i) {
      gid_to_local[static_cast<size_t>(entries[0].gids[i])] = static_cast<int32_t>(i);
    }
    for (auto& p : pool) {
      if (!p.used) {
        if (top.kind != RelKind::Join) throw Error("order_joins: dangling pool predicate");
        top.exprs[0] = simplify_expr(
            Expr::op("and", {top.exprs[0], remap_field_refs(p.expr, gid_to_local)}));
        p.used = true;
      }
    }

    // restore the original output column order (and any root narrowing)
    if (top.kind != RelKind::Join) throw Error("order_joins: region collapsed unexpectedly");
    std::vector<SchemaColumn> intrinsic = top.output_schema;
    top.emit.clear();
    top.output_schema.clear();
    for (int32_t g : region.root_output_gids) {
      int32_t local = gid_to_local[static_cast<size_t>(g)];
      top.emit.push_back(local);
      top.output_schema.push_back(intrinsic[static_cast<size_t>(local)]);
    }
    return top;
  }
};

}  // namespace

LogicalPlan order_joins(const LogicalPlan& plan, const Catalog& catalog) {
  Orderer orderer{catalog, SelectivityModel{}};
  LogicalPlan out;
  bool had_hints = plan_has_hints(plan.root);
  out.root = orderer.order_rec(plan.root);
  recompute_schemas(out.root, catalog);
  renumber_plan(out);
  if (had_hints) out = annotate_hints(out, catalog);
  expect_valid(out, catalog, "order_joins");
  return out;
}

LogicalPlan optimize(const LogicalPlan& plan, const Catalog& catalog) {
  LogicalPlan p = trim_plan(plan, catalog);
  p = pushdown_and_simplify(p, catalog);
  p = order_joins(p, catalog);
  p = annotate_hints(p, catalog);
  renumber_plan(p);
  expect_valid(p, catalog, "optimize");
  return p;
}

}  // namespace xeo
