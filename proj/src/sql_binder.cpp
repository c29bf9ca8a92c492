#include <algorithm>
#include <set>

#include "xeo/sql.hpp"

namespace xeo {

namespace {

using sql::AstExpr;
using sql::ColumnRef;
using sql::SelectStmt;

[[noreturn]] void bind_error(const std::string& msg, int line, int col) {
  throw BindError(msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")");
}

struct Binder {
  const Catalog& catalog;

  int resolve(const ColumnRef& ref, const std::vector<SchemaColumn>& scope) const {
    if (!ref.table.empty()) {
      std::string want = ref.table + "." + ref.column;
      for (size_t i = 0; i < scope.size(); ++i) {
        if (scope[i].name == want) return static_cast<int>(i);
      }
      bind_error("unknown column " + ref.display(), ref.line, ref.col);
    }
    std::string suffix = "." + ref.column;
    int found = -1;
    for (size_t i = 0; i < scope.size(); ++i) {
      const std::string& n = scope[i].name;
      if (n.size() > suffix.size() && n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0) {
        if (found >= 0) bind_error("ambiguous column " + ref.column, ref.line, ref.col);
        found = static_cast<int>(i);
      }
    }
    if (found < 0) bind_error("unknown column " + ref.column, ref.line, ref.col);
    return found;
  }

  // Integer literals compared against float/decimal columns are widened and
  // flagged as casted; everything else must type-check as written.
  void adjust_literal_casts(Expr& op_expr, const std::vector<SchemaColumn>& scope) const {
    if (op_expr.kind != Expr::Kind::Operation) return;
    const OpSignature* sig = find_op(op_expr.op_name);
    if (!sig || sig->category != OpCategory::Comparison) return;
    DataType anchor = DataType::Integer;
    bool have_anchor = false;
    for (const auto& a : op_expr.args) {
      if (a.kind != Expr::Kind::Literal) {
        anchor = infer_expr_type(a, scope);
        have_anchor = true;
        break;
      }
    }
    if (!have_anchor) return;
    if (anchor != DataType::Float && anchor != DataType::Decimal) return;
    for (auto& a : op_expr.args) {
      if (a.kind == Expr::Kind::Literal && a.literal_type == DataType::Integer &&
          !is_null(a.literal_value)) {
        a.literal_value = static_cast<double>(std::get<int64_t>(a.literal_value));
        a.literal_type = anchor;
        a.is_casted = true;
      }
    }
  }

  Expr bind_scalar(const AstExpr& e, const std::vector<SchemaColumn>& scope) const {
    switch (e.kind) {
      case AstExpr::Kind::Column:
        return Expr::field(resolve(e.column, scope));
      case AstExpr::Kind::Literal:
        return Expr::literal(e.literal_type, e.literal_value);
      case AstExpr::Kind::Binary:
      case AstExpr::Kind::Unary:
      case AstExpr::Kind::Between:
      case AstExpr::Kind::InList: {
        std::vector<Expr> args;
        args.reserve(e.args.size());
        for (const auto& a : e.args) args.push_back(bind_scalar(a, scope));
        std::string name = e.kind == AstExpr::Kind::Between ? "between"
                           : e.kind == AstExpr::Kind::InList ? "in"
                                                             : e.op;
        Expr out = Expr::op(name, std::move(args));
        adjust_literal_casts(out, scope);
        try {
          infer_expr_type(out, scope);
        } catch (const ValidationError& err) {
          bind_error(err.what(), e.line, e.col);
        }
        return out;
      }
      case AstExpr::Kind::FuncCall: {
        if (is_aggregate_op(e.op)) {
          bind_error("aggregate " + e.op + " is not allowed here", e.line, e.col);
        }
        std::vector<Expr> args;
        for (const auto& a : e.args) args.push_back(bind_scalar(a, scope));
        Expr out = Expr::op(e.op, std::move(args));
        try {
          infer_expr_type(out, scope);
        } catch (const ValidationError& err) {
          bind_error(err.what(), e.line, e.col);
        }
        return out;
      }
      case AstExpr::Kind::InSubquery:
      case AstExpr::Kind::Exists:
        bind_error("subqueries are only supported as top-level WHERE conjuncts", e.line, e.col);
    }
    throw BindError("malformed expression");
  }

  RelationNode make_scan(const std::string& table, int line, int col) const {
    const TableDef* t = catalog.find_table(table);
    if (!t) bind_error("unknown table " + table, line, col);
    RelationNode scan;
    scan.kind = RelKind::TableScan;
    scan.table_name = table;
    for (size_t i = 0; i < t->columns.size(); ++i) {
      scan.emit.push_back(static_cast<int32_t>(i));
      scan.output_schema.push_back({table + "." + t->columns[i].name, t->columns[i].type});
    }
    return scan;
  }

  static void identity_emit(RelationNode& n, const std::vector<SchemaColumn>& intrinsic) {
    n.emit.clear();
    n.output_schema.clear();
    for (size_t i = 0; i < intrinsic.size(); ++i) {
      n.emit.push_back(static_cast<int32_t>(i));
      n.output_schema.push_back(intrinsic[i]);
    }
  }

  RelationNode wrap_filter(RelationNode child, Expr pred) const {
    RelationNode f;
    f.kind = RelKind::Filter;
    std::vector<SchemaColumn> out = child.output_schema;
    f.children.push_back(std::move(child));
    f.exprs.push_back(std::move(pred));
    identity_emit(f, out);
    return f;
  }

  // x IN (SELECT k ...) becomes a join against the deduplicated inner keys,
  // preserving outer multiset semantics.
  RelationNode rewrite_in_subquery(RelationNode outer, const AstExpr& e) const {
    Expr probe = bind_scalar(e.args[0], outer.output_schema);
    LogicalPlan inner = bind(*e.subquery, catalog);
    if (inner.root.output_schema.size() != 1) {
      bind_error("IN subquery must produce exactly one column", e.line, e.col);
    }

    RelationNode dedup;
    dedup.kind = RelKind::Aggregate;
    std::vector<SchemaColumn> inner_out = inner.root.output_schema;
    dedup.children.push_back(std::move(inner.root));
    dedup.exprs.push_back(Expr::field(0));
    identity_emit(dedup, inner_out);

    size_t outer_width = outer.output_schema.size();
    DataType probe_type = infer_expr_type(probe, outer.output_schema);
    DataType key_type = inner_out[0].type;
    if (probe_type != key_type && !(is_numeric(probe_type) && is_numeric(key_type))) {
      bind_error("IN subquery type mismatch: " + std::string(to_string(probe_type)) + " vs " +
                     to_string(key_type),
                 e.line, e.col);
    }

    RelationNode join;
    join.kind = RelKind::Join;
    std::vector<SchemaColumn> combined = outer.output_schema;
    combined.insert(combined.end(), inner_out.begin(), inner_out.end());
    join.children.push_back(std::move(outer));
    join.children.push_back(std::move(dedup));
    join.exprs.push_back(
        Expr::op("eq", {std::move(probe), Expr::field(static_cast<int32_t>(outer_width))}));
    identity_emit(join, combined);
    return join;
  }

  // EXISTS (SELECT ...) uncorrelated: cross join against LIMIT 1 of the inner
  // plan; zero or one row on the right keeps or empties the outer side.
  RelationNode rewrite_exists(RelationNode outer, const AstExpr& e) const {
    LogicalPlan inner = bind(*e.subquery, catalog);

    RelationNode limit;
    limit.kind = RelKind::Limit;
    std::vector<SchemaColumn> inner_out = inner.root.output_schema;
    limit.children.push_back(std::move(inner.root));
    limit.exprs.push_back(Expr::literal(DataType::Integer, static_cast<int64_t>(1)));
    limit.emit.push_back(0);
    limit.output_schema.push_back(inner_out[0]);

    std::vector<SchemaColumn> combined = outer.output_schema;
    combined.push_back(inner_out[0]);

    RelationNode join;
    join.kind = RelKind::Join;
    join.children.push_back(std::move(outer));
    join.children.push_back(std::move(limit));
    join.exprs.push_back(Expr::boolean(true));
    identity_emit(join, combined);
    return join;
  }

  static void flatten_conjuncts(const AstExpr& e, std::vector<const AstExpr*>& out) {
    if (e.kind == AstExpr::Kind::Binary && e.op == "and") {
      flatten_conjuncts(e.args[0], out);
      flatten_conjuncts(e.args[1], out);
    } else {
      out.push_back(&e);
    }
  }

  struct AggCall {
    std::string op;
    Expr arg;  // unused for count_star
    bool has_arg = false;
  };

  void collect_aggs(const AstExpr& e, const std::vector<SchemaColumn>& scope,
                    std::vector<AggCall>& out) const {
    if (e.kind == AstExpr::Kind::FuncCall && is_aggregate_op(e.op)) {
      AggCall call;
      call.op = e.op;
      if (!e.args.empty()) {
        call.arg = bind_scalar(e.args[0], scope);
        call.has_arg = true;
      }
      for (const auto& existing : out) {
        if (existing.op == call.op && existing.has_arg == call.has_arg &&
            (!call.has_arg || exprs_equal(existing.arg, call.arg))) {
          return;
        }
      }
      out.push_back(std::move(call));
      return;
    }
    for (const auto& a : e.args) collect_aggs(a, scope, out);
  }

  int find_agg(const std::vector<AggCall>& aggs, const AstExpr& e,
               const std::vector<SchemaColumn>& scope) const {
    AggCall want;
    want.op = e.op;
    if (!e.args.empty()) {
      want.arg = bind_scalar(e.args[0], scope);
      want.has_arg = true;
    }
    for (size_t i = 0; i < aggs.size(); ++i) {
      if (aggs[i].op == want.op && aggs[i].has_arg == want.has_arg &&
          (!want.has_arg || exprs_equal(aggs[i].arg, want.arg))) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  // Rewrites a HAVING predicate into the aggregate's output space.
  Expr bind_post_agg(const AstExpr& e, const std::vector<SchemaColumn>& pre_agg_scope,
                     const std::vector<int>& key_indices, const std::vector<AggCall>& aggs,
                     const std::vector<SchemaColumn>& agg_out) const {
    switch (e.kind) {
      case AstExpr::Kind::Column: {
        int idx = resolve(e.column, pre_agg_scope);
        for (size_t k = 0; k < key_indices.size(); ++k) {
          if (key_indices[k] == idx) return Expr::field(static_cast<int32_t>(k));
        }
        bind_error("column " + e.column.display() + " must appear in GROUP BY", e.line, e.col);
      }
      case AstExpr::Kind::Literal:
        return Expr::literal(e.literal_type, e.literal_value);
      case AstExpr::Kind::FuncCall: {
        if (is_aggregate_op(e.op)) {
          int idx = find_agg(aggs, e, pre_agg_scope);
          if (idx < 0) bind_error("internal: aggregate not collected", e.line, e.col);
          return Expr::field(static_cast<int32_t>(key_indices.size() + static_cast<size_t>(idx)));
        }
        bind_error(e.op + " is not supported after aggregation", e.line, e.col);
      }
      case AstExpr::Kind::Binary:
      case AstExpr::Kind::Unary:
      case AstExpr::Kind::Between:
      case AstExpr::Kind::InList: {
        std::vector<Expr> args;
        for (const auto& a : e.args) {
          args.push_back(bind_post_agg(a, pre_agg_scope, key_indices, aggs, agg_out));
        }
        std::string name = e.kind == AstExpr::Kind::Between ? "between"
                           : e.kind == AstExpr::Kind::InList ? "in"
                                                             : e.op;
        Expr out = Expr::op(name, std::move(args));
        adjust_literal_casts(out, agg_out);
        try {
          infer_expr_type(out, agg_out);
        } catch (const ValidationError& err) {
          bind_error(err.what(), e.line, e.col);
        }
        return out;
      }
      case AstExpr::Kind::InSubquery:
      case AstExpr::Kind::Exists:
        bind_error("subqueries are not supported in HAVING", e.line, e.col);
    }
    throw BindError("malformed expression");
  }

  LogicalPlan run(const SelectStmt& stmt) const {
    // FROM and textual-order joins
    std::set<std::string> seen_tables{stmt.from_table};
    RelationNode tree = make_scan(stmt.from_table, stmt.from_line, stmt.from_col);
    for (const auto& jc : stmt.joins) {
      if (!seen_tables.insert(jc.table).second) {
        bind_error("duplicate table " + jc.table + " (aliases are not supported)", jc.line, jc.col);
      }
      RelationNode rhs = make_scan(jc.table, jc.line, jc.col);
      std::vector<SchemaColumn> combined = tree.output_schema;
      combined.insert(combined.end(), rhs.output_schema.begin(), rhs.output_schema.end());
      Expr cond = bind_scalar(jc.condition, combined);
      RelationNode join;
      join.kind = RelKind::Join;
      join.children.push_back(std::move(tree));
      join.children.push_back(std::move(rhs));
      join.exprs.push_back(std::move(cond));
      identity_emit(join, combined);
      tree = std::move(join);
    }

    // WHERE: subquery conjuncts become joins in text order, the rest a Filter
    if (stmt.where) {
      std::vector<const AstExpr*> conjuncts;
      flatten_conjuncts(*stmt.where, conjuncts);
      std::vector<const AstExpr*> plain;
      for (const AstExpr* c : conjuncts) {
        if (c->kind == AstExpr::Kind::InSubquery) {
          tree = rewrite_in_subquery(std::move(tree), *c);
        } else if (c->kind == AstExpr::Kind::Exists) {
          tree = rewrite_exists(std::move(tree), *c);
        } else {
          plain.push_back(c);
        }
      }
      if (!plain.empty()) {
        Expr pred = bind_scalar(*plain[0], tree.output_schema);
        for (size_t i = 1; i < plain.size(); ++i) {
          pred = Expr::op("and", {std::move(pred), bind_scalar(*plain[i], tree.output_schema)});
        }
        tree = wrap_filter(std::move(tree), std::move(pred));
      }
    }

    // aggregation
    std::vector<AggCall> aggs;
    const std::vector<SchemaColumn> pre_agg_scope = tree.output_schema;
    for (const auto& item : stmt.select_items) collect_aggs(item, pre_agg_scope, aggs);
    if (stmt.having) collect_aggs(*stmt.having, pre_agg_scope, aggs);
    bool has_agg = !aggs.empty() || !stmt.group_by.empty();

    std::vector<int> key_indices;
    if (has_agg) {
      if (stmt.select_star) {
        throw BindError("SELECT * cannot be combined with aggregation");
      }
      for (const auto& g : stmt.group_by) key_indices.push_back(resolve(g, pre_agg_scope));

      RelationNode agg;
      agg.kind = RelKind::Aggregate;
      for (int k : key_indices) agg.exprs.push_back(Expr::field(k));
      for (const auto& call : aggs) {
        std::vector<Expr> args;
        if (call.has_arg) args.push_back(call.arg);
        agg.exprs.push_back(Expr::op(call.op, std::move(args)));
      }
      std::vector<SchemaColumn> agg_out;
      for (const auto& e : agg.exprs) {
        agg_out.push_back({expr_to_string(e, pre_agg_scope), infer_expr_type(e, pre_agg_scope)});
      }
      agg.children.push_back(std::move(tree));
      identity_emit(agg, agg_out);
      tree = std::move(agg);

      if (stmt.having) {
        Expr pred = bind_post_agg(*stmt.having, pre_agg_scope, key_indices, aggs,
                                  tree.output_schema);
        if (infer_expr_type(pred, tree.output_schema) != DataType::Boolean) {
          throw BindError("HAVING predicate is not boolean");
        }
        tree = wrap_filter(std::move(tree), std::move(pred));
      }
    } else if (stmt.having) {
      throw BindError("HAVING requires aggregation");
    }

    // ORDER BY / LIMIT
    if (!stmt.order_by.empty()) {
      RelationNode sort;
      sort.kind = RelKind::Sort;
      std::vector<SchemaColumn> out = tree.output_schema;
      for (const auto& key : stmt.order_by) {
        int idx;
        if (has_agg) {
          idx = -1;
          int resolved = resolve(key, pre_agg_scope);
          for (size_t k = 0; k < key_indices.size(); ++k) {
            if (key_indices[k] == resolved) idx = static_cast<int>(k);
          }
          if (idx < 0) {
            bind_error("ORDER BY column " + key.display() + " must appear in GROUP BY", key.line,
                       key.col);
          }
        } else {
          idx = resolve(key, out);
        }
        sort.exprs.push_back(Expr::field(idx));
      }
      sort.children.push_back(std::move(tree));
      identity_emit(sort, out);
      tree = std::move(sort);
    }
    if (stmt.limit) {
      if (*stmt.limit < 0) throw BindError("LIMIT must be non-negative");
      RelationNode limit;
      limit.kind = RelKind::Limit;
      std::vector<SchemaColumn> out = tree.output_schema;
      limit.children.push_back(std::move(tree));
      limit.exprs.push_back(Expr::literal(DataType::Integer, *stmt.limit));
      identity_emit(limit, out);
      tree = std::move(limit);
    }

    // final output: the root's emit picks the select list
    std::vector<int32_t> final_emit;
    if (stmt.select_star) {
      for (size_t i = 0; i < tree.output_schema.size(); ++i) {
        final_emit.push_back(static_cast<int32_t>(i));
      }
    } else if (has_agg) {
      for (const auto& item : stmt.select_items) {
        if (item.kind == AstExpr::Kind::Column) {
          int resolved = resolve(item.column, pre_agg_scope);
          int idx = -1;
          for (size_t k = 0; k < key_indices.size(); ++k) {
            if (key_indices[k] == resolved) idx = static_cast<int>(k);
          }
          if (idx < 0) {
            bind_error("column " + item.column.display() + " must appear in GROUP BY", item.line,
                       item.col);
          }
          final_emit.push_back(idx);
        } else if (item.kind == AstExpr::Kind::FuncCall && is_aggregate_op(item.op)) {
          int idx = find_agg(aggs, item, pre_agg_scope);
          final_emit.push_back(static_cast<int32_t>(key_indices.size() + static_cast<size_t>(idx)));
        } else {
          bind_error("select item must be a column or aggregate", item.line, item.col);
        }
      }
    } else {
      for (const auto& item : stmt.select_items) {
        if (item.kind != AstExpr::Kind::Column) {
          bind_error("select item must be a column outside aggregation", item.line, item.col);
        }
        final_emit.push_back(resolve(item.column, tree.output_schema));
      }
    }

    // The root's intrinsic schema is its child output (or table columns for a
    // bare scan); re-point emit through the existing identity emit list.
    std::vector<int32_t> mapped;
    for (int32_t i : final_emit) mapped.push_back(tree.emit[static_cast<size_t>(i)]);
    std::vector<SchemaColumn> final_schema;
    for (int32_t i : final_emit) {
      final_schema.push_back(tree.output_schema[static_cast<size_t>(i)]);
    }
    tree.emit = std::move(mapped);
    tree.output_schema = std::move(final_schema);

    LogicalPlan plan;
    plan.root = std::move(tree);
    renumber_plan(plan);
    expect_valid(plan, catalog, "bind");
    return plan;
  }
};

}  // namespace

LogicalPlan bind(const sql::SelectStmt& stmt, const Catalog& catalog) {
  return Binder{catalog}.run(stmt);
}

}  // namespace xeo
