#include "xeo/executor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace xeo {

namespace {

Value tri_not(const Value& v) {
  if (is_null(v)) return v;
  return Value{!std::get<bool>(v)};
}

Value tri_and(const Value& a, const Value& b) {
  bool af = !is_null(a) && !std::get<bool>(a);
  bool bf = !is_null(b) && !std::get<bool>(b);
  if (af || bf) return Value{false};
  if (is_null(a) || is_null(b)) return Value{std::monostate{}};
  return Value{true};
}

Value tri_or(const Value& a, const Value& b) {
  bool at = !is_null(a) && std::get<bool>(a);
  bool bt = !is_null(b) && std::get<bool>(b);
  if (at || bt) return Value{true};
  if (is_null(a) || is_null(b)) return Value{std::monostate{}};
  return Value{false};
}

Value compare_op(const std::string& op, const Value& a, const Value& b) {
  if (is_null(a) || is_null(b)) return Value{std::monostate{}};
  int c = compare_values(a, b);
  bool r;
  if (op == "eq") r = c == 0;
  else if (op == "neq") r = c != 0;
  else if (op == "lt") r = c < 0;
  else if (op == "le") r = c <= 0;
  else if (op == "gt") r = c > 0;
  else r = c >= 0;
  return Value{r};
}

// SQL LIKE with % and _ wildcards
bool like_match(const std::string& s, const std::string& pat, size_t si = 0, size_t pi = 0) {
  while (pi < pat.size()) {
    char pc = pat[pi];
    if (pc == '%') {
      for (size_t k = si; k <= s.size(); ++k) {
        if (like_match(s, pat, k, pi + 1)) return true;
      }
      return false;
    }
    if (si >= s.size()) return false;
    if (pc != '_' && pc != s[si]) return false;
    si++;
    pi++;
  }
  return si == s.size();
}

bool is_true(const Value& v) { return !is_null(v) && std::get<bool>(v); }

}  // namespace

Value eval_expr(const Expr& e, const std::vector<Value>& row) {
  switch (e.kind) {
    case Expr::Kind::FieldRef: return row[static_cast<size_t>(e.field_index)];
    case Expr::Kind::Literal: return e.literal_value;
    case Expr::Kind::Operation: break;
  }
  const std::string& op = e.op_name;

  if (op == "and") return tri_and(eval_expr(e.args[0], row), eval_expr(e.args[1], row));
  if (op == "or") return tri_or(eval_expr(e.args[0], row), eval_expr(e.args[1], row));
  if (op == "not") return tri_not(eval_expr(e.args[0], row));

  if (op == "eq" || op == "neq" || op == "lt" || op == "le" || op == "gt" || op == "ge") {
    return compare_op(op, eval_expr(e.args[0], row), eval_expr(e.args[1], row));
  }
  if (op == "between") {
    Value x = eval_expr(e.args[0], row);
    Value lo = eval_expr(e.args[1], row);
    Value hi = eval_expr(e.args[2], row);
    return tri_and(compare_op("ge", x, lo), compare_op("le", x, hi));
  }
  if (op == "in") {
    Value x = eval_expr(e.args[0], row);
    if (is_null(x)) return Value{std::monostate{}};
    bool saw_null = false;
    for (size_t i = 1; i < e.args.size(); ++i) {
      Value v = eval_expr(e.args[i], row);
      if (is_null(v)) {
        saw_null = true;
        continue;
      }
      if (compare_values(x, v) == 0) return Value{true};
    }
    return saw_null ? Value{std::monostate{}} : Value{false};
  }
  if (op == "like") {
    Value s = eval_expr(e.args[0], row);
    Value p = eval_expr(e.args[1], row);
    if (is_null(s) || is_null(p)) return Value{std::monostate{}};
    return Value{like_match(std::get<std::string>(s), std::get<std::string>(p))};
  }
  if (op == "add" || op == "sub" || op == "mul" || op == "div") {
    Value a = eval_expr(e.args[0], row);
    Value b = eval_expr(e.args[1], row);
    if (is_null(a) || is_null(b)) return Value{std::monostate{}};
    bool both_int = std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b);
    if (op == "div") {
      double denominator = value_as_double(b);
      if (denominator == 0.0) return Value{std::monostate{}};
      return Value{value_as_double(a) / denominator};
    }
    if (both_int) {
      int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
      if (op == "add") return Value{x + y};
      if (op == "sub") return Value{x - y};
      return Value{x * y};
    }
    double x = value_as_double(a), y = value_as_double(b);
    if (op == "add") return Value{x + y};
    if (op == "sub") return Value{x - y};
    return Value{x * y};
  }
  if (op == "neg") {
    Value a = eval_expr(e.args[0], row);
    if (is_null(a)) return a;
    if (std::holds_alternative<int64_t>(a)) return Value{-std::get<int64_t>(a)};
    return Value{-value_as_double(a)};
  }
  if (op == "year") {
    Value a = eval_expr(e.args[0], row);
    if (is_null(a)) return a;
    int64_t days = std::get<int64_t>(a);
    // timestamps arrive in seconds
    if (days > 100000 || days < -100000) days = days >= 0 ? days / 86400 : (days - 86399) / 86400;
    std::string d = format_date(days);
    return Value{static_cast<int64_t>(std::stoll(d.substr(0, 4)))};
  }
  throw Error("eval: unsupported operation " + op);
}

// ---------------------------------------------------------------------------
// Plan execution
// ---------------------------------------------------------------------------

namespace {

using Rows = std::vector<std::vector<Value>>;

// numeric values are canonicalized to double so 5 and 5.0 land in one bucket,
// matching compare_values equality
Value canonical_key(const Value& v) {
  if (std::holds_alternative<int64_t>(v)) {
    return Value{static_cast<double>(std::get<int64_t>(v))};
  }
  return v;
}

struct KeyHash {
  size_t operator()(const std::vector<Value>& key) const {
    Fnv64 h;
    for (const auto& v : key) hash_value(h, v);
    return static_cast<size_t>(h.digest());
  }
};

struct KeyEq {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i].index() != b[i].index()) return false;
      if (!is_null(a[i]) && compare_values(a[i], b[i]) != 0) return false;
    }
    return true;
  }
};

struct Executor {
  const Catalog& catalog;
  const ExecOptions& opts;
  ExecProfile* profile;

  void cap(size_t rows) {
    if (static_cast<int64_t>(rows) > opts.max_intermediate_rows) {
      throw ResourceCapError("intermediate result exceeds cap of " +
                             std::to_string(opts.max_intermediate_rows) + " rows");
    }
  }

  Rows run(const RelationNode& n) {
    Rows intrinsic;
    std::vector<int64_t> rows_in;
    int64_t scan_rows = 0;

    switch (n.kind) {
      case RelKind::TableScan: {
        const TableDef* t = catalog.find_table(n.table_name);
        if (!t) throw ValidationError("unknown table " + n.table_name);
        if (!t->has_data) throw ValidationError("table " + n.table_name + " has no data");
        size_t rows = static_cast<size_t>(t->stats.num_rows);
        cap(rows);
        intrinsic.resize(rows);
        for (size_t r = 0; r < rows; ++r) {
          auto& out = intrinsic[r];
          out.reserve(t->columns.size());
          for (size_t c = 0; c < t->columns.size(); ++c) out.push_back(t->data[c][r]);
        }
        scan_rows = t->stats.num_rows;
        break;
      }
      case RelKind::Filter: {
        Rows in = run(n.children[0]);
        rows_in.push_back(static_cast<int64_t>(in.size()));
        for (auto& row : in) {
          if (is_true(eval_expr(n.exprs[0], row))) intrinsic.push_back(std::move(row));
        }
        break;
      }
      case RelKind::Project: {
        Rows in = run(n.children[0]);
        rows_in.push_back(static_cast<int64_t>(in.size()));
        intrinsic.reserve(in.size());
        for (auto& row : in) {
          std::vector<Value> out = row;
          for (const auto& e : n.exprs) out.push_back(eval_expr(e, row));
          intrinsic.push_back(std::move(out));
        }
        break;
      }
      case RelKind::Join: {
        Rows left = run(n.children[0]);
        Rows right = run(n.children[1]);
        rows_in.push_back(static_cast<int64_t>(left.size()));
        rows_in.push_back(static_cast<int64_t>(right.size()));
        intrinsic = join_rows(n, left, right);
        break;
      }
      case RelKind::Aggregate: {
        Rows in = run(n.children[0]);
        rows_in.push_back(static_cast<int64_t>(in.size()));
        intrinsic = aggregate_rows(n, in);
        break;
      }
      case RelKind::Sort: {
        Rows in = run(n.children[0]);
        rows_in.push_back(static_cast<int64_t>(in.size()));
        intrinsic = std::move(in);
        sort_rows(n, intrinsic);
        break;
      }
      case RelKind::Limit: {
        Rows in = run(n.children[0]);
        rows_in.push_back(static_cast<int64_t>(in.size()));
        auto count = static_cast<size_t>(std::get<int64_t>(n.exprs[0].literal_value));
        if (in.size() > count) in.resize(count);
        intrinsic = std::move(in);
        break;
      }
    }

    cap(intrinsic.size());

    // apply emit
    Rows out;
    out.reserve(intrinsic.size());
    bool identity = true;
    size_t width = intrinsic.empty() ? 0 : intrinsic[0].size();
    if (n.emit.size() != width) identity = false;
    for (size_t i = 0; identity && i < n.emit.size(); ++i) {
      if (n.emit[i] != static_cast<int32_t>(i)) identity = false;
    }
    if (identity) {
      out = std::move(intrinsic);
    } else {
      for (auto& row : intrinsic) {
        std::vector<Value> o;
        o.reserve(n.emit.size());
        for (int32_t idx : n.emit) o.push_back(row[static_cast<size_t>(idx)]);
        out.push_back(std::move(o));
      }
    }

    if (profile) {
      NodeProfile np;
      np.node_id = n.id;
      np.kind = n.kind;
      np.rows_in = rows_in;
      np.rows_out = static_cast<int64_t>(out.size());
      np.scan_rows = scan_rows;
      profile->nodes.push_back(std::move(np));
    }
    return out;
  }

  Rows join_rows(const RelationNode& n, Rows& left, Rows& right) {
    size_t lw = n.children[0].output_schema.size();
    const Expr& cond = n.exprs[0];

    // split conjuncts into hashable equi-pairs and a residual
    std::vector<const Expr*> conjuncts;
    std::vector<std::pair<int32_t, int32_t>> equi;  // (left idx, right idx rel.)
    std::vector<const Expr*> residual;
    flatten_and(cond, conjuncts);
    for (const Expr* c : conjuncts) {
      if (c->kind == Expr::Kind::Operation && c->op_name == "eq" &&
          c->args[0].kind == Expr::Kind::FieldRef && c->args[1].kind == Expr::Kind::FieldRef) {
        int32_t a = c->args[0].field_index, b = c->args[1].field_index;
        if (a < static_cast<int32_t>(lw) && b >= static_cast<int32_t>(lw)) {
          equi.emplace_back(a, b - static_cast<int32_t>(lw));
          continue;
        }
        if (b < static_cast<int32_t>(lw) && a >= static_cast<int32_t>(lw)) {
          equi.emplace_back(b, a - static_cast<int32_t>(lw));
          continue;
        }
      }
      residual.push_back(c);
    }

    Rows out;
    auto emit_pair = [&](const std::vector<Value>& l, const std::vector<Value>& r) {
      std::vector<Value> row;
      row.reserve(l.size() + r.size());
      row.insert(row.end(), l.begin(), l.end());
      row.insert(row.end(), r.begin(), r.end());
      bool ok = true;
      for (const Expr* c : residual) {
        if (!is_true(eval_expr(*c, row))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out.push_back(std::move(row));
        cap(out.size());
      }
    };

    if (!equi.empty()) {
      std::unordered_map<std::vector<Value>, std::vector<size_t>, KeyHash, KeyEq> table;
      for (size_t r = 0; r < right.size(); ++r) {
        std::vector<Value> key;
        key.reserve(equi.size());
        bool has_null = false;
        for (auto [li, ri] : equi) {
          const Value& v = right[r][static_cast<size_t>(ri)];
          if (is_null(v)) has_null = true;
          key.push_back(canonical_key(v));
        }
        if (!has_null) table[std::move(key)].push_back(r);
      }
      for (const auto& l : left) {
        std::vector<Value> key;
        key.reserve(equi.size());
        bool has_null = false;
        for (auto [li, ri] : equi) {
          const Value& v = l[static_cast<size_t>(li)];
          if (is_null(v)) has_null = true;
          key.push_back(canonical_key(v));
        }
        if (has_null) continue;
        auto it = table.find(key);
        if (it == table.end()) continue;
        for (size_t r : it->second) emit_pair(l, right[r]);
      }
    } else {
      for (const auto& l : left) {
        for (const auto& r : right) emit_pair(l, r);
      }
    }
    return out;
  }

  static void flatten_and(const Expr& e, std::vector<const Expr*>& out) {
    if (e.kind == Expr::Kind::Operation && e.op_name == "and") {
      flatten_and(e.args[0], out);
      flatten_and(e.args[1], out);
    } else {
      out.push_back(&e);
    }
  }

  Rows aggregate_rows(const RelationNode& n, const Rows& in) {
    int g = aggregate_group_count(n);
    size_t n_aggs = n.exprs.size() - static_cast<size_t>(g);

    struct Acc {
      std::vector<Value> keys;
      std::vector<double> sum_f;
      std::vector<int64_t> sum_i;
      std::vector<bool> sum_is_int;
      std::vector<int64_t> count;
      std::vector<Value> minmax;
      std::vector<std::set<std::vector<Value>, bool (*)(const std::vector<Value>&,
                                                        const std::vector<Value>&)>> distincts;
    };

    auto vec_less = [](const std::vector<Value>& a, const std::vector<Value>& b) {
      for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i].index() != b[i].index()) return a[i].index() < b[i].index();
        int c = compare_values(a[i], b[i]);
        if (c != 0) return c < 0;
      }
      return a.size() < b.size();
    };

    std::unordered_map<std::vector<Value>, size_t, KeyHash, KeyEq> group_of;
    std::vector<Acc> groups;

    auto new_group = [&](std::vector<Value> keys) {
      Acc acc;
      acc.keys = std::move(keys);
      acc.sum_f.assign(n_aggs, 0.0);
      acc.sum_i.assign(n_aggs, 0);
      acc.sum_is_int.assign(n_aggs, true);
      acc.count.assign(n_aggs, 0);
      acc.minmax.assign(n_aggs, Value{std::monostate{}});
      for (size_t a = 0; a < n_aggs; ++a) acc.distincts.emplace_back(vec_less);
      groups.push_back(std::move(acc));
      return groups.size() - 1;
    };

    if (g == 0 && in.empty()) new_group({});  // global aggregate over empty input

    for (const auto& row : in) {
      std::vector<Value> raw_keys, canon;
      for (int k = 0; k < g; ++k) {
        Value v = eval_expr(n.exprs[static_cast<size_t>(k)], row);
        canon.push_back(canonical_key(v));
        raw_keys.push_back(std::move(v));
      }
      size_t gi;
      auto it = group_of.find(canon);
      if (it == group_of.end()) {
        gi = new_group(std::move(raw_keys));
        group_of.emplace(std::move(canon), gi);
      } else {
        gi = it->second;
      }
      Acc& acc = groups[gi];
      for (size_t a = 0; a < n_aggs; ++a) {
        const Expr& call = n.exprs[static_cast<size_t>(g) + a];
        const std::string& op = call.op_name;
        if (op == "count_star") {
          acc.count[a]++;
          continue;
        }
        Value v = eval_expr(call.args[0], row);
        if (is_null(v)) continue;
        acc.count[a]++;
        if (op == "sum" || op == "avg") {
          if (std::holds_alternative<int64_t>(v)) {
            acc.sum_i[a] += std::get<int64_t>(v);
          } else {
            acc.sum_is_int[a] = false;
          }
          acc.sum_f[a] += value_as_double(v);
        } else if (op == "min") {
          if (is_null(acc.minmax[a]) || compare_values(v, acc.minmax[a]) < 0) acc.minmax[a] = v;
        } else if (op == "max") {
          if (is_null(acc.minmax[a]) || compare_values(v, acc.minmax[a]) > 0) acc.minmax[a] = v;
        } else if (op == "count_distinct") {
          acc.distincts[a].insert({canonical_key(v)});
        }
      }
    }

    std::vector<SchemaColumn> in_schema = n.input_schema();
    Rows out;
    out.reserve(groups.size());
    for (const auto& acc : groups) {
      std::vector<Value> row = acc.keys;
      for (size_t a = 0; a < n_aggs; ++a) {
        const Expr& call = n.exprs[static_cast<size_t>(g) + a];
        const std::string& op = call.op_name;
        if (op == "count_star" || op == "count") {
          row.push_back(acc.count[a]);
        } else if (op == "count_distinct") {
          row.push_back(static_cast<int64_t>(acc.distincts[a].size()));
        } else if (op == "sum") {
          if (acc.count[a] == 0) {
            row.push_back(Value{std::monostate{}});
          } else if (acc.sum_is_int[a] &&
                     infer_expr_type(call, in_schema) == DataType::Integer) {
            row.push_back(acc.sum_i[a]);
          } else {
            row.push_back(acc.sum_f[a]);
          }
        } else if (op == "avg") {
          if (acc.count[a] == 0) {
            row.push_back(Value{std::monostate{}});
          } else {
            row.push_back(acc.sum_f[a] / static_cast<double>(acc.count[a]));
          }
        } else {  // min / max
          row.push_back(acc.minmax[a]);
        }
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  // sorts by the key expressions, ties broken by the remaining columns, so
  // the output sequence is a pure function of the input multiset
  void sort_rows(const RelationNode& n, Rows& rows) {
    std::vector<int32_t> keys;
    for (const auto& e : n.exprs) keys.push_back(e.field_index);
    std::stable_sort(rows.begin(), rows.end(),
                     [&](const std::vector<Value>& a, const std::vector<Value>& b) {
                       for (int32_t k : keys) {
                         int c = compare_values(a[static_cast<size_t>(k)],
                                                b[static_cast<size_t>(k)]);
                         if (c != 0) return c < 0;
                       }
                       for (size_t i = 0; i < a.size(); ++i) {
                         if (a[i].index() != b[i].index()) return a[i].index() < b[i].index();
                         int c = compare_values(a[i], b[i]);
                         if (c != 0) return c < 0;
                       }
                       return false;
                     });
  }
};

}  // namespace

ResultSet execute(const LogicalPlan& plan, const Catalog& catalog, const ExecOptions& opts,
                  ExecProfile* profile) {
  Executor ex{catalog, opts, profile};
  ResultSet rs;
  rs.schema = plan.root.output_schema;
  rs.rows = ex.run(plan.root);
  if (profile) profile->output_rows = static_cast<int64_t>(rs.rows.size());
  return rs;
}

bool result_multisets_equal(const ResultSet& a, const ResultSet& b) {
  if (a.rows.size() != b.rows.size()) return false;
  if (a.schema.size() != b.schema.size()) return false;
  return result_multiset_digest(a) == result_multiset_digest(b);
}

uint64_t result_multiset_digest(const ResultSet& r) {
  // order-independent: combine per-row digests with addition
  uint64_t total = 0;
  for (const auto& row : r.rows) {
    Fnv64 h;
    for (const auto& v : row) {
      // canonicalize numerics so 5 vs 5.0 differences from fold order
      // do not change the digest
      if (std::holds_alternative<int64_t>(v)) {
        h.add_u8(2);
        h.add_double(static_cast<double>(std::get<int64_t>(v)));
      } else {
        hash_value(h, v);
      }
    }
    total += h.digest();
  }
  return total;
}

}  // namespace xeo
