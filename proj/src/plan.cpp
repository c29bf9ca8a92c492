#include "xeo/plan.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace xeo {

const char* to_string(RelKind k) {
  switch (k) {
    case RelKind::TableScan: return "TableScan";
    case RelKind::Filter: return "Filter";
    case RelKind::Project: return "Project";
    case RelKind::Join: return "Join";
    case RelKind::Aggregate: return "Aggregate";
    case RelKind::Sort: return "Sort";
    case RelKind::Limit: return "Limit";
  }
  return "?";
}

RelKind rel_kind_from_string(const std::string& s) {
  for (int i = 0; i < kNumRelKinds; ++i) {
    if (s == to_string(static_cast<RelKind>(i))) return static_cast<RelKind>(i);
  }
  throw ValidationError("unknown relation kind: " + s);
}

std::vector<SchemaColumn> RelationNode::input_schema() const {
  std::vector<SchemaColumn> in;
  for (const auto& c : children) {
    in.insert(in.end(), c.output_schema.begin(), c.output_schema.end());
  }
  return in;
}

int aggregate_group_count(const RelationNode& node) {
  int g = 0;
  for (const auto& e : node.exprs) {
    if (e.kind == Expr::Kind::Operation && is_aggregate_op(e.op_name)) break;
    g++;
  }
  return g;
}

std::vector<SchemaColumn> intrinsic_schema(const RelationNode& node, const Catalog& catalog) {
  std::vector<SchemaColumn> in = node.input_schema();
  switch (node.kind) {
    case RelKind::TableScan: {
      const TableDef* t = catalog.find_table(node.table_name);
      if (!t) throw ValidationError("unknown table: " + node.table_name);
      std::vector<SchemaColumn> s;
      for (const auto& c : t->columns) s.push_back({node.table_name + "." + c.name, c.type});
      return s;
    }
    case RelKind::Filter:
    case RelKind::Sort:
    case RelKind::Limit:
    case RelKind::Join: return in;
    case RelKind::Project: {
      std::vector<SchemaColumn> s = in;
      for (const auto& e : node.exprs) {
        s.push_back({expr_to_string(e, in), infer_expr_type(e, in)});
      }
      return s;
    }
    case RelKind::Aggregate: {
      std::vector<SchemaColumn> s;
      for (const auto& e : node.exprs) {
        s.push_back({expr_to_string(e, in), infer_expr_type(e, in)});
      }
      return s;
    }
  }
  return {};
}

void recompute_schemas(RelationNode& node, const Catalog& catalog) {
  for (auto& c : node.children) recompute_schemas(c, catalog);
  std::vector<SchemaColumn> intrinsic = intrinsic_schema(node, catalog);
  node.output_schema.clear();
  for (int32_t i : node.emit) {
    if (i < 0 || i >= static_cast<int32_t>(intrinsic.size())) {
      throw ValidationError("emit index " + std::to_string(i) + " out of range at node " +
                            std::to_string(node.id));
    }
    node.output_schema.push_back(intrinsic[static_cast<size_t>(i)]);
  }
}

static void renumber_rec(RelationNode& node, uint32_t& next) {
  node.id = next++;
  for (auto& c : node.children) renumber_rec(c, next);
}

void renumber_plan(LogicalPlan& plan) {
  uint32_t next = 0;
  renumber_rec(plan.root, next);
}

uint32_t max_node_id(const RelationNode& node) {
  uint32_t m = node.id;
  for (const auto& c : node.children) m = std::max(m, max_node_id(c));
  return m;
}

bool plan_has_hints(const RelationNode& node) {
  if (!node.hints) return false;
  for (const auto& c : node.children) {
    if (!plan_has_hints(c)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

struct Validator {
  const Catalog& catalog;
  std::vector<Violation> out;
  std::set<uint32_t> ids;

  void fail(const RelationNode& n, const std::string& msg) { out.push_back({n.id, msg}); }

  void check(const RelationNode& n) {
    for (const auto& c : n.children) check(c);

    if (!ids.insert(n.id).second) fail(n, "duplicate node id");

    size_t want_children = n.kind == RelKind::TableScan ? 0 : (n.kind == RelKind::Join ? 2 : 1);
    if (n.children.size() != want_children) {
      fail(n, std::string(to_string(n.kind)) + " must have " + std::to_string(want_children) +
                  " children, has " + std::to_string(n.children.size()));
      return;  // structure too broken to type-check
    }

    std::vector<SchemaColumn> in = n.input_schema();
    std::vector<SchemaColumn> intrinsic;
    try {
      intrinsic = intrinsic_schema(n, catalog);
    } catch (const Error& e) {
      fail(n, e.what());
      return;
    }

    // per-kind expression shape
    switch (n.kind) {
      case RelKind::TableScan:
        if (!n.exprs.empty()) fail(n, "TableScan carries expressions");
        break;
      case RelKind::Filter:
      case RelKind::Join: {
        if (n.exprs.size() != 1) {
          fail(n, std::string(to_string(n.kind)) + " needs exactly one predicate expression");
          break;
        }
        try {
          if (infer_expr_type(n.exprs[0], in) != DataType::Boolean) {
            fail(n, "predicate is not boolean");
          }
        } catch (const Error& e) {
          fail(n, e.what());
        }
        if (contains_aggregate(n.exprs[0])) fail(n, "aggregate call outside Aggregate node");
        break;
      }
      case RelKind::Project:
      case RelKind::Sort: {
        for (const auto& e : n.exprs) {
          try {
            infer_expr_type(e, in);
          } catch (const Error& err) {
            fail(n, err.what());
          }
          if (contains_aggregate(e)) fail(n, "aggregate call outside Aggregate node");
        }
        break;
      }
      case RelKind::Aggregate: {
        int g = aggregate_group_count(n);
        for (size_t i = 0; i < n.exprs.size(); ++i) {
          const Expr& e = n.exprs[i];
          bool is_agg = e.kind == Expr::Kind::Operation && is_aggregate_op(e.op_name);
          if (static_cast<int>(i) < g) {
            if (e.kind != Expr::Kind::FieldRef) {
              fail(n, "group key " + std::to_string(i) + " must be a field reference");
            }
          } else if (!is_agg) {
            fail(n, "expression " + std::to_string(i) + " after aggregates must be an aggregate");
          } else {
            for (const auto& a : e.args) {
              if (contains_aggregate(a)) fail(n, "nested aggregate call");
            }
          }
          try {
            infer_expr_type(e, in);
          } catch (const Error& err) {
            fail(n, err.what());
          }
        }
        break;
      }
      case RelKind::Limit: {
        bool ok = n.exprs.size() == 1 && n.exprs[0].kind == Expr::Kind::Literal &&
                  n.exprs[0].literal_type == DataType::Integer &&
                  !is_null(n.exprs[0].literal_value) &&
                  std::get<int64_t>(n.exprs[0].literal_value) >= 0;
        if (!ok) fail(n, "Limit needs a single non-negative integer literal");
        break;
      }
    }

    for (int32_t i : n.emit) {
      if (i < 0 || i >= static_cast<int32_t>(intrinsic.size())) {
        fail(n, "emit index " + std::to_string(i) + " out of range (intrinsic width " +
                    std::to_string(intrinsic.size()) + ")");
      }
    }
    if (n.output_schema.size() != n.emit.size()) {
      fail(n, "output schema width does not match emit list");
    } else {
      for (size_t i = 0; i < n.emit.size(); ++i) {
        int32_t src = n.emit[i];
        if (src < 0 || src >= static_cast<int32_t>(intrinsic.size())) continue;
        const SchemaColumn& want = intrinsic[static_cast<size_t>(src)];
        if (n.output_schema[i].type != want.type || n.output_schema[i].name != want.name) {
          fail(n, "output schema column " + std::to_string(i) +
                      " does not match intrinsic column " + std::to_string(src));
        }
      }
    }

    if (n.hints) {
      if (!std::isfinite(n.hints->est_rows) || n.hints->est_rows < 0) {
        fail(n, "hint estRows must be finite and >= 0");
      }
      if (!std::isfinite(n.hints->avg_row_size) || n.hints->avg_row_size <= 0) {
        fail(n, "hint avgRowSize must be finite and > 0");
      }
    }
  }
};

}  // namespace

std::vector<Violation> validate_plan(const LogicalPlan& plan, const Catalog& catalog) {
  Validator v{catalog, {}, {}};
  v.check(plan.root);
  return v.out;
}

void expect_valid(const LogicalPlan& plan, const Catalog& catalog, const std::string& context) {
  auto violations = validate_plan(plan, catalog);
  if (violations.empty()) return;
  std::string msg = context + ": invalid plan:";
  for (const auto& violation : violations) {
    msg += "\n  node " + std::to_string(violation.node_id) + ": " + violation.message;
  }
  throw ValidationError(msg);
}

// ---------------------------------------------------------------------------
// Equality / fingerprint / printing
// ---------------------------------------------------------------------------

static bool nodes_equal_modulo_ids(const RelationNode& a, const RelationNode& b) {
  if (a.kind != b.kind || a.table_name != b.table_name) return false;
  if (a.exprs.size() != b.exprs.size() || a.emit != b.emit) return false;
  for (size_t i = 0; i < a.exprs.size(); ++i) {
    if (!exprs_equal(a.exprs[i], b.exprs[i])) return false;
  }
  if (a.hints.has_value() != b.hints.has_value()) return false;
  if (a.hints && (a.hints->est_rows != b.hints->est_rows ||
                  a.hints->avg_row_size != b.hints->avg_row_size)) {
    return false;
  }
  if (a.children.size() != b.children.size()) return false;
  for (size_t i = 0; i < a.children.size(); ++i) {
    if (!nodes_equal_modulo_ids(a.children[i], b.children[i])) return false;
  }
  return true;
}

bool plan_equal_modulo_ids(const LogicalPlan& a, const LogicalPlan& b) {
  return nodes_equal_modulo_ids(a.root, b.root);
}

static void hash_node(Fnv64& h, const RelationNode& n) {
  h.add_u8(static_cast<uint8_t>(n.kind));
  h.add_string(n.table_name);
  h.add_u64(n.exprs.size());
  for (const auto& e : n.exprs) hash_expr(h, e);
  h.add_u64(n.emit.size());
  for (int32_t i : n.emit) h.add_u32(static_cast<uint32_t>(i));
  h.add_u8(n.hints ? 1 : 0);
  if (n.hints) {
    h.add_double(n.hints->est_rows);
    h.add_double(n.hints->avg_row_size);
  }
  h.add_u64(n.children.size());
  for (const auto& c : n.children) hash_node(h, c);
}

uint64_t plan_fingerprint(const LogicalPlan& plan) {
  Fnv64 h;
  hash_node(h, plan.root);
  return h.digest();
}

static void print_node(std::ostringstream& os, const RelationNode& n, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
  os << to_string(n.kind);
  if (n.kind == RelKind::TableScan) os << " " << n.table_name;
  std::vector<SchemaColumn> in = n.input_schema();
  if (!n.exprs.empty()) {
    os << " [";
    for (size_t i = 0; i < n.exprs.size(); ++i) {
      if (i) os << "; ";
      os << expr_to_string(n.exprs[i], in);
    }
    os << "]";
  }
  os << " emit=(";
  for (size_t i = 0; i < n.emit.size(); ++i) {
    if (i) os << ",";
    os << n.emit[i];
  }
  os << ")";
  if (n.hints) {
    os << " rows=" << n.hints->est_rows << " width=" << n.hints->avg_row_size;
  }
  os << "\n";
  for (const auto& c : n.children) print_node(os, c, depth + 1);
}

std::string print_plan(const LogicalPlan& plan) {
  std::ostringstream os;
  print_node(os, plan.root, 0);
  return os.str();
}

}  // namespace xeo
