#include "xeo/featurizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "xeo/json_io.hpp"
#include "xeo/optimizer.hpp"

namespace xeo {

const char* to_string(NodeType t) {
  switch (t) {
    case NodeType::Table: return "Table";
    case NodeType::Field: return "Field";
    case NodeType::Literal: return "Literal";
    case NodeType::Operation: return "Operation";
    case NodeType::Relation: return "Relation";
  }
  return "?";
}

NodeType node_type_from_string(const std::string& s) {
  for (int i = 0; i < kNumNodeTypes; ++i) {
    if (s == to_string(static_cast<NodeType>(i))) return static_cast<NodeType>(i);
  }
  throw ValidationError("unknown node type: " + s);
}

int FeatureSchema::dim(NodeType t) {
  switch (t) {
    case NodeType::Table: return 2;
    case NodeType::Field: return 4 + kNumDataTypes;
    case NodeType::Literal: return 2 + kNumDataTypes;
    case NodeType::Operation: return kNumOpCategories;
    case NodeType::Relation: return 2 + kNumRelKinds;
  }
  return 0;
}

uint64_t FeatureSchema::content_hash() {
  Fnv64 h;
  h.add_string(kVersion);
  for (int i = 0; i < kNumNodeTypes; ++i) {
    h.add_string(to_string(static_cast<NodeType>(i)));
    h.add_u32(static_cast<uint32_t>(dim(static_cast<NodeType>(i))));
  }
  for (int i = 0; i < kNumDataTypes; ++i) h.add_string(to_string(static_cast<DataType>(i)));
  for (int i = 0; i < kNumOpCategories; ++i) h.add_string(to_string(static_cast<OpCategory>(i)));
  for (int i = 0; i < kNumRelKinds; ++i) h.add_string(to_string(static_cast<RelKind>(i)));
  return h.digest();
}

namespace {

double log1p_feature(double x) { return std::log1p(std::max(0.0, x)); }

struct Encoder {
  const Catalog& catalog;
  PlanGraph graph;
  std::map<std::string, int32_t> table_nodes;               // table -> node id
  std::map<std::pair<std::string, int>, int32_t> field_nodes;  // (table, col) -> node id
  std::set<std::pair<int32_t, int32_t>> edge_set;

  int32_t add_node(NodeType type, std::vector<double> features) {
    if (static_cast<int>(features.size()) != FeatureSchema::dim(type)) {
      throw ValidationError("feature vector length mismatch for node type " +
                            std::string(to_string(type)));
    }
    PlanGraphNode n;
    n.id = static_cast<int32_t>(graph.nodes.size());
    n.type = type;
    n.features = std::move(features);
    graph.nodes.push_back(std::move(n));
    return graph.nodes.back().id;
  }

  void add_edge(int32_t from, int32_t to) {
    if (edge_set.insert({from, to}).second) graph.edges.emplace_back(from, to);
  }

  int32_t table_node(const std::string& table) {
    auto it = table_nodes.find(table);
    if (it != table_nodes.end()) return it->second;
    const TableDef* t = catalog.find_table(table);
    if (!t) throw ValidationError("encode: unknown table " + table);
    int32_t id = add_node(NodeType::Table, {log1p_feature(static_cast<double>(t->stats.num_rows)),
                                            log1p_feature(t->stats.avg_row_size)});
    table_nodes.emplace(table, id);
    return id;
  }

  int32_t field_node(const ColumnOrigin& origin) {
    auto key = std::make_pair(origin.table, origin.column);
    auto it = field_nodes.find(key);
    if (it != field_nodes.end()) return it->second;
    const TableDef* t = catalog.find_table(origin.table);
    if (!t || origin.column < 0 || origin.column >= static_cast<int>(t->columns.size())) {
      throw ValidationError("encode: unknown column origin");
    }
    const ColumnDef& c = t->columns[static_cast<size_t>(origin.column)];
    std::vector<double> f;
    f.push_back(log1p_feature(static_cast<double>(c.stats.num_nulls)));
    f.push_back(log1p_feature(static_cast<double>(c.stats.num_distinct)));
    f.push_back(log1p_feature(c.stats.avg_col_size));
    f.push_back(log1p_feature(static_cast<double>(c.stats.max_col_size)));
    for (int i = 0; i < kNumDataTypes; ++i) f.push_back(i == static_cast<int>(c.type) ? 1.0 : 0.0);
    int32_t id = add_node(NodeType::Field, std::move(f));
    field_nodes.emplace(key, id);
    return id;
  }

  int32_t literal_node(const Expr& e) {
    std::vector<double> f;
    f.push_back(log1p_feature(value_byte_size(e.literal_type, e.literal_value)));
    f.push_back(e.is_casted ? 1.0 : 0.0);
    for (int i = 0; i < kNumDataTypes; ++i) {
      f.push_back(i == static_cast<int>(e.literal_type) ? 1.0 : 0.0);
    }
    return add_node(NodeType::Literal, std::move(f));
  }

  int32_t operation_node(const std::string& op_name) {
    const OpSignature* sig = find_op(op_name);
    if (!sig) throw ValidationError("encode: unknown operation " + op_name);
    std::vector<double> f(kNumOpCategories, 0.0);
    f[static_cast<size_t>(sig->category)] = 1.0;
    return add_node(NodeType::Operation, std::move(f));
  }

  // expression walk: operations chain to their parent, fields and literals
  // attach to the nearest consumer; fields additionally attach to the
  // owning relation
  void walk_expr(const Expr& e, int32_t parent, int32_t relation,
                 const std::vector<std::optional<ColumnOrigin>>& input_origins) {
    switch (e.kind) {
      case Expr::Kind::FieldRef: {
        const auto& origin = input_origins[static_cast<size_t>(e.field_index)];
        if (!origin) return;  // computed column: structure is carried by ops
        int32_t f = field_node(*origin);
        add_edge(f, parent);
        add_edge(f, relation);
        return;
      }
      case Expr::Kind::Literal: {
        add_edge(literal_node(e), parent);
        return;
      }
      case Expr::Kind::Operation: {
        int32_t op = operation_node(e.op_name);
        add_edge(op, parent);
        for (const auto& a : e.args) walk_expr(a, op, relation, input_origins);
        return;
      }
    }
  }

  int32_t encode_relation(const RelationNode& n) {
    if (!n.hints) {
      throw ValidationError("encode: node " + std::to_string(n.id) + " is missing hints");
    }
    std::vector<int32_t> child_ids;
    for (const auto& c : n.children) child_ids.push_back(encode_relation(c));

    std::vector<double> f;
    f.push_back(log1p_feature(n.hints->est_rows));
    f.push_back(log1p_feature(n.hints->avg_row_size));
    for (int i = 0; i < kNumRelKinds; ++i) f.push_back(i == static_cast<int>(n.kind) ? 1.0 : 0.0);
    int32_t rel = add_node(NodeType::Relation, std::move(f));
    graph.relation_ids.push_back(rel);

    for (int32_t c : child_ids) add_edge(c, rel);

    if (n.kind == RelKind::TableScan) {
      add_edge(table_node(n.table_name), rel);
      const TableDef* t = catalog.find_table(n.table_name);
      for (int32_t e : n.emit) {
        (void)t;
        add_edge(field_node(ColumnOrigin{n.table_name, e}), rel);
      }
      return rel;
    }

    std::vector<std::optional<ColumnOrigin>> input_origins;
    for (const auto& c : n.children) {
      auto co = column_origins(c, catalog);
      input_origins.insert(input_origins.end(), co.begin(), co.end());
    }
    for (const auto& e : n.exprs) walk_expr(e, rel, rel, input_origins);
    return rel;
  }
};

}  // namespace

std::vector<int32_t> topo_order(size_t node_count,
                                const std::vector<std::pair<int32_t, int32_t>>& edges) {
  std::vector<int> in_degree(node_count, 0);
  std::vector<std::vector<int32_t>> out(node_count);
  for (const auto& [u, v] : edges) {
    out[static_cast<size_t>(u)].push_back(v);
    in_degree[static_cast<size_t>(v)]++;
  }
  std::set<int32_t> ready;
  for (size_t i = 0; i < node_count; ++i) {
    if (in_degree[i] == 0) ready.insert(static_cast<int32_t>(i));
  }
  std::vector<int32_t> order;
  order.reserve(node_count);
  while (!ready.empty()) {
    int32_t v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int32_t w : out[static_cast<size_t>(v)]) {
      if (--in_degree[static_cast<size_t>(w)] == 0) ready.insert(w);
    }
  }
  if (order.size() != node_count) throw Error("topo_order: cycle detected in plan graph");
  return order;
}

PlanGraph encode_plan(const LogicalPlan& annotated, const Catalog& catalog) {
  Encoder enc{catalog};
  enc.encode_relation(annotated.root);
  enc.graph.topo_order = topo_order(enc.graph.nodes.size(), enc.graph.edges);
  return std::move(enc.graph);
}

std::string graph_to_json(const PlanGraph& g) {
  ordered_json j;
  j["schemaVersion"] = FeatureSchema::kVersion;
  j["schemaHash"] = FeatureSchema::content_hash();
  j["nodes"] = ordered_json::array();
  for (const auto& n : g.nodes) {
    j["nodes"].push_back(
        ordered_json{{"id", n.id}, {"type", to_string(n.type)}, {"features", n.features}});
  }
  j["edges"] = ordered_json::array();
  for (const auto& [u, v] : g.edges) j["edges"].push_back(ordered_json::array({u, v}));
  j["topoOrder"] = g.topo_order;
  j["relationIds"] = g.relation_ids;
  return j.dump(2) + "\n";
}

PlanGraph graph_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("graph parse error: ") + e.what());
  }
  PlanGraph g;
  try {
    if (j.at("schemaHash").get<uint64_t>() != FeatureSchema::content_hash()) {
      throw IoError("graph schema hash mismatch");
    }
    for (const auto& jn : j.at("nodes")) {
      PlanGraphNode n;
      n.id = jn.at("id").get<int32_t>();
      n.type = node_type_from_string(jn.at("type").get<std::string>());
      n.features = jn.at("features").get<std::vector<double>>();
      if (static_cast<int>(n.features.size()) != FeatureSchema::dim(n.type)) {
        throw IoError("graph node feature width mismatch");
      }
      g.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("edges")) {
      g.edges.emplace_back(je.at(0).get<int32_t>(), je.at(1).get<int32_t>());
    }
    g.topo_order = j.at("topoOrder").get<std::vector<int32_t>>();
    g.relation_ids = j.at("relationIds").get<std::vector<int32_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("graph structure error: ") + e.what());
  }
  return g;
}

uint64_t graph_digest(const PlanGraph& g) {
  Fnv64 h;
  h.add_u64(g.nodes.size());
  for (const auto& n : g.nodes) {
    h.add_u8(static_cast<uint8_t>(n.type));
    for (double f : n.features) h.add_double(f);
  }
  auto edges = g.edges;
  std::sort(edges.begin(), edges.end());
  for (const auto& [u, v] : edges) {
    h.add_u32(static_cast<uint32_t>(u));
    h.add_u32(static_cast<uint32_t>(v));
  }
  return h.digest();
}

}  // namespace xeo
