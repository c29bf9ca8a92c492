#include "xeo/plan_json.hpp"

#include "xeo/json_io.hpp"

namespace xeo {

namespace {

ordered_json expr_to_json(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::FieldRef: return ordered_json{{"field", e.field_index}};
    case Expr::Kind::Literal: {
      ordered_json j;
      j["literal"] = {{"type", to_string(e.literal_type)},
                      {"value", value_to_json(e.literal_type, e.literal_value)},
                      {"casted", e.is_casted}};
      return j;
    }
    case Expr::Kind::Operation: {
      ordered_json j;
      j["op"] = e.op_name;
      j["args"] = ordered_json::array();
      for (const auto& a : e.args) j["args"].push_back(expr_to_json(a));
      return j;
    }
  }
  return nullptr;
}

Expr expr_from_json(const ordered_json& j) {
  if (!j.is_object()) throw IoError("expression must be an object");
  if (j.contains("field")) return Expr::field(j.at("field").get<int32_t>());
  if (j.contains("literal")) {
    const auto& l = j.at("literal");
    DataType t = data_type_from_string(l.at("type").get<std::string>());
    return Expr::literal(t, value_from_json(t, l.at("value")), l.at("casted").get<bool>());
  }
  if (j.contains("op")) {
    std::string name = j.at("op").get<std::string>();
    if (!find_op(name)) throw IoError("unknown operation in plan: " + name);
    std::vector<Expr> args;
    for (const auto& a : j.at("args")) args.push_back(expr_from_json(a));
    return Expr::op(std::move(name), std::move(args));
  }
  throw IoError("expression object needs one of: field, literal, op");
}

ordered_json node_to_json(const RelationNode& n) {
  ordered_json j;
  j["id"] = n.id;
  j["kind"] = to_string(n.kind);
  if (n.kind == RelKind::TableScan) j["table"] = n.table_name;
  j["children"] = ordered_json::array();
  for (const auto& c : n.children) j["children"].push_back(node_to_json(c));
  j["exprs"] = ordered_json::array();
  for (const auto& e : n.exprs) j["exprs"].push_back(expr_to_json(e));
  j["schema"] = ordered_json::array();
  for (const auto& c : n.output_schema) {
    j["schema"].push_back(ordered_json{{"name", c.name}, {"type", to_string(c.type)}});
  }
  j["emit"] = n.emit;
  if (n.hints) {
    j["hints"] = {{"estRows", n.hints->est_rows}, {"avgRowSize", n.hints->avg_row_size}};
  }
  return j;
}

RelationNode node_from_json(const ordered_json& j, int depth) {
  if (depth > 512) throw IoError("plan nesting too deep");
  RelationNode n;
  n.id = j.at("id").get<uint32_t>();
  n.kind = rel_kind_from_string(j.at("kind").get<std::string>());
  if (n.kind == RelKind::TableScan) n.table_name = j.at("table").get<std::string>();
  for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c, depth + 1));
  for (const auto& e : j.at("exprs")) n.exprs.push_back(expr_from_json(e));
  for (const auto& c : j.at("schema")) {
    n.output_schema.push_back(
        {c.at("name").get<std::string>(), data_type_from_string(c.at("type").get<std::string>())});
  }
  for (const auto& i : j.at("emit")) n.emit.push_back(i.get<int32_t>());
  if (j.contains("hints")) {
    PlanHints h;
    h.est_rows = j.at("hints").at("estRows").get<double>();
    h.avg_row_size = j.at("hints").at("avgRowSize").get<double>();
    n.hints = h;
  }
  return n;
}

}  // namespace

ordered_json plan_to_ordered_json(const LogicalPlan& plan) { return node_to_json(plan.root); }

LogicalPlan plan_from_ordered_json(const ordered_json& j) {
  try {
    LogicalPlan plan;
    plan.root = node_from_json(j, 0);
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("plan structure error: ") + e.what());
  } catch (const ValidationError& e) {
    throw IoError(std::string("plan structure error: ") + e.what());
  }
}

std::string serialize_plan(const LogicalPlan& plan) {
  return plan_to_ordered_json(plan).dump(2) + "\n";
}

LogicalPlan deserialize_plan(const std::string& bytes) {
  ordered_json j;
  try {
    j = ordered_json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("plan parse error: ") + e.what());
  }
  return plan_from_ordered_json(j);
}

void save_plan(const LogicalPlan& plan, const std::string& path) {
  write_file(path, serialize_plan(plan));
}

LogicalPlan load_plan(const std::string& path) { return deserialize_plan(read_file(path)); }

}  // namespace xeo
