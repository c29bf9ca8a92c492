#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xeo/plan.hpp"

namespace xeo {

enum class NodeType : uint8_t { Table, Field, Literal, Operation, Relation };

constexpr int kNumNodeTypes = 5;

const char* to_string(NodeType t);
NodeType node_type_from_string(const std::string& s);

// Per-type flat feature layouts. Continuous features are stored as ln(1+x);
// one-hot groups and booleans pass through.
//   Table:     [numRows, avgRowSize]
//   Field:     [numNulls, numDistinctVals, avgColSize, maxColSize, dataType(7)]
//   Literal:   [size, isCasted, dataType(7)]
//   Operation: [operationType(8)]
//   Relation:  [estRows, avgRowSize, relationType(7)]
struct FeatureSchema {
  static constexpr const char* kVersion = "xeo-feature-schema-v1";
  static int dim(NodeType t);
  static uint64_t content_hash();
};

struct PlanGraphNode {
  int32_t id = 0;  // dense, 0..N-1, in construction order
  NodeType type = NodeType::Relation;
  std::vector<double> features;
};

struct PlanGraph {
  std::vector<PlanGraphNode> nodes;
  std::vector<std::pair<int32_t, int32_t>> edges;  // child -> parent, deduplicated
  std::vector<int32_t> topo_order;
  std::vector<int32_t> relation_ids;
};

// Kahn's algorithm with smallest-id tiebreak; throws on cycles.
std::vector<int32_t> topo_order(size_t node_count,
                                const std::vector<std::pair<int32_t, int32_t>>& edges);

// Vectorizes a fully hinted plan per the five-node-type scheme. Throws
// ValidationError when hints are missing or categories are unknown.
PlanGraph encode_plan(const LogicalPlan& annotated, const Catalog& catalog);

std::string graph_to_json(const PlanGraph& g);
PlanGraph graph_from_json(const std::string& text);

// Digest independent of node-id labeling differences that preserve structure.
uint64_t graph_digest(const PlanGraph& g);

}  // namespace xeo
