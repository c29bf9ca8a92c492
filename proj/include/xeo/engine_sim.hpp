#pragma once

#include <array>
#include <string>
#include <vector>

#include "xeo/executor.hpp"
#include "xeo/plan.hpp"

namespace xeo {

// Parameterized stand-in for one engine provisioning. Runtime model:
//   t = (startup + sum_nodes cost[kind] * work(node) / workers^parallelExponent)
//       * exp(noiseSigma * z)
struct EngineSpec {
  std::string name;
  int workers = 1;
  double startup_seconds = 0.0;
  std::array<double, kNumRelKinds> per_row_cost{};  // seconds per work unit, by RelKind
  double parallel_exponent = 0.8;
  double noise_sigma = 0.05;
};

using Fleet = std::vector<EngineSpec>;

// Per-node work units: scan reads the whole table; joins touch both inputs
// and the output; sort is n log n.
double work_units(const NodeProfile& node);

// Noise-free simulated seconds (z = 0 path).
double simulate_time_noise_free(const ExecProfile& profile, const EngineSpec& engine);

// z is a standard normal draw supplied by the caller.
double simulate_time(const ExecProfile& profile, const EngineSpec& engine, double z);

// Four provisionings mirroring two engine families with 1 and 4 workers;
// the "interactive" family has cheap startup, the "batch" family higher
// startup but cheaper per-row work.
Fleet default_fleet(double noise_sigma = 0.05);

// Fifth provisioning used by the new-engine scenario.
EngineSpec presto_w8_spec(double noise_sigma = 0.05);

std::string fleet_to_json(const Fleet& fleet);
Fleet fleet_from_json(const std::string& text);
void save_fleet(const Fleet& fleet, const std::string& path);
Fleet load_fleet(const std::string& path);

struct LabeledQuery {
  std::string sql;
  LogicalPlan plan;        // optimized, hint-annotated
  std::vector<double> y;   // per-engine seconds, > 0
};

struct LabelOptions {
  double timeout_seconds = 60.0;
  ExecOptions exec;
};

// Optimizes and executes each query once on the reference executor, then
// simulates per-engine times with independent per-(query, engine) noise
// draws. Queries that exceed the timeout on every engine (noise-free) or trip
// the executor's resource cap are dropped.
std::vector<LabeledQuery> label_workload(const std::vector<std::string>& queries,
                                         const Catalog& catalog, const Fleet& fleet, uint64_t seed,
                                         const LabelOptions& opts = {});

std::string labeled_to_jsonl(const std::vector<LabeledQuery>& labeled);
std::vector<LabeledQuery> labeled_from_jsonl(const std::string& text);

}  // namespace xeo
