#include "xeo/engine_sim.hpp"

#include <cmath>
#include <sstream>

#include "xeo/optimizer.hpp"
#include "xeo/plan_json.hpp"

namespace xeo {

double work_units(const NodeProfile& node) {
  auto in0 = [&]() { return node.rows_in.empty() ? 0.0 : static_cast<double>(node.rows_in[0]); };
  switch (node.kind) {
    case RelKind::TableScan: return static_cast<double>(node.scan_rows);
    case RelKind::Filter:
    case RelKind::Project: return in0();
    case RelKind::Join:
      return static_cast<double>(node.rows_in[0] + node.rows_in[1] + node.rows_out);
    case RelKind::Aggregate: return in0() + static_cast<double>(node.rows_out);
    case RelKind::Sort: return in0() * std::log2(in0() + 2.0);
    case RelKind::Limit: return static_cast<double>(node.rows_out);
  }
  return 0.0;
}

double simulate_time_noise_free(const ExecProfile& profile, const EngineSpec& engine) {
  double work = 0.0;
  for (const auto& node : profile.nodes) {
    work += engine.per_row_cost[static_cast<size_t>(node.kind)] * work_units(node);
  }
  double parallel = std::pow(static_cast<double>(engine.workers), engine.parallel_exponent);
  return engine.startup_seconds + work / parallel;
}

double simulate_time(const ExecProfile& profile, const EngineSpec& engine, double z) {
  return simulate_time_noise_free(profile, engine) * std::exp(engine.noise_sigma * z);
}

namespace {

// presto-like per-row costs in seconds per work unit; the spark-like family
// runs at 0.7x of these
constexpr std::array<double, kNumRelKinds> kBaseCost = {
    2.0e-6,  // TableScan
    1.0e-6,  // Filter
    1.0e-6,  // Project
    4.0e-6,  // Join
    3.0e-6,  // Aggregate
    3.0e-6,  // Sort (per n log2 n unit)
    5.0e-7,  // Limit
};

std::array<double, kNumRelKinds> scaled(double f) {
  std::array<double, kNumRelKinds> out{};
  for (size_t i = 0; i < kBaseCost.size(); ++i) out[i] = kBaseCost[i] * f;
  return out;
}

}  // namespace

Fleet default_fleet(double noise_sigma) {
  Fleet fleet;
  fleet.push_back({"presto_w1", 1, 0.4, scaled(1.0), 0.8, noise_sigma});
  fleet.push_back({"presto_w4", 4, 0.6, scaled(1.0), 0.8, noise_sigma});
  fleet.push_back({"spark_w1", 1, 5.0, scaled(0.7), 0.8, noise_sigma});
  fleet.push_back({"spark_w4", 4, 6.0, scaled(0.7), 0.8, noise_sigma});
  return fleet;
}

EngineSpec presto_w8_spec(double noise_sigma) {
  return {"presto_w8", 8, 0.9, scaled(1.0), 0.8, noise_sigma};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

const char* kind_key(RelKind k) {
  switch (k) {
    case RelKind::TableScan: return "scan";
    case RelKind::Filter: return "filter";
    case RelKind::Project: return "project";
    case RelKind::Join: return "join";
    case RelKind::Aggregate: return "aggregate";
    case RelKind::Sort: return "sort";
    case RelKind::Limit: return "limit";
  }
  return "?";
}

}  // namespace

std::string fleet_to_json(const Fleet& fleet) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : fleet) {
    ordered_json j;
    j["name"] = e.name;
    j["workers"] = e.workers;
    j["startupSeconds"] = e.startup_seconds;
    ordered_json costs;
    for (int k = 0; k < kNumRelKinds; ++k) {
      costs[kind_key(static_cast<RelKind>(k))] = e.per_row_cost[static_cast<size_t>(k)];
    }
    j["perRowCost"] = std::move(costs);
    j["parallelExponent"] = e.parallel_exponent;
    j["noiseSigma"] = e.noise_sigma;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

Fleet fleet_from_json(const std::string& text) {
  ordered_json arr;
  try {
    arr = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("fleet parse error: ") + e.what());
  }
  Fleet fleet;
  try {
    for (const auto& j : arr) {
      EngineSpec e;
      e.name = j.at("name").get<std::string>();
      e.workers = j.at("workers").get<int>();
      e.startup_seconds = j.at("startupSeconds").get<double>();
      for (int k = 0; k < kNumRelKinds; ++k) {
        e.per_row_cost[static_cast<size_t>(k)] =
            j.at("perRowCost").at(kind_key(static_cast<RelKind>(k))).get<double>();
      }
      e.parallel_exponent = j.at("parallelExponent").get<double>();
      e.noise_sigma = j.at("noiseSigma").get<double>();
      if (e.workers < 1 || e.startup_seconds < 0 || e.parallel_exponent <= 0 ||
          e.parallel_exponent > 1 || e.noise_sigma < 0) {
        throw IoError("engine " + e.name + ": parameter out of range");
      }
      for (double c : e.per_row_cost) {
        if (c < 0) throw IoError("engine " + e.name + ": negative per-row cost");
      }
      fleet.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("fleet structure error: ") + e.what());
  }
  if (fleet.empty()) throw IoError("fleet is empty");
  return fleet;
}

void save_fleet(const Fleet& fleet, const std::string& path) {
  write_file(path, fleet_to_json(fleet));
}

Fleet load_fleet(const std::string& path) { return fleet_from_json(read_file(path)); }

// ---------------------------------------------------------------------------
// Labeling
// ---------------------------------------------------------------------------

std::vector<LabeledQuery> label_workload(const std::vector<std::string>& queries,
                                         const Catalog& catalog, const Fleet& fleet, uint64_t seed,
                                         const LabelOptions& opts) {
  if (fleet.empty()) throw ValidationError("label_workload: empty fleet");
  std::vector<LabeledQuery> out;
  out.reserve(queries.size());

  for (size_t qi = 0; qi < queries.size(); ++qi) {
    LogicalPlan annotated;
    ExecProfile profile;
    try {
      LogicalPlan initial = bind(parse_sql(queries[qi]), catalog);
      annotated = optimize(initial, catalog);
      execute(annotated, catalog, opts.exec, &profile);
    } catch (const ResourceCapError&) {
      continue;  // flagged and excluded
    }

    bool within_timeout = false;
    for (const auto& engine : fleet) {
      if (simulate_time_noise_free(profile, engine) <= opts.timeout_seconds) {
        within_timeout = true;
        break;
      }
    }
    if (!within_timeout) continue;

    LabeledQuery lq;
    lq.sql = queries[qi];
    lq.plan = std::move(annotated);
    for (const auto& engine : fleet) {
      // per-(query, engine) substream keyed by engine name, so adding an
      // engine never perturbs the other columns
      Rng rng(seed_stream(seed, qi, fnv64(engine.name)));
      lq.y.push_back(simulate_time(profile, engine, rng.normal()));
    }
    out.push_back(std::move(lq));
  }
  return out;
}

std::string labeled_to_jsonl(const std::vector<LabeledQuery>& labeled) {
  std::ostringstream os;
  for (const auto& lq : labeled) {
    ordered_json j;
    j["sql"] = lq.sql;
    j["plan"] = plan_to_ordered_json(lq.plan);
    j["y"] = lq.y;
    os << j.dump() << "\n";
  }
  return os.str();
}

std::vector<LabeledQuery> labeled_from_jsonl(const std::string& text) {
  std::vector<LabeledQuery> out;
  std::istringstream is(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    lineno++;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError("workload line " + std::to_string(lineno) + ": " + e.what());
    }
    LabeledQuery lq;
    try {
      lq.sql = j.at("sql").get<std::string>();
      lq.plan = plan_from_ordered_json(j.at("plan"));
      lq.y = j.at("y").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw IoError("workload line " + std::to_string(lineno) + ": " + e.what());
    }
    for (double v : lq.y) {
      if (!(v > 0)) throw IoError("workload line " + std::to_string(lineno) + ": y must be > 0");
    }
    out.push_back(std::move(lq));
  }
  return out;
}

}  // namespace xeo
