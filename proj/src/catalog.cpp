#include "xeo/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "xeo/json_io.hpp"

namespace xeo {

int TableDef::column_index(const std::string& col) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == col) return static_cast<int>(i);
  }
  return -1;
}

const TableDef* Catalog::find_table(const std::string& tname) const {
  for (const auto& t : tables) {
    if (t.name == tname) return &t;
  }
  return nullptr;
}

const ColumnDef* Catalog::find_column(const std::string& table, const std::string& column) const {
  const TableDef* t = find_table(table);
  if (!t) return nullptr;
  int i = t->column_index(column);
  return i < 0 ? nullptr : &t->columns[i];
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

const char* kWordPool[] = {
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india",
    "juliet", "kilo", "lima", "mike", "november", "oscar", "papa", "quebec", "romeo",
    "sierra", "tango", "uniform", "victor", "whiskey", "xray", "yankee", "zulu", "amber",
    "basalt", "cobalt", "dune", "ember", "fjord", "garnet", "harbor", "ivory", "jade",
    "karst", "lagoon", "marble", "nickel", "onyx", "pearl", "quartz", "reef", "slate",
    "topaz", "umber", "velvet", "willow", "zephyr"};

constexpr int kWordPoolSize = static_cast<int>(sizeof(kWordPool) / sizeof(kWordPool[0]));

constexpr int64_t kDateLo = 17532;       // 2018-01-01
constexpr int64_t kDateHi = 19722;       // 2023-12-31
constexpr int64_t kTsLo = kDateLo * 86400;
constexpr int64_t kTsHi = kDateHi * 86400 + 86399;

DataType pick_type(const TypeMix& mix, Rng& rng) {
  double w[7] = {mix.integer, mix.floating, mix.decimal, mix.varchar,
                 mix.boolean, mix.date,     mix.timestamp};
  double total = 0;
  for (double x : w) total += x;
  double r = rng.uniform01() * total;
  for (int i = 0; i < 7; ++i) {
    if (r < w[i]) return static_cast<DataType>(i);
    r -= w[i];
  }
  return DataType::Integer;
}

// index into [0, n) with P(i) proportional to 1/(i+1)^s
size_t zipf_index(size_t n, double s, Rng& rng, const std::vector<double>& cumulative) {
  (void)n;
  (void)s;
  double r = rng.uniform01() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
  return static_cast<size_t>(it - cumulative.begin());
}

std::vector<double> zipf_cumulative(size_t n, double s) {
  std::vector<double> c(n);
  double acc = 0;
  for (size_t i = 0; i < n; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i + 1), s);
    c[i] = acc;
  }
  return c;
}

std::vector<Value> generate_column(DataType type, int64_t rows, double null_fraction,
                                   bool zipf, Rng& rng) {
  std::vector<Value> out(static_cast<size_t>(rows));
  // distinct-value pool sized well under the row count so equality predicates
  // have meaningful selectivity
  int64_t pool_target = std::max<int64_t>(2, std::min<int64_t>(rows, rng.uniform_int(5, 200)));

  std::vector<Value> pool;
  switch (type) {
    case DataType::Integer: {
      int64_t base = rng.uniform_int(0, 10000);
      for (int64_t i = 0; i < pool_target; ++i) pool.push_back(base + i * rng.uniform_int(1, 3) + i);
      break;
    }
    case DataType::Float: {
      for (int64_t i = 0; i < pool_target; ++i) {
        double v = std::round(rng.uniform01() * 1e6) / 1e3;
        pool.push_back(v);
      }
      break;
    }
    case DataType::Decimal: {
      for (int64_t i = 0; i < pool_target; ++i) {
        double v = std::round(rng.uniform01() * 100000.0) / 100.0;
        pool.push_back(v);
      }
      break;
    }
    case DataType::Varchar: {
      int64_t words = std::min<int64_t>(pool_target, 400);
      for (int64_t i = 0; i < words; ++i) {
        std::string w = kWordPool[rng.index(kWordPoolSize)];
        if (rng.bernoulli(0.7)) w += "_" + std::to_string(rng.uniform_int(0, 99));
        pool.push_back(w);
      }
      break;
    }
    case DataType::Boolean: {
      pool.push_back(true);
      pool.push_back(false);
      break;
    }
    case DataType::Date: {
      for (int64_t i = 0; i < pool_target; ++i) pool.push_back(rng.uniform_int(kDateLo, kDateHi));
      break;
    }
    case DataType::Timestamp: {
      for (int64_t i = 0; i < pool_target; ++i) pool.push_back(rng.uniform_int(kTsLo, kTsHi));
      break;
    }
  }

  std::vector<double> cumulative;
  if (zipf) cumulative = zipf_cumulative(pool.size(), 1.1);

  for (int64_t r = 0; r < rows; ++r) {
    if (null_fraction > 0 && rng.bernoulli(null_fraction)) {
      out[r] = std::monostate{};
    } else if (zipf) {
      out[r] = pool[zipf_index(pool.size(), 1.1, rng, cumulative)];
    } else {
      out[r] = pool[rng.index(pool.size())];
    }
  }

  // keep at least one non-null value per column
  bool all_null = true;
  for (const auto& v : out) {
    if (!is_null(v)) {
      all_null = false;
      break;
    }
  }
  if (all_null && !out.empty()) out[0] = pool[0];
  return out;
}

void compute_stats(TableDef& table) {
  table.stats.num_rows = table.data.empty() ? 0 : static_cast<int64_t>(table.data[0].size());
  double row_size = 0;
  for (size_t c = 0; c < table.columns.size(); ++c) {
    table.columns[c].stats = scan_column_stats(table, static_cast<int>(c));
    row_size += table.columns[c].stats.avg_col_size;
  }
  table.stats.avg_row_size = row_size;
}

}  // namespace

ColumnStats scan_column_stats(const TableDef& table, int col) {
  ColumnStats s;
  const auto& data = table.data[static_cast<size_t>(col)];
  DataType type = table.columns[static_cast<size_t>(col)].type;
  std::set<std::string> distinct_str;
  std::set<int64_t> distinct_i64;
  std::set<double> distinct_f64;
  std::set<bool> distinct_bool;
  double size_sum = 0;
  int64_t size_max = 0;
  int64_t non_null = 0;
  for (const auto& v : data) {
    if (is_null(v)) {
      s.num_nulls++;
      continue;
    }
    non_null++;
    double sz = value_byte_size(type, v);
    size_sum += sz;
    size_max = std::max<int64_t>(size_max, static_cast<int64_t>(sz));
    switch (v.index()) {
      case 1: distinct_i64.insert(std::get<int64_t>(v)); break;
      case 2: distinct_f64.insert(std::get<double>(v)); break;
      case 3: distinct_str.insert(std::get<std::string>(v)); break;
      case 4: distinct_bool.insert(std::get<bool>(v)); break;
      default: break;
    }
  }
  s.num_distinct = static_cast<int64_t>(distinct_str.size() + distinct_i64.size() +
                                        distinct_f64.size() + distinct_bool.size());
  if (s.num_distinct == 0) s.num_distinct = 1;
  s.avg_col_size = non_null > 0 ? size_sum / static_cast<double>(non_null)
                                : static_cast<double>(std::max<int64_t>(fixed_type_width(type), 0));
  if (type != DataType::Varchar) s.avg_col_size = static_cast<double>(fixed_type_width(type));
  s.max_col_size = type == DataType::Varchar ? size_max : fixed_type_width(type);
  if (s.max_col_size == 0) s.max_col_size = 1;
  return s;
}

Catalog generate_catalog(const CatalogSpec& spec, uint64_t seed) {
  if (spec.n_tables < 2) throw ValidationError("catalog spec: need at least 2 tables");
  if (spec.min_rows <= 0 || spec.max_rows < spec.min_rows) {
    throw ValidationError("catalog spec: rows range must be positive");
  }
  if (spec.fk_density < 0.0 || spec.fk_density > 1.0) {
    throw ValidationError("catalog spec: fkDensity must be in [0,1]");
  }

  Rng rng(seed_stream(seed, fnv64("catalog"), static_cast<uint64_t>(spec.n_tables)));
  Catalog cat;
  cat.name = spec.name;

  int n = spec.n_tables;
  cat.tables.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    cat.tables[static_cast<size_t>(i)].name = "t" + std::to_string(i);
  }

  // fk shape: spanning tree over tables plus density-controlled extras;
  // edges point child -> parent
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) {
    int parent = static_cast<int>(rng.index(static_cast<size_t>(i)));
    edges.emplace_back(i, parent);
  }
  std::vector<std::pair<int, int>> extra;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      bool in_tree = false;
      for (auto& e : edges) {
        if ((e.first == a && e.second == b) || (e.first == b && e.second == a)) in_tree = true;
      }
      if (!in_tree && a > b) extra.emplace_back(a, b);
    }
  }
  rng.shuffle(extra);
  size_t extra_count = static_cast<size_t>(std::floor(spec.fk_density * static_cast<double>(extra.size())));
  for (size_t i = 0; i < extra_count; ++i) edges.push_back(extra[i]);

  // per-table row counts and key columns
  std::vector<int64_t> rows(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) rows[static_cast<size_t>(i)] = rng.uniform_int(spec.min_rows, spec.max_rows);

  // each table gets a primary key column "<name>_id" holding 0..rows-1
  for (int i = 0; i < n; ++i) {
    TableDef& t = cat.tables[static_cast<size_t>(i)];
    ColumnDef pk;
    pk.name = t.name + "_id";
    pk.type = DataType::Integer;
    t.columns.push_back(pk);
    if (spec.with_data) {
      std::vector<Value> keys(static_cast<size_t>(rows[static_cast<size_t>(i)]));
      for (int64_t r = 0; r < rows[static_cast<size_t>(i)]; ++r) keys[static_cast<size_t>(r)] = r;
      t.data.push_back(std::move(keys));
      t.has_data = true;
    }
  }

  // fk columns sample parent keys, so joins are never empty
  std::map<int, int> fk_counter;
  for (auto [child, parent] : edges) {
    TableDef& ct = cat.tables[static_cast<size_t>(child)];
    const TableDef& pt = cat.tables[static_cast<size_t>(parent)];
    std::string col_name = pt.name + "_fk";
    if (fk_counter.count(child) && ct.column_index(col_name) >= 0) {
      col_name += std::to_string(fk_counter[child]);
    }
    fk_counter[child]++;
    ColumnDef fk;
    fk.name = col_name;
    fk.type = DataType::Integer;
    ct.columns.push_back(fk);
    if (spec.with_data) {
      int64_t parent_rows = rows[static_cast<size_t>(parent)];
      bool skewed = rng.bernoulli(spec.zipf_fraction);
      std::vector<double> cumulative;
      if (skewed) cumulative = zipf_cumulative(static_cast<size_t>(parent_rows), 1.05);
      std::vector<Value> vals(static_cast<size_t>(rows[static_cast<size_t>(child)]));
      for (auto& v : vals) {
        int64_t k = skewed
                        ? static_cast<int64_t>(zipf_index(static_cast<size_t>(parent_rows), 1.05, rng, cumulative))
                        : rng.uniform_int(0, parent_rows - 1);
        v = k;
      }
      ct.data.push_back(std::move(vals));
    }
    cat.fk_edges.push_back({ct.name, col_name, pt.name, pt.name + "_id"});
  }

  // payload columns
  const char* payload_names[] = {"a", "b", "c", "d", "e", "f", "g", "h", "k", "m"};
  for (int i = 0; i < n; ++i) {
    TableDef& t = cat.tables[static_cast<size_t>(i)];
    int extra_cols = static_cast<int>(rng.uniform_int(spec.min_extra_columns, spec.max_extra_columns));
    for (int c = 0; c < extra_cols; ++c) {
      ColumnDef col;
      col.name = payload_names[c % 10];
      if (c >= 10) col.name += std::to_string(c / 10);
      col.type = pick_type(spec.type_mix, rng);
      t.columns.push_back(col);
      if (spec.with_data) {
        bool zipf = (col.type == DataType::Integer || col.type == DataType::Varchar) &&
                    rng.bernoulli(spec.zipf_fraction);
        t.data.push_back(generate_column(col.type, rows[static_cast<size_t>(i)],
                                         spec.null_fraction, zipf, rng));
      }
    }
  }

  if (spec.with_data) {
    for (auto& t : cat.tables) compute_stats(t);
  } else {
    for (size_t i = 0; i < cat.tables.size(); ++i) {
      TableDef& t = cat.tables[i];
      t.stats.num_rows = rows[i];
      double row_size = 0;
      for (auto& c : t.columns) {
        c.stats.num_distinct = std::max<int64_t>(1, rows[i] / 10);
        c.stats.avg_col_size = static_cast<double>(std::abs(fixed_type_width(c.type)));
        c.stats.max_col_size = std::abs(fixed_type_width(c.type));
        row_size += c.stats.avg_col_size;
      }
      t.stats.avg_row_size = row_size;
    }
  }

  validate_catalog(cat);
  return cat;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void validate_catalog(const Catalog& cat) {
  std::set<std::string> names;
  for (const auto& t : cat.tables) {
    if (!names.insert(t.name).second) {
      throw ValidationError("duplicate table name: " + t.name);
    }
    std::set<std::string> cols;
    for (const auto& c : t.columns) {
      if (!cols.insert(c.name).second) {
        throw ValidationError("duplicate column " + t.name + "." + c.name);
      }
      if (c.stats.num_nulls > t.stats.num_rows) {
        throw ValidationError("column " + t.name + "." + c.name + ": numNulls " +
                              std::to_string(c.stats.num_nulls) + " exceeds numRows " +
                              std::to_string(t.stats.num_rows));
      }
      if (c.stats.num_distinct < 1 ||
          c.stats.num_distinct > t.stats.num_rows - c.stats.num_nulls + 1) {
        throw ValidationError("column " + t.name + "." + c.name + ": numDistinctVals " +
                              std::to_string(c.stats.num_distinct) + " out of range");
      }
      if (c.stats.avg_col_size > static_cast<double>(c.stats.max_col_size) + 1e-9) {
        throw ValidationError("column " + t.name + "." + c.name +
                              ": avgColSize exceeds maxColSize");
      }
    }
    if (t.has_data) {
      if (t.data.size() != t.columns.size()) {
        throw ValidationError("table " + t.name + ": data column count mismatch");
      }
      for (const auto& col : t.data) {
        if (static_cast<int64_t>(col.size()) != t.stats.num_rows) {
          throw ValidationError("table " + t.name + ": numRows does not match data");
        }
      }
    }
    double sum = 0;
    for (const auto& c : t.columns) sum += c.stats.avg_col_size;
    if (std::fabs(sum - t.stats.avg_row_size) > 1.0) {
      throw ValidationError("table " + t.name + ": avgRowSize inconsistent with column sizes");
    }
  }
  for (const auto& e : cat.fk_edges) {
    const ColumnDef* cc = cat.find_column(e.child_table, e.child_column);
    const ColumnDef* pc = cat.find_column(e.parent_table, e.parent_column);
    std::string label = e.child_table + "." + e.child_column + " -> " + e.parent_table + "." +
                        e.parent_column;
    if (!cc || !pc) throw ValidationError("fk edge references missing column: " + label);
    if (cc->type != pc->type) throw ValidationError("fk edge type mismatch: " + label);
  }
  // fk graph connectivity (ignoring direction)
  if (cat.tables.size() > 1) {
    std::map<std::string, int> idx;
    for (size_t i = 0; i < cat.tables.size(); ++i) idx[cat.tables[i].name] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(cat.tables.size());
    for (const auto& e : cat.fk_edges) {
      adj[static_cast<size_t>(idx[e.child_table])].push_back(idx[e.parent_table]);
      adj[static_cast<size_t>(idx[e.parent_table])].push_back(idx[e.child_table]);
    }
    std::vector<bool> seen(cat.tables.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    size_t count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : adj[static_cast<size_t>(v)]) {
        if (!seen[static_cast<size_t>(u)]) {
          seen[static_cast<size_t>(u)] = true;
          count++;
          stack.push_back(u);
        }
      }
    }
    if (count != cat.tables.size()) throw ValidationError("fk graph is not connected");
  }
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

std::string catalog_to_json(const Catalog& cat) {
  ordered_json root;
  root["name"] = cat.name;
  root["tables"] = ordered_json::array();
  for (const auto& t : cat.tables) {
    ordered_json jt;
    jt["name"] = t.name;
    jt["columns"] = ordered_json::array();
    for (const auto& c : t.columns) {
      ordered_json jc;
      jc["name"] = c.name;
      jc["dataType"] = to_string(c.type);
      jc["stats"] = {{"numNulls", c.stats.num_nulls},
                     {"numDistinctVals", c.stats.num_distinct},
                     {"avgColSize", c.stats.avg_col_size},
                     {"maxColSize", c.stats.max_col_size}};
      jt["columns"].push_back(jc);
    }
    jt["stats"] = {{"numRows", t.stats.num_rows}, {"avgRowSize", t.stats.avg_row_size}};
    if (t.has_data) {
      ordered_json jd = ordered_json::object();
      for (size_t c = 0; c < t.columns.size(); ++c) {
        ordered_json col = ordered_json::array();
        for (const auto& v : t.data[c]) col.push_back(value_to_json(t.columns[c].type, v));
        jd[t.columns[c].name] = std::move(col);
      }
      jt["data"] = std::move(jd);
    }
    root["tables"].push_back(std::move(jt));
  }
  root["fk_edges"] = ordered_json::array();
  for (const auto& e : cat.fk_edges) {
    root["fk_edges"].push_back(ordered_json::array(
        {e.child_table + "." + e.child_column, e.parent_table + "." + e.parent_column}));
  }
  return root.dump(2) + "\n";
}

Catalog catalog_from_json(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("catalog parse error: ") + e.what());
  }
  Catalog cat;
  try {
    cat.name = root.at("name").get<std::string>();
    for (const auto& jt : root.at("tables")) {
      TableDef t;
      t.name = jt.at("name").get<std::string>();
      for (const auto& jc : jt.at("columns")) {
        ColumnDef c;
        c.name = jc.at("name").get<std::string>();
        c.type = data_type_from_string(jc.at("dataType").get<std::string>());
        const auto& js = jc.at("stats");
        c.stats.num_nulls = js.at("numNulls").get<int64_t>();
        c.stats.num_distinct = js.at("numDistinctVals").get<int64_t>();
        c.stats.avg_col_size = js.at("avgColSize").get<double>();
        c.stats.max_col_size = js.at("maxColSize").get<int64_t>();
        t.columns.push_back(std::move(c));
      }
      t.stats.num_rows = jt.at("stats").at("numRows").get<int64_t>();
      t.stats.avg_row_size = jt.at("stats").at("avgRowSize").get<double>();
      if (jt.contains("data")) {
        t.has_data = true;
        for (const auto& c : t.columns) {
          if (!jt["data"].contains(c.name)) {
            throw IoError("table " + t.name + ": data missing column " + c.name);
          }
          std::vector<Value> col;
          for (const auto& jv : jt["data"][c.name]) col.push_back(value_from_json(c.type, jv));
          t.data.push_back(std::move(col));
        }
      }
      cat.tables.push_back(std::move(t));
    }
    for (const auto& je : root.at("fk_edges")) {
      auto split = [](const std::string& s) -> std::pair<std::string, std::string> {
        auto pos = s.find('.');
        if (pos == std::string::npos) throw IoError("fk endpoint must be table.column: " + s);
        return {s.substr(0, pos), s.substr(pos + 1)};
      };
      auto [ct, cc] = split(je.at(0).get<std::string>());
      auto [pt, pc] = split(je.at(1).get<std::string>());
      cat.fk_edges.push_back({ct, cc, pt, pc});
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("catalog structure error: ") + e.what());
  }
  validate_catalog(cat);
  return cat;
}

void save_catalog(const Catalog& cat, const std::string& path) {
  write_file(path, catalog_to_json(cat));
}

Catalog load_catalog(const std::string& path) { return catalog_from_json(read_file(path)); }

}  // namespace xeo
