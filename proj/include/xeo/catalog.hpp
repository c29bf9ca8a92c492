#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xeo/value.hpp"

namespace xeo {

struct ColumnStats {
  int64_t num_nulls = 0;
  int64_t num_distinct = 1;
  double avg_col_size = 0.0;
  int64_t max_col_size = 0;
};

struct ColumnDef {
  std::string name;
  DataType type = DataType::Integer;
  ColumnStats stats;
};

struct TableStats {
  int64_t num_rows = 0;
  double avg_row_size = 0.0;
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  TableStats stats;
  // column-major row store; empty when the catalog carries schema/stats only
  std::vector<std::vector<Value>> data;
  bool has_data = false;

  int column_index(const std::string& col) const;  // -1 when absent
};

// child.column references parent.column
struct FkEdge {
  std::string child_table;
  std::string child_column;
  std::string parent_table;
  std::string parent_column;
};

struct Catalog {
  std::string name;
  std::vector<TableDef> tables;
  std::vector<FkEdge> fk_edges;

  const TableDef* find_table(const std::string& name) const;
  const ColumnDef* find_column(const std::string& table, const std::string& column) const;
};

// Weights over the five non-key value types a generated column may take.
struct TypeMix {
  double integer = 0.3;
  double floating = 0.15;
  double decimal = 0.1;
  double varchar = 0.2;
  double boolean = 0.05;
  double date = 0.1;
  double timestamp = 0.1;
};

struct CatalogSpec {
  std::string name = "synthetic";
  int n_tables = 4;
  int64_t min_rows = 100;
  int64_t max_rows = 1000;
  // fraction of the extra fk edges (beyond the spanning tree) to materialize,
  // relative to the number of candidate table pairs
  double fk_density = 0.3;
  TypeMix type_mix;
  int min_extra_columns = 2;
  int max_extra_columns = 6;
  double null_fraction = 0.05;   // per nullable column
  double zipf_fraction = 0.3;    // share of integer/varchar columns with skew
  bool with_data = true;
};

// Deterministic synthetic catalog: connected fk graph, materialized rows,
// statistics computed exactly from the generated data.
Catalog generate_catalog(const CatalogSpec& spec, uint64_t seed);

// Throws ValidationError naming the offending entity.
void validate_catalog(const Catalog& catalog);

// Recompute a column's statistics by a full scan of the materialized data.
ColumnStats scan_column_stats(const TableDef& table, int col);

std::string catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const std::string& text);

void save_catalog(const Catalog& catalog, const std::string& path);
Catalog load_catalog(const std::string& path);

}  // namespace xeo
