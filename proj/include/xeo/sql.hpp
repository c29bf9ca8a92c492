#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xeo/plan.hpp"

namespace xeo {
namespace sql {

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class Tok : uint8_t {
  End, Ident, IntLit, FloatLit, StringLit,
  Comma, Dot, LParen, RParen, Star, Semicolon,
  Eq, Neq, Lt, Le, Gt, Ge, Plus, Minus, Slash,
  KwSelect, KwFrom, KwWhere, KwJoin, KwOn, KwGroup, KwBy, KwHaving, KwOrder,
  KwLimit, KwAnd, KwOr, KwNot, KwIn, KwExists, KwBetween, KwLike, KwDistinct,
  KwSum, KwCount, KwMin, KwMax, KwAvg, KwYear,
  KwTrue, KwFalse, KwNull, KwDate, KwTimestamp, KwAsc
};

struct Token {
  Tok type = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(const std::string& text);  // throws ParseError

// ---------------------------------------------------------------------------
// AST — identifiers stay unresolved until bind()
// ---------------------------------------------------------------------------

struct SelectStmt;

struct ColumnRef {
  std::string table;  // empty when unqualified
  std::string column;
  int line = 1, col = 1;

  std::string display() const { return table.empty() ? column : table + "." + column; }
};

struct AstExpr {
  enum class Kind : uint8_t {
    Column, Literal, FuncCall, Binary, Unary, Between, InList, InSubquery, Exists
  };
  Kind kind = Kind::Literal;

  ColumnRef column;                       // Column
  DataType literal_type = DataType::Integer;
  Value literal_value{};                  // Literal
  std::string op;                         // Binary/Unary op or FuncCall name
  bool star = false;                      // COUNT(*)
  bool distinct = false;                  // COUNT(DISTINCT c)
  std::vector<AstExpr> args;              // children / IN list (args[0] is the probe)
  std::shared_ptr<SelectStmt> subquery;   // InSubquery / Exists
  int line = 1, col = 1;
};

struct JoinClause {
  std::string table;
  AstExpr condition;
  int line = 1, col = 1;
};

struct SelectStmt {
  bool select_star = false;
  std::vector<AstExpr> select_items;  // Column or FuncCall
  std::string from_table;
  int from_line = 1, from_col = 1;
  std::vector<JoinClause> joins;
  std::optional<AstExpr> where;
  std::vector<ColumnRef> group_by;
  std::optional<AstExpr> having;
  std::vector<ColumnRef> order_by;
  std::optional<int64_t> limit;
};

}  // namespace sql

// Grammar-driven parse of the supported SQL subset; positions are 1-based.
sql::SelectStmt parse_sql(const std::string& text);

// Resolve names against the catalog and build the initial logical plan whose
// operation order follows the SQL text. IN/EXISTS subqueries are rewritten to
// joins here. The result always passes validate_plan.
LogicalPlan bind(const sql::SelectStmt& stmt, const Catalog& catalog);

}  // namespace xeo
