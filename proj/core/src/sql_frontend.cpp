#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>

#include "galois/errors.hpp"
#include "galois/sql_ast.hpp"

namespace galois::sql {

namespace {

enum class TokenType { Keyword, Identifier, Number, String, Symbol, End };

struct Token {
  TokenType type = TokenType::End;
  std::string text;  // keywords uppercased, identifiers as written
  int line = 1;
  int column = 1;
};

const std::map<std::string, bool>& keyword_table() {
  // true: part of the dialect; false: recognized so we can refuse it by name.
  static const std::map<std::string, bool> table = {
      {"SELECT", true},  {"DISTINCT", true}, {"FROM", true},   {"WHERE", true},
      {"GROUP", true},   {"BY", true},       {"ORDER", true},  {"LIMIT", true},
      {"AS", true},      {"AND", true},      {"ASC", true},    {"DESC", true},
      {"TRUE", true},    {"FALSE", true},    {"COUNT", true},  {"SUM", true},
      {"AVG", true},     {"MIN", true},      {"MAX", true},
      {"OR", false},     {"NOT", false},     {"LIKE", false},  {"IN", false},
      {"BETWEEN", false},{"HAVING", false},  {"UNION", false}, {"JOIN", false},
      {"INNER", false},  {"LEFT", false},    {"RIGHT", false}, {"OUTER", false},
      {"ON", false},     {"EXISTS", false},  {"CASE", false},  {"NULL", false},
      {"IS", false},     {"OFFSET", false},
  };
  return table;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_space();
      Token token;
      token.line = line_;
      token.column = column_;
      if (at_end()) {
        tokens.push_back(token);
        return tokens;
      }
      char c = peek();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        token.text = read_word();
        std::string upper = token.text;
        for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (keyword_table().count(upper)) {
          token.type = TokenType::Keyword;
          token.text = upper;
        } else {
          token.type = TokenType::Identifier;
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        token.type = TokenType::Number;
        token.text = read_number();
      } else if (c == '\'') {
        token.type = TokenType::String;
        token.text = read_string();
      } else {
        token.type = TokenType::Symbol;
        token.text = read_symbol();
      }
      tokens.push_back(std::move(token));
    }
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  std::string read_word() {
    std::string word;
    while (!at_end()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        word += advance();
      } else {
        break;
      }
    }
    return word;
  }

  std::string read_number() {
    std::string number;
    bool saw_dot = false;
    bool saw_exp = false;
    while (!at_end()) {
      char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        number += advance();
      } else if (c == '.' && !saw_dot && !saw_exp) {
        saw_dot = true;
        number += advance();
      } else if ((c == 'e' || c == 'E') && !saw_exp && !number.empty() &&
                 std::isdigit(static_cast<unsigned char>(number.back()))) {
        saw_exp = true;
        number += advance();
        if (!at_end() && (peek() == '+' || peek() == '-')) number += advance();
      } else {
        break;
      }
    }
    return number;
  }

  std::string read_string() {
    int line = line_;
    int column = column_;
    advance();  // opening quote
    std::string value;
    while (true) {
      if (at_end()) throw ParseError("unterminated string literal", line, column);
      char c = advance();
      if (c == '\'') {
        if (!at_end() && peek() == '\'') {
          value += advance();  // '' escapes a quote
        } else {
          return value;
        }
      } else {
        value += c;
      }
    }
  }

  std::string read_symbol() {
    char c = advance();
    std::string symbol(1, c);
    if (!at_end()) {
      char next = peek();
      if ((c == '<' && (next == '=' || next == '>')) || (c == '>' && next == '=') ||
          (c == '!' && next == '=')) {
        symbol += advance();
      }
    }
    return symbol;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  QueryAst run() {
    QueryAst ast;
    expect_keyword("SELECT");
    if (accept_keyword("DISTINCT")) ast.distinct = true;
    ast.items.push_back(select_item());
    while (accept_symbol(",")) ast.items.push_back(select_item());
    expect_keyword("FROM");
    ast.from.push_back(from_item());
    while (accept_symbol(",")) ast.from.push_back(from_item());
    if (accept_keyword("WHERE")) {
      ast.where.push_back(predicate());
      while (accept_keyword("AND")) ast.where.push_back(predicate());
    }
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      ast.group_by.push_back(column_ref());
      while (accept_symbol(",")) ast.group_by.push_back(column_ref());
    }
    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      ast.order_by.push_back(order_item());
      while (accept_symbol(",")) ast.order_by.push_back(order_item());
    }
    if (accept_keyword("LIMIT")) {
      const Token& token = expect(TokenType::Number, "LIMIT count");
      std::int64_t n = 0;
      auto [ptr, ec] = std::from_chars(token.text.data(), token.text.data() + token.text.size(), n);
      if (ec != std::errc() || ptr != token.text.data() + token.text.size()) {
        throw ParseError("LIMIT expects an integer", token.line, token.column);
      }
      if (n < 0) throw ParseError("LIMIT must be non-negative", token.line, token.column);
      ast.limit = n;
    }
    accept_symbol(";");
    const Token& tail = current();
    if (tail.type != TokenType::End) {
      refuse_if_unsupported(tail);
      refuse_arithmetic(tail);
      throw ParseError("unexpected trailing input: " + tail.text, tail.line, tail.column);
    }
    return ast;
  }

 private:
  const Token& current() const { return tokens_[pos_]; }

  const Token& advance() { return tokens_[pos_++]; }

  bool check_keyword(const std::string& word) const {
    return current().type == TokenType::Keyword && current().text == word;
  }

  bool accept_keyword(const std::string& word) {
    if (!check_keyword(word)) return false;
    ++pos_;
    return true;
  }

  void expect_keyword(const std::string& word) {
    if (!accept_keyword(word)) {
      const Token& token = current();
      refuse_if_unsupported(token);
      throw ParseError("expected " + word + ", got '" + describe(token) + "'", token.line,
                       token.column);
    }
  }

  bool accept_symbol(const std::string& symbol) {
    if (current().type != TokenType::Symbol || current().text != symbol) return false;
    ++pos_;
    return true;
  }

  const Token& expect(TokenType type, const std::string& what) {
    const Token& token = current();
    if (token.type != type) {
      refuse_if_unsupported(token);
      throw ParseError("expected " + what + ", got '" + describe(token) + "'", token.line,
                       token.column);
    }
    return advance();
  }

  static std::string describe(const Token& token) {
    return token.type == TokenType::End ? "end of input" : token.text;
  }

  // Keywords we recognize but refuse get a targeted diagnostic instead of a
  // generic syntax error.
  void refuse_if_unsupported(const Token& token) const {
    if (token.type != TokenType::Keyword) return;
    auto entry = keyword_table().find(token.text);
    if (entry != keyword_table().end() && !entry->second) {
      throw UnsupportedError(token.text, token.line, token.column);
    }
  }

  // Called where an expression has just ended, so a following operator can
  // only mean arithmetic. A leading '-' on a literal never reaches here.
  void refuse_arithmetic(const Token& token) const {
    if (token.type != TokenType::Symbol) return;
    if (token.text == "+" || token.text == "-" || token.text == "*" ||
        token.text == "/" || token.text == "%") {
      throw UnsupportedError("arithmetic expressions", token.line, token.column);
    }
  }

  std::string identifier(const std::string& what) {
    const Token& token = current();
    if (token.type != TokenType::Identifier) {
      refuse_if_unsupported(token);
      throw ParseError("expected " + what + ", got '" + describe(token) + "'", token.line,
                       token.column);
    }
    return advance().text;
  }

  ColumnRef column_ref() {
    ColumnRef ref;
    std::string first = identifier("column name");
    if (accept_symbol(".")) {
      ref.qualifier = first;
      ref.name = identifier("column name");
    } else {
      ref.name = first;
    }
    return ref;
  }

  std::optional<AggFn> aggregate_keyword() {
    if (accept_keyword("COUNT")) return AggFn::Count;
    if (accept_keyword("SUM")) return AggFn::Sum;
    if (accept_keyword("AVG")) return AggFn::Avg;
    if (accept_keyword("MIN")) return AggFn::Min;
    if (accept_keyword("MAX")) return AggFn::Max;
    return std::nullopt;
  }

  SelectItem select_item() {
    SelectItem item;
    if (accept_symbol("*")) {
      item.star = true;
      return item;  // bare * takes no alias
    }
    const Token& head = current();
    if (auto agg = aggregate_keyword()) {
      item.agg = agg;
      if (!accept_symbol("(")) {
        throw ParseError("aggregate " + std::string(to_string(*agg)) + " needs parentheses",
                         head.line, head.column);
      }
      if (accept_symbol("*")) {
        if (*agg != AggFn::Count) {
          throw ParseError("only COUNT accepts *", head.line, head.column);
        }
        item.star = true;
      } else {
        if (check_keyword("DISTINCT")) {
          throw UnsupportedError("DISTINCT inside aggregates", current().line, current().column);
        }
        item.column = column_ref();
      }
      if (!accept_symbol(")")) {
        const Token& token = current();
        throw ParseError("expected ) after aggregate argument", token.line, token.column);
      }
    } else {
      item.column = column_ref();
      if (accept_symbol("(")) {
        throw UnsupportedError("function calls other than COUNT, SUM, AVG, MIN, MAX",
                               head.line, head.column);
      }
    }
    refuse_arithmetic(current());
    if (accept_keyword("AS")) item.alias = identifier("alias");
    return item;
  }

  FromItem from_item() {
    const Token& head = current();
    if (head.type == TokenType::Symbol && head.text == "(") {
      throw UnsupportedError("subqueries", head.line, head.column);
    }
    FromItem item;
    item.relation = identifier("relation name");
    if (accept_symbol(".")) {
      throw ParseError(
          "qualified relation names are not supported; sources are declared in the schema",
          current().line, current().column);
    }
    if (accept_keyword("AS")) {
      item.alias = identifier("alias");
    } else if (current().type == TokenType::Identifier) {
      item.alias = advance().text;
    }
    return item;
  }

  CompareOp compare_op() {
    const Token& token = current();
    if (token.type != TokenType::Symbol) {
      refuse_if_unsupported(token);
      throw ParseError("expected comparison operator, got '" + describe(token) + "'",
                       token.line, token.column);
    }
    ++pos_;
    if (token.text == "=") return CompareOp::Eq;
    if (token.text == "!=" || token.text == "<>") return CompareOp::Ne;
    if (token.text == "<") return CompareOp::Lt;
    if (token.text == "<=") return CompareOp::Le;
    if (token.text == ">") return CompareOp::Gt;
    if (token.text == ">=") return CompareOp::Ge;
    throw ParseError("expected comparison operator, got '" + token.text + "'", token.line,
                     token.column);
  }

  Cell number_literal(const Token& token, bool negative) {
    if (token.text.find('.') != std::string::npos || token.text.find('e') != std::string::npos ||
        token.text.find('E') != std::string::npos) {
      double value = std::strtod(token.text.c_str(), nullptr);
      return Cell::real(negative ? -value : value);
    }
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.text.data(), token.text.data() + token.text.size(), value);
    if (ec != std::errc() || ptr != token.text.data() + token.text.size()) {
      throw ParseError("integer literal out of range: " + token.text, token.line, token.column);
    }
    return Cell::integer(negative ? -value : value);
  }

  Predicate predicate() {
    Predicate pred;
    const Token& head = current();
    if (head.type == TokenType::Symbol && head.text == "(") {
      throw UnsupportedError("parenthesized conditions", head.line, head.column);
    }
    pred.lhs = column_ref();
    pred.op = compare_op();
    const Token& rhs = current();
    switch (rhs.type) {
      case TokenType::String:
        ++pos_;
        if (trim_copy(rhs.text).empty()) {
          throw ParseError("empty string literal", rhs.line, rhs.column);
        }
        pred.rhs = Cell::text(rhs.text);
        break;
      case TokenType::Number:
        ++pos_;
        pred.rhs = number_literal(rhs, false);
        break;
      case TokenType::Symbol:
        if (rhs.text == "-") {
          ++pos_;
          pred.rhs = number_literal(expect(TokenType::Number, "number"), true);
          break;
        }
        throw ParseError("expected literal or column, got '" + rhs.text + "'", rhs.line,
                         rhs.column);
      case TokenType::Keyword:
        if (rhs.text == "TRUE" || rhs.text == "FALSE") {
          ++pos_;
          pred.rhs = Cell::boolean(rhs.text == "TRUE");
          break;
        }
        refuse_if_unsupported(rhs);
        throw ParseError("expected literal or column, got '" + rhs.text + "'", rhs.line,
                         rhs.column);
      case TokenType::Identifier:
        pred.rhs = column_ref();
        break;
      case TokenType::End:
        throw ParseError("expected literal or column, got end of input", rhs.line, rhs.column);
    }
    refuse_arithmetic(current());
    return pred;
  }

  OrderItem order_item() {
    OrderItem item;
    item.column = column_ref();
    if (accept_keyword("DESC")) {
      item.descending = true;
    } else {
      accept_keyword("ASC");
    }
    return item;
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

std::string quote_string(const std::string& value) {
  std::string out = "'";
  for (char c : value) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

std::string render_literal(const Cell& value) {
  if (value.is_text()) return quote_string(value.as_text());
  if (value.is_bool()) return value.as_bool() ? "TRUE" : "FALSE";
  return value.to_text();
}

std::string render_select_item(const SelectItem& item) {
  std::string out;
  if (item.agg) {
    out += to_string(*item.agg);
    out += '(';
    out += item.star ? "*" : item.column->display();
    out += ')';
  } else if (item.star) {
    out += '*';
  } else {
    out += item.column->display();
  }
  if (item.alias) {
    out += " AS ";
    out += *item.alias;
  }
  return out;
}

}  // namespace

const char* to_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "=";
}

const char* to_string(AggFn fn) {
  switch (fn) {
    case AggFn::Count: return "COUNT";
    case AggFn::Sum: return "SUM";
    case AggFn::Avg: return "AVG";
    case AggFn::Min: return "MIN";
    case AggFn::Max: return "MAX";
  }
  return "COUNT";
}

QueryAst parse(std::string_view text) {
  Lexer lexer(text);
  Parser parser(lexer.run());
  return parser.run();
}

std::string render(const QueryAst& ast) {
  std::string out = "SELECT ";
  if (ast.distinct) out += "DISTINCT ";
  for (size_t i = 0; i < ast.items.size(); ++i) {
    if (i) out += ", ";
    out += render_select_item(ast.items[i]);
  }
  out += " FROM ";
  for (size_t i = 0; i < ast.from.size(); ++i) {
    if (i) out += ", ";
    out += ast.from[i].relation;
    if (ast.from[i].alias) out += " AS " + *ast.from[i].alias;
  }
  if (!ast.where.empty()) {
    out += " WHERE ";
    for (size_t i = 0; i < ast.where.size(); ++i) {
      if (i) out += " AND ";
      const Predicate& pred = ast.where[i];
      out += pred.lhs.display();
      out += ' ';
      out += to_symbol(pred.op);
      out += ' ';
      if (pred.rhs_is_column()) {
        out += std::get<ColumnRef>(pred.rhs).display();
      } else {
        out += render_literal(std::get<Cell>(pred.rhs));
      }
    }
  }
  if (!ast.group_by.empty()) {
    out += " GROUP BY ";
    for (size_t i = 0; i < ast.group_by.size(); ++i) {
      if (i) out += ", ";
      out += ast.group_by[i].display();
    }
  }
  if (!ast.order_by.empty()) {
    out += " ORDER BY ";
    for (size_t i = 0; i < ast.order_by.size(); ++i) {
      if (i) out += ", ";
      out += ast.order_by[i].column.display();
      if (ast.order_by[i].descending) out += " DESC";
    }
  }
  if (ast.limit) {
    out += " LIMIT " + std::to_string(*ast.limit);
  }
  return out;
}

}  // namespace galois::sql
