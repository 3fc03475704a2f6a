#include "stldro/stl/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <vector>

namespace stldro::stl {

namespace {

struct Token {
  enum class Type { True, Ident, Affine, Ball, Number, Not, And, Or, U, F, G,
                    LParen, RParen, LBracket, RBracket, Comma, Semicolon, End };
  Type type;
  std::string text;
  double number = 0.0;
  int pos = 0;
};

const char* token_name(Token::Type t) {
  switch (t) {
    case Token::Type::True: return "'true'";
    case Token::Type::Ident: return "identifier";
    case Token::Type::Affine: return "'affine'";
    case Token::Type::Ball: return "'ball'";
    case Token::Type::Number: return "number";
    case Token::Type::Not: return "'!'";
    case Token::Type::And: return "'&'";
    case Token::Type::Or: return "'|'";
    case Token::Type::U: return "'U'";
    case Token::Type::F: return "'F'";
    case Token::Type::G: return "'G'";
    case Token::Type::LParen: return "'('";
    case Token::Type::RParen: return "')'";
    case Token::Type::LBracket: return "'['";
    case Token::Type::RBracket: return "']'";
    case Token::Type::Comma: return "','";
    case Token::Type::Semicolon: return "';'";
    case Token::Type::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const int pos = static_cast<int>(i);
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    auto push = [&](Token::Type t, std::size_t len) {
      out.push_back({t, text.substr(i, len), 0.0, pos});
      i += len;
    };
    switch (c) {
      case '!': push(Token::Type::Not, 1); continue;
      case '&': push(Token::Type::And, 1); continue;
      case '|': push(Token::Type::Or, 1); continue;
      case '(': push(Token::Type::LParen, 1); continue;
      case ')': push(Token::Type::RParen, 1); continue;
      case '[': push(Token::Type::LBracket, 1); continue;
      case ']': push(Token::Type::RBracket, 1); continue;
      case ',': push(Token::Type::Comma, 1); continue;
      case ';': push(Token::Type::Semicolon, 1); continue;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
        c == '.') {
      char* end = nullptr;
      const double v = std::strtod(text.c_str() + i, &end);
      if (end == text.c_str() + i) {
        throw ParseError("invalid number", pos);
      }
      Token t{Token::Type::Number, text.substr(i, end - (text.c_str() + i)), v, pos};
      out.push_back(t);
      i = static_cast<std::size_t>(end - text.c_str());
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                 text[j] == '_')) {
        ++j;
      }
      const std::string word = text.substr(i, j - i);
      Token t{Token::Type::Ident, word, 0.0, pos};
      if (word == "true") t.type = Token::Type::True;
      else if (word == "affine") t.type = Token::Type::Affine;
      else if (word == "ball") t.type = Token::Type::Ball;
      else if (word == "U") t.type = Token::Type::U;
      else if (word == "F") t.type = Token::Type::F;
      else if (word == "G") t.type = Token::Type::G;
      out.push_back(t);
      i = j;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }
  out.push_back({Token::Type::End, "", 0.0, static_cast<int>(text.size())});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const PredicateRegistry& registry)
      : tokens_(std::move(tokens)), registry_(registry) {}

  StlFormula parse() {
    StlFormula f = parse_or();
    expect(Token::Type::End);
    return f;
  }

 private:
  const Token& peek() const { return tokens_[idx_]; }
  Token advance() { return tokens_[idx_++]; }

  bool accept(Token::Type t) {
    if (peek().type == t) {
      ++idx_;
      return true;
    }
    return false;
  }

  Token expect(Token::Type t) {
    if (peek().type != t) {
      throw ParseError(std::string("expected ") + token_name(t) + ", found " +
                           token_name(peek().type),
                       peek().pos);
    }
    return advance();
  }

  std::pair<int, int> parse_interval() {
    expect(Token::Type::LBracket);
    const Token lo = expect(Token::Type::Number);
    expect(Token::Type::Comma);
    const Token hi = expect(Token::Type::Number);
    expect(Token::Type::RBracket);
    auto as_step = [](const Token& t) {
      const double v = t.number;
      const int n = static_cast<int>(v);
      if (v != static_cast<double>(n)) {
        throw ParseError("interval bounds must be integers", t.pos);
      }
      return n;
    };
    const int a = as_step(lo);
    const int b = as_step(hi);
    if (a < 0 || b < 0 || a > b) {
      throw IntervalError("temporal interval must satisfy 0 <= a <= b, got [" +
                          std::to_string(a) + "," + std::to_string(b) + "]");
    }
    return {a, b};
  }

  StlFormula parse_or() {
    StlFormula f = parse_and();
    while (accept(Token::Type::Or)) f = StlFormula::disj(f, parse_and());
    return f;
  }

  StlFormula parse_and() {
    StlFormula f = parse_until();
    while (accept(Token::Type::And)) f = StlFormula::conj(f, parse_until());
    return f;
  }

  StlFormula parse_until() {
    StlFormula f = parse_unary();
    while (accept(Token::Type::U)) {
      const auto [a, b] = parse_interval();
      f = StlFormula::until(a, b, f, parse_unary());
    }
    return f;
  }

  StlFormula parse_unary() {
    if (accept(Token::Type::Not)) return StlFormula::negation(parse_unary());
    if (accept(Token::Type::F)) {
      const auto [a, b] = parse_interval();
      return StlFormula::eventually(a, b, parse_unary());
    }
    if (accept(Token::Type::G)) {
      const auto [a, b] = parse_interval();
      return StlFormula::always(a, b, parse_unary());
    }
    return parse_primary();
  }

  std::vector<double> parse_number_list(Token::Type stop) {
    std::vector<double> values;
    if (peek().type != stop) {
      values.push_back(expect(Token::Type::Number).number);
      while (accept(Token::Type::Comma)) {
        values.push_back(expect(Token::Type::Number).number);
      }
    }
    return values;
  }

  StlFormula parse_primary() {
    const Token t = peek();
    switch (t.type) {
      case Token::Type::True:
        advance();
        return StlFormula::truth();
      case Token::Type::LParen: {
        advance();
        StlFormula f = parse_or();
        expect(Token::Type::RParen);
        return f;
      }
      case Token::Type::Affine: {
        advance();
        expect(Token::Type::LParen);
        const std::vector<double> coeffs = parse_number_list(Token::Type::Semicolon);
        expect(Token::Type::Semicolon);
        const double offset = expect(Token::Type::Number).number;
        expect(Token::Type::RParen);
        Eigen::VectorXd a(static_cast<int>(coeffs.size()));
        for (std::size_t i = 0; i < coeffs.size(); ++i) a[static_cast<int>(i)] = coeffs[i];
        return StlFormula::pred(Predicate::affine(a, offset));
      }
      case Token::Type::Ball: {
        advance();
        expect(Token::Type::LParen);
        const double c = expect(Token::Type::Number).number;
        expect(Token::Type::Semicolon);
        const std::vector<double> p_entries = parse_number_list(Token::Type::Semicolon);
        expect(Token::Type::Semicolon);
        const std::vector<double> q_entries = parse_number_list(Token::Type::RParen);
        expect(Token::Type::RParen);
        if (q_entries.empty() || p_entries.size() % q_entries.size() != 0) {
          throw ParseError("ball(): count(P) must be a multiple of count(q)", t.pos);
        }
        const int rows = static_cast<int>(q_entries.size());
        const int cols = static_cast<int>(p_entries.size()) / rows;
        Eigen::MatrixXd p(rows, cols);
        for (int i = 0; i < rows; ++i) {
          for (int j = 0; j < cols; ++j) {
            p(i, j) = p_entries[static_cast<std::size_t>(i * cols + j)];
          }
        }
        Eigen::VectorXd q(rows);
        for (int i = 0; i < rows; ++i) q[i] = q_entries[static_cast<std::size_t>(i)];
        return StlFormula::pred(Predicate::norm_ball(c, p, q));
      }
      case Token::Type::Ident: {
        advance();
        auto it = registry_.find(t.text);
        if (it == registry_.end()) {
          throw UnknownPredicateError("unknown predicate name '" + t.text + "'");
        }
        Predicate named = it->second;
        if (named.name().empty()) {
          // keep the registry key so the canonical printer round-trips
          switch (named.kind()) {
            case Predicate::Kind::Affine:
              named = Predicate::affine(named.affine_a(), named.affine_b(), t.text);
              break;
            case Predicate::Kind::NormBall:
              named = Predicate::norm_ball(named.ball_c(), named.ball_p(),
                                           named.ball_q(), t.text);
              break;
            case Predicate::Kind::Custom:
              break;
          }
        }
        return StlFormula::pred(named);
      }
      default:
        throw ParseError(std::string("expected formula, found ") + token_name(t.type),
                         t.pos);
    }
  }

  std::vector<Token> tokens_;
  const PredicateRegistry& registry_;
  std::size_t idx_ = 0;
};

}  // namespace

StlFormula parse_formula(const std::string& text, const PredicateRegistry& registry) {
  return Parser(tokenize(text), registry).parse();
}

}  // namespace stldro::stl
