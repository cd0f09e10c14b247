// SPDX-License-Identifier: Apache-2.0
#include "unsatcache/smtlib.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "unsatcache/errors.hpp"

namespace unsatcache {

namespace {

// ---------------------------------------------------------------- lexer

struct Token {
  enum class Type { LParen, RParen, Symbol, Keyword, Numeral, Decimal, BitLiteral, String, End };
  Type type = Type::End;
  std::string text;
  unsigned width = 0;  // BitLiteral
  std::uint64_t bits = 0;
  std::size_t line = 1;
  std::size_t col = 1;
};

bool isSymbolChar(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  return std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skipWhitespaceAndComments();
    Token tok;
    tok.line = line_;
    tok.col = col_;
    if (pos_ >= text_.size()) {
      tok.type = Token::Type::End;
      return tok;
    }
    char c = text_[pos_];
    if (c == '(') {
      advance();
      tok.type = Token::Type::LParen;
      return tok;
    }
    if (c == ')') {
      advance();
      tok.type = Token::Type::RParen;
      return tok;
    }
    if (c == '|') return quotedSymbol(tok);
    if (c == '"') return stringLiteral(tok);
    if (c == '#') return bitLiteral(tok);
    if (c == ':') {
      advance();
      tok.type = Token::Type::Keyword;
      tok.text = readSymbolBody();
      if (tok.text.empty()) throw ParseError(tok.line, tok.col, "empty keyword");
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number(tok);
    if (isSymbolChar(c)) {
      tok.type = Token::Type::Symbol;
      tok.text = readSymbolBody();
      return tok;
    }
    throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skipWhitespaceAndComments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string readSymbolBody() {
    std::string s;
    while (pos_ < text_.size() && isSymbolChar(text_[pos_])) {
      s += text_[pos_];
      advance();
    }
    return s;
  }

  Token quotedSymbol(Token tok) {
    advance();  // opening '|'
    std::string s;
    while (pos_ < text_.size() && text_[pos_] != '|') {
      if (text_[pos_] == '\\') throw ParseError(line_, col_, "backslash in quoted symbol");
      s += text_[pos_];
      advance();
    }
    if (pos_ >= text_.size()) throw ParseError(tok.line, tok.col, "unterminated |symbol|");
    advance();  // closing '|'
    tok.type = Token::Type::Symbol;
    tok.text = std::move(s);
    return tok;
  }

  Token stringLiteral(Token tok) {
    advance();  // opening quote
    std::string s;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '"') {
        advance();
        if (pos_ < text_.size() && text_[pos_] == '"') {
          s += '"';
          advance();
          continue;
        }
        tok.type = Token::Type::String;
        tok.text = std::move(s);
        return tok;
      }
      s += c;
      advance();
    }
    throw ParseError(tok.line, tok.col, "unterminated string literal");
  }

  Token bitLiteral(Token tok) {
    advance();  // '#'
    if (pos_ >= text_.size()) throw ParseError(tok.line, tok.col, "dangling '#'");
    char base = text_[pos_];
    advance();
    std::string digits;
    if (base == 'x') {
      while (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits += text_[pos_];
        advance();
      }
      if (digits.empty() || digits.size() > 16)
        throw ParseError(tok.line, tok.col, "bad hexadecimal literal");
      tok.width = static_cast<unsigned>(4 * digits.size());
      tok.bits = std::stoull(digits, nullptr, 16);
    } else if (base == 'b') {
      while (pos_ < text_.size() && (text_[pos_] == '0' || text_[pos_] == '1')) {
        digits += text_[pos_];
        advance();
      }
      if (digits.empty() || digits.size() > 64)
        throw ParseError(tok.line, tok.col, "bad binary literal");
      tok.width = static_cast<unsigned>(digits.size());
      tok.bits = std::stoull(digits, nullptr, 2);
    } else {
      throw ParseError(tok.line, tok.col, "expected #x or #b literal");
    }
    tok.type = Token::Type::BitLiteral;
    return tok;
  }

  Token number(Token tok) {
    std::string digits;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      digits += text_[pos_];
      advance();
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      std::string frac;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        frac += text_[pos_];
        advance();
      }
      if (frac.empty()) throw ParseError(tok.line, tok.col, "decimal needs fraction digits");
      tok.type = Token::Type::Decimal;
      tok.text = digits + "." + frac;
      return tok;
    }
    tok.type = Token::Type::Numeral;
    tok.text = std::move(digits);
    return tok;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ----------------------------------------------------------- s-expressions

struct SExpr {
  bool isAtom = true;
  Token atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t col = 1;

  bool isSymbol(std::string_view s) const {
    return isAtom && atom.type == Token::Type::Symbol && atom.text == s;
  }
};

class Reader {
 public:
  explicit Reader(std::string_view text) : lexer_(text) { lookahead_ = lexer_.next(); }

  std::optional<SExpr> read() {
    if (lookahead_.type == Token::Type::End) return std::nullopt;
    return readOne();
  }

 private:
  SExpr readOne() {
    Token tok = take();
    SExpr e;
    e.line = tok.line;
    e.col = tok.col;
    if (tok.type == Token::Type::LParen) {
      e.isAtom = false;
      while (lookahead_.type != Token::Type::RParen) {
        if (lookahead_.type == Token::Type::End)
          throw ParseError(tok.line, tok.col, "unterminated list");
        e.items.push_back(readOne());
      }
      take();  // ')'
      return e;
    }
    if (tok.type == Token::Type::RParen) throw ParseError(tok.line, tok.col, "stray ')'");
    e.atom = std::move(tok);
    return e;
  }

  Token take() {
    Token t = std::move(lookahead_);
    lookahead_ = lexer_.next();
    return t;
  }

  Lexer lexer_;
  Token lookahead_;
};

// -------------------------------------------------------------- numerics

std::uint64_t parseUnsigned(const SExpr& e, const char* what) {
  if (!e.isAtom || e.atom.type != Token::Type::Numeral)
    throw ParseError(e.line, e.col, std::string("expected ") + what);
  return std::stoull(e.atom.text);
}

// Canonical rational "n/d": reduced, d >= 1, sign in front.
std::string canonicalRational(bool negative, std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw Error("rational with zero denominator");
  std::uint64_t g = std::gcd(num, den);
  if (g > 0) {
    num /= g;
    den /= g;
  }
  if (num == 0) negative = false;
  std::string s = negative ? "-" : "";
  return s + std::to_string(num) + "/" + std::to_string(den);
}

std::string decimalToRational(const std::string& text, std::size_t line, std::size_t col) {
  auto dot = text.find('.');
  std::string whole = text.substr(0, dot);
  std::string frac = text.substr(dot + 1);
  if (whole.size() + frac.size() > 18)
    throw ParseError(line, col, "decimal literal too large");
  std::uint64_t num = std::stoull(whole + frac);
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  return canonicalRational(false, num, den);
}

std::uint64_t maskToWidth(std::uint64_t value, unsigned width) {
  return width >= 64 ? value : (value & ((std::uint64_t{1} << width) - 1));
}

// ---------------------------------------------------------------- analyzer

const std::set<std::string>& reservedSymbols() {
  static const std::set<std::string> reserved = {
      "true", "false", "not", "and", "or", "xor", "=>", "=", "distinct", "ite",
      "let", "forall", "exists", "lambda", "+", "-", "*", "/", "div", "mod", "abs",
      "to_real", "to_int", "<", ">", "<=", ">=", "select", "store", "concat",
      "RNE", "RNA", "RTP", "RTN", "RTZ", "Bool", "Int", "Real", "Array", "BitVec",
      "FloatingPoint", "RoundingMode", "_", "!", "as", "fp"};
  return reserved;
}

bool isFpPredicate(const std::string& op) {
  static const std::set<std::string> preds = {
      "fp.leq", "fp.lt", "fp.geq", "fp.gt", "fp.eq", "fp.isNaN", "fp.isZero",
      "fp.isInfinite", "fp.isNegative", "fp.isPositive", "fp.isNormal", "fp.isSubnormal"};
  return preds.count(op) > 0;
}

class Analyzer {
 public:
  explicit Analyzer(std::string path) { out_.path = std::move(path); }

  QueryFile run(std::string_view text) {
    Reader reader(text);
    bool sawExit = false;
    while (auto e = reader.read()) {
      if (sawExit) break;
      sawExit = command(*e);
    }
    if (checkSatCount_ == 0)
      throw ParseError(1, 1, "missing check-sat in " + out_.path);
    return std::move(out_);
  }

 private:
  // Returns true for exit.
  bool command(const SExpr& e) {
    if (e.isAtom || e.items.empty() || !e.items[0].isAtom ||
        e.items[0].atom.type != Token::Type::Symbol)
      throw ParseError(e.line, e.col, "expected a command");
    const std::string& head = e.items[0].atom.text;

    if (head == "set-logic") {
      if (e.items.size() != 2 || !e.items[1].isAtom)
        throw ParseError(e.line, e.col, "set-logic expects one symbol");
      out_.logicTag = e.items[1].atom.text;
      return false;
    }
    if (head == "set-option" || head == "set-info" || head == "get-unsat-core") {
      return false;  // recorded as seen, otherwise ignored
    }
    if (head == "declare-sort") return declareSort(e);
    if (head == "declare-const") return declareConst(e);
    if (head == "declare-fun") return declareFun(e);
    if (head == "assert") return assertCommand(e);
    if (head == "check-sat") {
      if (++checkSatCount_ > 1) throw UnsupportedFeatureError("multiple check-sat");
      return false;
    }
    if (head == "exit") return true;
    throw UnsupportedFeatureError(head);
  }

  bool declareSort(const SExpr& e) {
    if (e.items.size() != 3 || !e.items[1].isAtom)
      throw ParseError(e.line, e.col, "declare-sort expects a name and an arity");
    const std::string& name = e.items[1].atom.text;
    if (parseUnsigned(e.items[2], "sort arity") != 0)
      throw UnsupportedFeatureError("parametric sorts (declare-sort arity > 0)");
    checkFreshSymbol(name, e);
    sortEnv_.emplace(name, Sort::uninterpreted(name));
    out_.declaredSorts.push_back(name);
    return false;
  }

  bool declareConst(const SExpr& e) {
    if (e.items.size() != 3 || !e.items[1].isAtom)
      throw ParseError(e.line, e.col, "declare-const expects a name and a sort");
    const std::string& name = e.items[1].atom.text;
    checkFreshSymbol(name, e);
    SortSignature sig{{}, analyzeSort(e.items[2])};
    funEnv_.emplace(name, sig);
    out_.declarations.emplace_back(name, std::move(sig));
    return false;
  }

  bool declareFun(const SExpr& e) {
    if (e.items.size() != 4 || !e.items[1].isAtom || e.items[2].isAtom)
      throw ParseError(e.line, e.col, "declare-fun expects name, argument sorts, sort");
    const std::string& name = e.items[1].atom.text;
    checkFreshSymbol(name, e);
    std::vector<Sort> args;
    for (const SExpr& s : e.items[2].items) args.push_back(analyzeSort(s));
    SortSignature sig{std::move(args), analyzeSort(e.items[3])};
    funEnv_.emplace(name, sig);
    out_.declarations.emplace_back(name, std::move(sig));
    return false;
  }

  bool assertCommand(const SExpr& e) {
    if (e.items.size() != 2)
      throw ParseError(e.line, e.col, "assert expects one term");
    const SExpr& body = e.items[1];
    std::optional<std::string> name;
    const SExpr* termExpr = &body;
    if (!body.isAtom && !body.items.empty() && body.items[0].isSymbol("!")) {
      if (body.items.size() != 4 || !body.items[2].isAtom ||
          body.items[2].atom.type != Token::Type::Keyword ||
          body.items[2].atom.text != "named" || !body.items[3].isAtom)
        throw ParseError(body.line, body.col, "expected (! term :named symbol)");
      name = body.items[3].atom.text;
      if (!assertionNames_.insert(*name).second)
        throw ParseError(body.line, body.col, "duplicate assertion name " + *name);
      termExpr = &body.items[1];
    }
    out_.assertions.emplace_back(std::move(name), analyzeTerm(*termExpr));
    return false;
  }

  void checkFreshSymbol(const std::string& name, const SExpr& e) {
    if (reservedSymbols().count(name) > 0)
      throw ParseError(e.line, e.col, "cannot redeclare builtin symbol " + name);
    if (funEnv_.count(name) > 0 || sortEnv_.count(name) > 0)
      throw ParseError(e.line, e.col, "symbol already declared: " + name);
    usedNames_.insert(name);
  }

  Sort analyzeSort(const SExpr& e) {
    if (e.isAtom) {
      if (e.atom.type != Token::Type::Symbol)
        throw ParseError(e.line, e.col, "expected a sort");
      const std::string& name = e.atom.text;
      if (name == "Bool") return Sort::boolean();
      if (name == "Int") return Sort::integer();
      if (name == "Real") return Sort::real();
      if (name == "RoundingMode") return Sort::uninterpreted("RoundingMode");
      auto it = sortEnv_.find(name);
      if (it != sortEnv_.end()) return it->second;
      throw ParseError(e.line, e.col, "unknown sort " + name);
    }
    if (e.items.size() == 3 && e.items[0].isSymbol("_") && e.items[1].isSymbol("BitVec"))
      return Sort::bitVec(static_cast<unsigned>(parseUnsigned(e.items[2], "bit width")));
    if (e.items.size() == 4 && e.items[0].isSymbol("_") &&
        e.items[1].isSymbol("FloatingPoint"))
      return Sort::floatingPoint(
          static_cast<unsigned>(parseUnsigned(e.items[2], "exponent width")),
          static_cast<unsigned>(parseUnsigned(e.items[3], "significand width")));
    if (e.items.size() == 3 && e.items[0].isSymbol("Array"))
      return Sort::array(analyzeSort(e.items[1]), analyzeSort(e.items[2]));
    throw ParseError(e.line, e.col, "unknown sort expression");
  }

  // ------------------------------------------------------------- terms

  struct ScopeEntry {
    std::string sourceName;
    std::optional<Term> letValue;        // let binding
    std::set<std::string> letFreeNames;  // free names of letValue
    std::optional<Var> boundVar;         // binder binding (possibly renamed)
  };

  Term analyzeTerm(const SExpr& e) {
    if (e.isAtom) return atomTerm(e);
    if (e.items.empty()) throw ParseError(e.line, e.col, "empty term");

    // Indexed identifiers in operand position: (_ bvN w), (_ +zero e s), ...
    if (e.items[0].isSymbol("_")) return indexedLeaf(e);

    if (!e.items[0].isAtom) return indexedApplication(e);

    const std::string& head = e.items[0].atom.text;
    if (head == "let") return letTerm(e);
    if (head == "forall") return binderTerm(e, BinderKind::Forall);
    if (head == "exists") return binderTerm(e, BinderKind::Exists);
    if (head == "!") throw UnsupportedFeatureError("term annotations outside assert");
    if (head == "as") throw UnsupportedFeatureError("as-qualified identifiers");

    std::vector<Term> args;
    for (std::size_t i = 1; i < e.items.size(); ++i)
      args.push_back(analyzeTerm(e.items[i]));
    return applyOperator(head, std::move(args), e);
  }

  Term atomTerm(const SExpr& e) {
    const Token& tok = e.atom;
    switch (tok.type) {
      case Token::Type::Numeral:
        return Term::constant(Sort::integer(), tok.text);
      case Token::Type::Decimal:
        return Term::constant(Sort::real(), decimalToRational(tok.text, e.line, e.col));
      case Token::Type::BitLiteral:
        return Term::constant(Sort::bitVec(tok.width),
                              std::to_string(maskToWidth(tok.bits, tok.width)));
      case Token::Type::String:
        throw UnsupportedFeatureError("string literals");
      case Token::Type::Symbol:
        break;
      default:
        throw ParseError(e.line, e.col, "unexpected token in term");
    }
    const std::string& name = tok.text;
    if (name == "true" || name == "false")
      return Term::constant(Sort::boolean(), name);
    if (name == "RNE" || name == "RNA" || name == "RTP" || name == "RTN" || name == "RTZ")
      return Term::constant(Sort::uninterpreted("RoundingMode"), name);

    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->sourceName != name) continue;
      if (it->letValue) return *it->letValue;
      return Term::variable(it->boundVar->sort, it->boundVar->name);
    }

    auto fn = funEnv_.find(name);
    if (fn != funEnv_.end()) {
      if (!fn->second.argSorts.empty())
        throw ParseError(e.line, e.col, "function symbol " + name + " needs arguments");
      return Term::variable(fn->second.resultSort, name);
    }
    throw ParseError(e.line, e.col, "undeclared symbol " + name);
  }

  Term indexedLeaf(const SExpr& e) {
    if (e.items.size() == 3 && e.items[1].isAtom &&
        e.items[1].atom.type == Token::Type::Symbol &&
        e.items[1].atom.text.size() > 2 && e.items[1].atom.text.compare(0, 2, "bv") == 0) {
      std::uint64_t value = std::stoull(e.items[1].atom.text.substr(2));
      unsigned width = static_cast<unsigned>(parseUnsigned(e.items[2], "bit width"));
      if (width < 1 || width > 64)
        throw UnsupportedFeatureError("bit-vectors wider than 64");
      return Term::constant(Sort::bitVec(width), std::to_string(maskToWidth(value, width)));
    }
    if (e.items.size() == 4 && e.items[1].isAtom) {
      const std::string& tag = e.items[1].atom.text;
      if (tag == "+zero" || tag == "-zero" || tag == "+oo" || tag == "-oo" || tag == "NaN") {
        unsigned eb = static_cast<unsigned>(parseUnsigned(e.items[2], "exponent width"));
        unsigned sb = static_cast<unsigned>(parseUnsigned(e.items[3], "significand width"));
        return Term::constant(Sort::floatingPoint(eb, sb), tag);
      }
    }
    throw ParseError(e.line, e.col, "unknown indexed identifier");
  }

  // ((_ extract i j) t) and friends.
  Term indexedApplication(const SExpr& e) {
    const SExpr& head = e.items[0];
    if (head.items.empty() || !head.items[0].isSymbol("_") || head.items.size() < 2 ||
        !head.items[1].isAtom)
      throw ParseError(e.line, e.col, "expected an indexed operator");
    const std::string& op = head.items[1].atom.text;
    std::vector<Term> args;
    for (std::size_t i = 1; i < e.items.size(); ++i)
      args.push_back(analyzeTerm(e.items[i]));

    auto requireBv = [&](const Term& t) -> unsigned {
      if (t.sort().kind() != SortKind::BitVec)
        throw ParseError(e.line, e.col, op + " expects a bit-vector argument");
      return t.sort().bitWidth();
    };

    if (op == "extract") {
      if (head.items.size() != 4 || args.size() != 1)
        throw ParseError(e.line, e.col, "extract expects two indices and one argument");
      std::uint64_t hi = parseUnsigned(head.items[2], "index");
      std::uint64_t lo = parseUnsigned(head.items[3], "index");
      unsigned width = requireBv(args[0]);
      if (hi < lo || hi >= width)
        throw ParseError(e.line, e.col, "extract indices out of range");
      std::string symbol =
          "(_ extract " + std::to_string(hi) + " " + std::to_string(lo) + ")";
      return Term::apply(Sort::bitVec(static_cast<unsigned>(hi - lo + 1)), symbol, true,
                         std::move(args));
    }
    if (op == "zero_extend" || op == "sign_extend") {
      if (head.items.size() != 3 || args.size() != 1)
        throw ParseError(e.line, e.col, op + " expects one index and one argument");
      std::uint64_t k = parseUnsigned(head.items[2], "index");
      unsigned width = requireBv(args[0]);
      std::string symbol = "(_ " + op + " " + std::to_string(k) + ")";
      return Term::apply(Sort::bitVec(width + static_cast<unsigned>(k)), symbol, true,
                         std::move(args));
    }
    throw UnsupportedFeatureError("indexed operator " + op);
  }

  Term letTerm(const SExpr& e) {
    if (e.items.size() != 3 || e.items[1].isAtom)
      throw ParseError(e.line, e.col, "let expects bindings and a body");
    std::vector<ScopeEntry> entries;
    for (const SExpr& binding : e.items[1].items) {
      if (binding.isAtom || binding.items.size() != 2 || !binding.items[0].isAtom)
        throw ParseError(binding.line, binding.col, "bad let binding");
      ScopeEntry entry;
      entry.sourceName = binding.items[0].atom.text;
      entry.letValue = analyzeTerm(binding.items[1]);  // outer scope: parallel let
      for (const Var& v : freeVariables(*entry.letValue))
        entry.letFreeNames.insert(v.name);
      entries.push_back(std::move(entry));
    }
    std::size_t before = scope_.size();
    for (auto& entry : entries) scope_.push_back(std::move(entry));
    Term body = analyzeTerm(e.items[2]);
    scope_.resize(before);
    return body;
  }

  Term binderTerm(const SExpr& e, BinderKind kind) {
    if (e.items.size() != 3 || e.items[1].isAtom || e.items[1].items.empty())
      throw ParseError(e.line, e.col, "quantifier expects bound variables and a body");
    std::vector<Var> bound;
    std::size_t before = scope_.size();
    std::set<std::string> namesHere;
    for (const SExpr& b : e.items[1].items) {
      if (b.isAtom || b.items.size() != 2 || !b.items[0].isAtom)
        throw ParseError(b.line, b.col, "bad bound variable");
      std::string name = b.items[0].atom.text;
      if (!namesHere.insert(name).second)
        throw ParseError(b.line, b.col, "duplicate bound variable " + name);
      Sort sort = analyzeSort(b.items[1]);
      // Splicing a let value under a binder that reuses one of its free
      // names would capture it; bound names are positional, so rename.
      std::string actual = name;
      if (letValueMentions(name)) actual = freshName(name);
      ScopeEntry entry;
      entry.sourceName = std::move(name);
      entry.boundVar = Var{actual, sort};
      scope_.push_back(std::move(entry));
      bound.push_back(Var{std::move(actual), std::move(sort)});
    }
    Term body = analyzeTerm(e.items[2]);
    scope_.resize(before);
    if (body.sort() != Sort::boolean())
      throw ParseError(e.line, e.col, "quantifier body must be Bool");
    return Term::binder(kind, std::move(bound), std::move(body));
  }

  bool letValueMentions(const std::string& name) const {
    for (const auto& entry : scope_)
      if (entry.letValue && entry.letFreeNames.count(name) > 0) return true;
    return false;
  }

  std::string freshName(const std::string& base) {
    for (std::size_t i = 0;; ++i) {
      std::string candidate = base + "!" + std::to_string(i);
      if (usedNames_.insert(candidate).second) return candidate;
    }
  }

  // --------------------------------------------------------- operators

  [[noreturn]] void sortMismatch(const std::string& op, const SExpr& e) {
    throw ParseError(e.line, e.col, "ill-sorted application of " + op);
  }

  Term applyOperator(const std::string& op, std::vector<Term> args, const SExpr& e) {
    auto allSort = [&](const Sort& s) {
      return std::all_of(args.begin(), args.end(),
                         [&](const Term& t) { return t.sort() == s; });
    };
    auto allSameSort = [&] {
      return std::all_of(args.begin(), args.end(),
                         [&](const Term& t) { return t.sort() == args[0].sort(); });
    };
    auto allNumericSame = [&] {
      return !args.empty() &&
             (args[0].sort() == Sort::integer() || args[0].sort() == Sort::real()) &&
             allSameSort();
    };
    auto apply = [&](Sort sort) {
      return Term::apply(std::move(sort), op, true, std::move(args));
    };

    if (op == "not") {
      if (args.size() != 1 || !allSort(Sort::boolean())) sortMismatch(op, e);
      return apply(Sort::boolean());
    }
    if (op == "and" || op == "or" || op == "xor" || op == "=>") {
      if (args.empty() || !allSort(Sort::boolean())) sortMismatch(op, e);
      return apply(Sort::boolean());
    }
    if (op == "=" || op == "distinct") {
      if (args.size() < 2 || !allSameSort()) sortMismatch(op, e);
      return apply(Sort::boolean());
    }
    if (op == "ite") {
      if (args.size() != 3 || args[0].sort() != Sort::boolean() ||
          args[1].sort() != args[2].sort())
        sortMismatch(op, e);
      Sort s = args[1].sort();
      return apply(std::move(s));
    }
    if (op == "<" || op == ">" || op == "<=" || op == ">=") {
      if (args.size() < 2 || !allNumericSame()) sortMismatch(op, e);
      return apply(Sort::boolean());
    }
    if (op == "+" || op == "*") {
      if (args.size() < 2 || !allNumericSame()) sortMismatch(op, e);
      Sort s = args[0].sort();
      return apply(std::move(s));
    }
    if (op == "-") {
      if (args.empty() || !allNumericSame()) sortMismatch(op, e);
      if (args.size() == 1 && args[0].kind() == TermKind::Constant)
        return negateConstant(args[0]);
      Sort s = args[0].sort();
      return apply(std::move(s));
    }
    if (op == "/") {
      if (args.size() < 2 || !allSort(Sort::real())) sortMismatch(op, e);
      if (args.size() == 2 && args[0].kind() == TermKind::Constant &&
          args[1].kind() == TermKind::Constant) {
        if (auto folded = foldRealDivision(args[0], args[1])) return *folded;
      }
      return apply(Sort::real());
    }
    if (op == "div" || op == "mod") {
      if (args.size() != 2 || !allSort(Sort::integer())) sortMismatch(op, e);
      return apply(Sort::integer());
    }
    if (op == "abs") {
      if (args.size() != 1 || !allSort(Sort::integer())) sortMismatch(op, e);
      return apply(Sort::integer());
    }
    if (op == "to_real") {
      if (args.size() != 1 || !allSort(Sort::integer())) sortMismatch(op, e);
      return apply(Sort::real());
    }
    if (op == "to_int") {
      if (args.size() != 1 || !allSort(Sort::real())) sortMismatch(op, e);
      return apply(Sort::integer());
    }
    if (op == "select") {
      if (args.size() != 2 || args[0].sort().kind() != SortKind::Array ||
          args[1].sort() != args[0].sort().indexSort())
        sortMismatch(op, e);
      Sort s = args[0].sort().elementSort();
      return apply(std::move(s));
    }
    if (op == "store") {
      if (args.size() != 3 || args[0].sort().kind() != SortKind::Array ||
          args[1].sort() != args[0].sort().indexSort() ||
          args[2].sort() != args[0].sort().elementSort())
        sortMismatch(op, e);
      Sort s = args[0].sort();
      return apply(std::move(s));
    }
    if (auto bv = bitVecOperator(op, args, e)) return std::move(*bv);
    if (auto fp = floatOperator(op, args, e)) return std::move(*fp);

    auto fn = funEnv_.find(op);
    if (fn == funEnv_.end())
      throw ParseError(e.line, e.col, "undeclared symbol " + op);
    const SortSignature& sig = fn->second;
    if (sig.argSorts.size() != args.size()) sortMismatch(op, e);
    for (std::size_t i = 0; i < args.size(); ++i)
      if (args[i].sort() != sig.argSorts[i]) sortMismatch(op, e);
    return Term::apply(sig.resultSort, op, false, std::move(args));
  }

  Term negateConstant(const Term& c) {
    const std::string& v = c.value();
    std::string negated = (!v.empty() && v[0] == '-') ? v.substr(1) : "-" + v;
    if (negated == "-0") negated = "0";
    if (negated == "-0/1") negated = "0/1";
    return Term::constant(c.sort(), std::move(negated));
  }

  static std::optional<Term> foldRealDivision(const Term& a, const Term& b) {
    auto parse = [](const std::string& v, bool& neg, std::uint64_t& n, std::uint64_t& d) {
      std::string body = v;
      neg = !body.empty() && body[0] == '-';
      if (neg) body = body.substr(1);
      auto slash = body.find('/');
      n = std::stoull(body.substr(0, slash));
      d = std::stoull(body.substr(slash + 1));
    };
    bool negA, negB;
    std::uint64_t na, da, nb, db;
    parse(a.value(), negA, na, da);
    parse(b.value(), negB, nb, db);
    if (nb == 0) return std::nullopt;  // division by zero stays symbolic
    return Term::constant(Sort::real(), canonicalRational(negA != negB, na * db, da * nb));
  }

  std::optional<Term> bitVecOperator(const std::string& op, std::vector<Term>& args,
                                     const SExpr& e) {
    auto allBvSame = [&] {
      if (args.empty() || args[0].sort().kind() != SortKind::BitVec) return false;
      return std::all_of(args.begin(), args.end(),
                         [&](const Term& t) { return t.sort() == args[0].sort(); });
    };
    static const std::set<std::string> variadic = {"bvadd", "bvmul", "bvand", "bvor",
                                                   "bvxor"};
    static const std::set<std::string> binary = {"bvsub",  "bvudiv", "bvurem", "bvsdiv",
                                                 "bvsrem", "bvsmod", "bvshl",  "bvlshr",
                                                 "bvashr"};
    static const std::set<std::string> unary = {"bvnot", "bvneg"};
    static const std::set<std::string> compare = {"bvult", "bvule", "bvugt", "bvuge",
                                                  "bvslt", "bvsle", "bvsgt", "bvsge"};

    if (variadic.count(op) > 0) {
      if (args.size() < 2 || !allBvSame()) sortMismatch(op, e);
      Sort s = args[0].sort();
      return Term::apply(std::move(s), op, true, std::move(args));
    }
    if (binary.count(op) > 0) {
      if (args.size() != 2 || !allBvSame()) sortMismatch(op, e);
      Sort s = args[0].sort();
      return Term::apply(std::move(s), op, true, std::move(args));
    }
    if (unary.count(op) > 0) {
      if (args.size() != 1 || args[0].sort().kind() != SortKind::BitVec)
        sortMismatch(op, e);
      Sort s = args[0].sort();
      return Term::apply(std::move(s), op, true, std::move(args));
    }
    if (compare.count(op) > 0) {
      if (args.size() != 2 || !allBvSame()) sortMismatch(op, e);
      return Term::apply(Sort::boolean(), op, true, std::move(args));
    }
    if (op == "concat") {
      if (args.size() != 2 || args[0].sort().kind() != SortKind::BitVec ||
          args[1].sort().kind() != SortKind::BitVec)
        sortMismatch(op, e);
      unsigned w = args[0].sort().bitWidth() + args[1].sort().bitWidth();
      return Term::apply(Sort::bitVec(w), op, true, std::move(args));
    }
    return std::nullopt;
  }

  std::optional<Term> floatOperator(const std::string& op, std::vector<Term>& args,
                                    const SExpr& e) {
    const Sort rm = Sort::uninterpreted("RoundingMode");
    auto isFp = [](const Term& t) { return t.sort().kind() == SortKind::FloatingPoint; };

    if (op == "fp") {
      if (args.size() != 3 ||
          std::any_of(args.begin(), args.end(),
                      [](const Term& t) { return t.sort().kind() != SortKind::BitVec; }) ||
          args[0].sort().bitWidth() != 1)
        sortMismatch(op, e);
      unsigned eb = args[1].sort().bitWidth();
      unsigned sb = args[2].sort().bitWidth() + 1;
      return Term::apply(Sort::floatingPoint(eb, sb), op, true, std::move(args));
    }
    if (op == "fp.add" || op == "fp.sub" || op == "fp.mul" || op == "fp.div") {
      if (args.size() != 3 || args[0].sort() != rm || !isFp(args[1]) ||
          args[1].sort() != args[2].sort())
        sortMismatch(op, e);
      Sort s = args[1].sort();
      return Term::apply(std::move(s), op, true, std::move(args));
    }
    if (op == "fp.sqrt" || op == "fp.roundToIntegral") {
      if (args.size() != 2 || args[0].sort() != rm || !isFp(args[1])) sortMismatch(op, e);
      Sort s = args[1].sort();
      return Term::apply(std::move(s), op, true, std::move(args));
    }
    if (op == "fp.neg" || op == "fp.abs") {
      if (args.size() != 1 || !isFp(args[0])) sortMismatch(op, e);
      Sort s = args[0].sort();
      return Term::apply(std::move(s), op, true, std::move(args));
    }
    if (op == "fp.rem" || op == "fp.min" || op == "fp.max") {
      if (args.size() != 2 || !isFp(args[0]) || args[0].sort() != args[1].sort())
        sortMismatch(op, e);
      Sort s = args[0].sort();
      return Term::apply(std::move(s), op, true, std::move(args));
    }
    if (isFpPredicate(op)) {
      bool unaryPred = op.compare(0, 5, "fp.is") == 0;
      if (unaryPred) {
        if (args.size() != 1 || !isFp(args[0])) sortMismatch(op, e);
      } else {
        if (args.size() < 2 || !isFp(args[0]) ||
            !std::all_of(args.begin(), args.end(),
                         [&](const Term& t) { return t.sort() == args[0].sort(); }))
          sortMismatch(op, e);
      }
      return Term::apply(Sort::boolean(), op, true, std::move(args));
    }
    return std::nullopt;
  }

  QueryFile out_;
  std::map<std::string, Sort> sortEnv_;
  std::map<std::string, SortSignature> funEnv_;
  std::vector<ScopeEntry> scope_;
  std::set<std::string> assertionNames_;
  std::set<std::string> usedNames_;
  int checkSatCount_ = 0;
};

}  // namespace

QueryFile parseQueryFile(std::string_view text, std::string path) {
  return Analyzer(std::move(path)).run(text);
}

Formula toFormula(const QueryFile& q) {
  Formula f;
  f.origin = q.path;
  for (const auto& [name, term] : q.assertions) {
    std::vector<Clause> clauses = flattenConjunction(term);
    for (Clause& c : clauses) {
      if (name)
        f.clauses.emplace_back(c.term(), name);
      else
        f.clauses.push_back(std::move(c));
    }
  }
  return f;
}

namespace {

void collectUninterpretedSorts(const Sort& sort, std::vector<std::string>& order,
                               std::set<std::string>& seen) {
  switch (sort.kind()) {
    case SortKind::Uninterpreted:
      if (sort.name() != "RoundingMode" && seen.insert(sort.name()).second)
        order.push_back(sort.name());
      return;
    case SortKind::Array:
      collectUninterpretedSorts(sort.indexSort(), order, seen);
      collectUninterpretedSorts(sort.elementSort(), order, seen);
      return;
    default:
      return;
  }
}

struct PrintDeclarations {
  std::vector<std::string> sorts;
  std::vector<Var> consts;
  std::vector<std::pair<std::string, SortSignature>> funs;

  std::set<std::string> seenSorts;
  std::set<Var> seenConsts;
  std::set<std::string> seenFuns;
  std::set<std::string> boundNames;

  void scan(const Term& t) {
    collectUninterpretedSorts(t.sort(), sorts, seenSorts);
    switch (t.kind()) {
      case TermKind::Constant:
        return;
      case TermKind::Variable: {
        if (boundNames.count(t.name()) > 0) return;
        Var v{t.name(), t.sort()};
        if (seenConsts.insert(v).second) consts.push_back(std::move(v));
        return;
      }
      case TermKind::Apply: {
        if (!t.opInterpreted() && seenFuns.insert(t.op()).second) {
          SortSignature sig{{}, t.sort()};
          for (const Term& arg : t.args()) sig.argSorts.push_back(arg.sort());
          funs.emplace_back(t.op(), std::move(sig));
        }
        for (const Term& arg : t.args()) scan(arg);
        return;
      }
      case TermKind::Binder: {
        std::vector<std::string> added;
        for (const Var& v : t.boundVars()) {
          collectUninterpretedSorts(v.sort, sorts, seenSorts);
          if (boundNames.insert(v.name).second) added.push_back(v.name);
        }
        scan(t.body());
        for (const std::string& name : added) boundNames.erase(name);
        return;
      }
    }
  }
};

}  // namespace

std::string printQuery(const Formula& f, bool nameEveryClause) {
  PrintDeclarations decls;
  for (const Clause& c : f.clauses) decls.scan(c.term());

  std::ostringstream os;
  os << "(set-logic ALL)\n";
  if (nameEveryClause) os << "(set-option :produce-unsat-cores true)\n";
  for (const std::string& name : decls.sorts) os << "(declare-sort " << name << " 0)\n";
  for (const Var& v : decls.consts)
    os << "(declare-const " << v.name << " " << v.sort.key() << ")\n";
  for (const auto& [name, sig] : decls.funs) {
    os << "(declare-fun " << name << " (";
    for (std::size_t i = 0; i < sig.argSorts.size(); ++i) {
      if (i > 0) os << ' ';
      os << sig.argSorts[i].key();
    }
    os << ") " << sig.resultSort.key() << ")\n";
  }
  for (std::size_t i = 0; i < f.clauses.size(); ++i) {
    if (nameEveryClause)
      os << "(assert (! " << f.clauses[i].term().toString() << " :named k" << i << "))\n";
    else
      os << "(assert " << f.clauses[i].term().toString() << ")\n";
  }
  os << "(check-sat)\n";
  if (nameEveryClause) os << "(get-unsat-core)\n";
  return os.str();
}

Suite loadSuite(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());

  std::vector<std::string> relPaths;
  for (const auto& entry : fs::recursive_directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() != ".smt2") continue;
    relPaths.push_back(fs::relative(entry.path(), dir).generic_string());
  }
  if (ec) throw IoError("failed to list " + dir.string() + ": " + ec.message());
  std::sort(relPaths.begin(), relPaths.end());
  if (relPaths.empty()) throw EmptySuiteError("no .smt2 files in " + dir.string());

  Suite suite;
  suite.id = dir.filename().string();
  for (const std::string& rel : relPaths) {
    std::ifstream in(dir / rel, std::ios::binary);
    if (!in) throw IoError("cannot read " + (dir / rel).string());
    std::ostringstream content;
    content << in.rdbuf();
    suite.files.push_back(parseQueryFile(content.str(), rel));
  }
  return suite;
}

}  // namespace unsatcache
