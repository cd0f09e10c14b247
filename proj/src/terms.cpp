// SPDX-License-Identifier: Apache-2.0
#include "unsatcache/terms.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <utility>

#include "unsatcache/errors.hpp"
#include "unsatcache/hashing.hpp"

namespace unsatcache {

struct Term::Node {
  TermKind kind;
  Sort sort;
  std::string symbol;          // Constant value / Variable name / Apply operator
  bool interpreted = false;    // Apply only
  std::vector<Term> args;      // Apply arguments; Binder body at args[0]
  BinderKind binderKind = BinderKind::Forall;
  std::vector<Var> bound;      // Binder only

  Node(TermKind k, Sort s) : kind(k), sort(std::move(s)) {}
};

Term Term::constant(Sort sort, std::string value) {
  auto node = std::make_shared<Node>(TermKind::Constant, std::move(sort));
  node->symbol = std::move(value);
  return Term(std::move(node));
}

Term Term::variable(Sort sort, std::string name) {
  if (name.empty()) throw Error("variable needs a name");
  auto node = std::make_shared<Node>(TermKind::Variable, std::move(sort));
  node->symbol = std::move(name);
  return Term(std::move(node));
}

Term Term::apply(Sort sort, std::string op, bool interpreted, std::vector<Term> args) {
  if (args.empty()) throw Error("application needs at least one argument");
  if (op.empty()) throw Error("application needs an operator symbol");
  auto node = std::make_shared<Node>(TermKind::Apply, std::move(sort));
  node->symbol = std::move(op);
  node->interpreted = interpreted;
  node->args = std::move(args);
  return Term(std::move(node));
}

Term Term::binder(BinderKind kind, std::vector<Var> bound, Term body) {
  if (bound.empty()) throw Error("binder needs at least one bound variable");
  for (std::size_t i = 0; i < bound.size(); ++i)
    for (std::size_t j = i + 1; j < bound.size(); ++j)
      if (bound[i].name == bound[j].name)
        throw Error("binder bound names must be distinct: " + bound[i].name);

  Sort sort = Sort::boolean();
  if (kind == BinderKind::Lambda) {
    sort = body.sort();
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      sort = Sort::array(it->sort, sort);
  } else if (body.sort() != Sort::boolean()) {
    throw SortError("quantifier body must be Bool-sorted");
  }

  auto node = std::make_shared<Node>(TermKind::Binder, std::move(sort));
  node->binderKind = kind;
  node->bound = std::move(bound);
  node->args.push_back(std::move(body));
  return Term(std::move(node));
}

TermKind Term::kind() const { return node_->kind; }
const Sort& Term::sort() const { return node_->sort; }
const std::string& Term::value() const { return node_->symbol; }
const std::string& Term::name() const { return node_->symbol; }
const std::string& Term::op() const { return node_->symbol; }
bool Term::opInterpreted() const { return node_->interpreted; }
std::span<const Term> Term::args() const { return node_->args; }
BinderKind Term::binderKind() const { return node_->binderKind; }
std::span<const Var> Term::boundVars() const { return node_->bound; }
const Term& Term::body() const { return node_->args[0]; }

namespace {

// Stack of binder frames used for positional resolution of bound names.
class BoundScopes {
 public:
  void push(std::span<const Var> frame) { frames_.push_back(frame); }
  void pop() { frames_.pop_back(); }

  // Innermost binding of `name`, as (frame index from bottom, position).
  std::optional<std::pair<std::size_t, std::size_t>> resolve(const std::string& name) const {
    for (std::size_t f = frames_.size(); f-- > 0;) {
      const auto& frame = frames_[f];
      for (std::size_t p = 0; p < frame.size(); ++p)
        if (frame[p].name == name) return std::make_pair(f, p);
    }
    return std::nullopt;
  }

  bool binds(const std::string& name) const { return resolve(name).has_value(); }

 private:
  std::vector<std::span<const Var>> frames_;
};

bool equalRec(const Term& a, const Term& b, BoundScopes& sa, BoundScopes& sb) {
  if (a.kind() != b.kind()) return false;
  if (a.sort() != b.sort()) return false;
  switch (a.kind()) {
    case TermKind::Constant:
      return a.value() == b.value();
    case TermKind::Variable: {
      auto ra = sa.resolve(a.name());
      auto rb = sb.resolve(b.name());
      if (ra.has_value() != rb.has_value()) return false;
      if (ra) return *ra == *rb;
      return a.name() == b.name();
    }
    case TermKind::Apply: {
      if (a.op() != b.op() || a.opInterpreted() != b.opInterpreted()) return false;
      if (a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!equalRec(a.args()[i], b.args()[i], sa, sb)) return false;
      return true;
    }
    case TermKind::Binder: {
      if (a.binderKind() != b.binderKind()) return false;
      if (a.boundVars().size() != b.boundVars().size()) return false;
      for (std::size_t i = 0; i < a.boundVars().size(); ++i)
        if (a.boundVars()[i].sort != b.boundVars()[i].sort) return false;
      sa.push(a.boundVars());
      sb.push(b.boundVars());
      bool eq = equalRec(a.body(), b.body(), sa, sb);
      sa.pop();
      sb.pop();
      return eq;
    }
  }
  return false;
}

const char* binderName(BinderKind kind) {
  switch (kind) {
    case BinderKind::Forall: return "forall";
    case BinderKind::Exists: return "exists";
    case BinderKind::Lambda: return "lambda";
  }
  return "?";
}

std::uint64_t hashRec(const Term& t, BoundScopes& scopes) {
  std::uint64_t h = fnv1a64(t.sort().key());
  switch (t.kind()) {
    case TermKind::Constant:
      h = combineHashes(combineHashes(1, h), fnv1a64(t.value()));
      break;
    case TermKind::Variable: {
      if (auto r = scopes.resolve(t.name())) {
        h = combineHashes(combineHashes(2, h),
                          combineHashes(fnv1a64(static_cast<std::uint64_t>(r->first)),
                                        fnv1a64(static_cast<std::uint64_t>(r->second))));
      } else {
        h = combineHashes(combineHashes(3, h), fnv1a64(t.name()));
      }
      break;
    }
    case TermKind::Apply: {
      h = combineHashes(combineHashes(4, h), fnv1a64(t.op()));
      h = combineHashes(h, fnv1a64(static_cast<std::uint64_t>(t.args().size())));
      h = combineHashes(h, t.opInterpreted() ? 1u : 2u);
      for (const Term& arg : t.args()) h = combineHashes(h, hashRec(arg, scopes));
      break;
    }
    case TermKind::Binder: {
      h = combineHashes(combineHashes(5, h), fnv1a64(binderName(t.binderKind())));
      h = combineHashes(h, fnv1a64(static_cast<std::uint64_t>(t.boundVars().size())));
      for (const Var& v : t.boundVars()) h = combineHashes(h, fnv1a64(v.sort.key()));
      scopes.push(t.boundVars());
      h = combineHashes(h, hashRec(t.body(), scopes));
      scopes.pop();
      break;
    }
  }
  return h;
}

bool isSimpleSymbol(const std::string& s) {
  if (s.empty()) return false;
  auto simpleChar = [](char c) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))
      return true;
    return std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
  };
  if (s[0] >= '0' && s[0] <= '9') return false;
  return std::all_of(s.begin(), s.end(), simpleChar);
}

void printSymbol(std::ostream& os, const std::string& s) {
  if (isSimpleSymbol(s))
    os << s;
  else
    os << '|' << s << '|';
}

void printConstant(std::ostream& os, const Term& t) {
  const std::string& v = t.value();
  switch (t.sort().kind()) {
    case SortKind::Bool:
      os << v;
      return;
    case SortKind::Int:
      if (!v.empty() && v[0] == '-')
        os << "(- " << v.substr(1) << ")";
      else
        os << v;
      return;
    case SortKind::Real: {
      bool neg = !v.empty() && v[0] == '-';
      std::string body = neg ? v.substr(1) : v;
      auto slash = body.find('/');
      std::string num = body.substr(0, slash);
      std::string den = slash == std::string::npos ? "1" : body.substr(slash + 1);
      std::ostringstream base;
      if (den == "1")
        base << num << ".0";
      else
        base << "(/ " << num << ".0 " << den << ".0)";
      if (neg)
        os << "(- " << base.str() << ")";
      else
        os << base.str();
      return;
    }
    case SortKind::BitVec:
      os << "(_ bv" << v << " " << t.sort().bitWidth() << ")";
      return;
    case SortKind::FloatingPoint:
      os << "(_ " << v << " " << t.sort().exponentBits() << " "
         << t.sort().significandBits() << ")";
      return;
    default:
      os << v;  // rounding modes and other symbolic constants
      return;
  }
}

void printRec(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case TermKind::Constant:
      printConstant(os, t);
      return;
    case TermKind::Variable:
      printSymbol(os, t.name());
      return;
    case TermKind::Apply: {
      os << '(' << t.op();
      for (const Term& arg : t.args()) {
        os << ' ';
        printRec(os, arg);
      }
      os << ')';
      return;
    }
    case TermKind::Binder: {
      os << '(' << binderName(t.binderKind()) << " (";
      bool first = true;
      for (const Var& v : t.boundVars()) {
        if (!first) os << ' ';
        first = false;
        os << '(';
        printSymbol(os, v.name);
        os << ' ' << v.sort.key() << ')';
      }
      os << ") ";
      printRec(os, t.body());
      os << ')';
      return;
    }
  }
}

}  // namespace

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  BoundScopes sa, sb;
  return equalRec(*this, other, sa, sb);
}

std::uint64_t Term::structuralHash() const {
  BoundScopes scopes;
  return hashRec(*this, scopes);
}

std::string Term::toString() const {
  std::ostringstream os;
  printRec(os, *this);
  return os.str();
}

Substitution Substitution::of(std::initializer_list<std::pair<Var, Var>> pairs) {
  Substitution s;
  for (const auto& [from, to] : pairs) s.bind(from, to);
  return s;
}

void Substitution::bind(const Var& from, const Var& to) {
  if (from.sort != to.sort)
    throw SortError("substitution must be sort-preserving: " + from.name + " -> " + to.name);
  map_.insert_or_assign(from, to);
}

const Var* Substitution::lookup(const Var& v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : &it->second;
}

std::string Substitution::toString() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [from, to] : map_) {
    if (!first) os << ", ";
    first = false;
    os << from.name << " -> " << to.name;
  }
  os << '}';
  return os.str();
}

Clause::Clause(Term term, std::optional<std::string> label)
    : term_(std::move(term)), label_(std::move(label)) {
  if (term_.sort() != Sort::boolean())
    throw SortError("clause term must be Bool-sorted, got " + term_.sort().key());
  freeVars_ = freeVariables(term_);
  hash_ = term_.structuralHash();
}

namespace {

void flattenRec(const Term& t, std::vector<Clause>& out) {
  if (t.kind() == TermKind::Apply && t.opInterpreted() && t.op() == "and") {
    for (const Term& arg : t.args()) flattenRec(arg, out);
  } else {
    out.emplace_back(t);
  }
}

void collectFreeVars(const Term& t, BoundScopes& scopes, std::set<Var>& seen,
                     std::vector<Var>& out) {
  switch (t.kind()) {
    case TermKind::Constant:
      return;
    case TermKind::Variable: {
      if (scopes.binds(t.name())) return;
      Var v{t.name(), t.sort()};
      if (seen.insert(v).second) out.push_back(std::move(v));
      return;
    }
    case TermKind::Apply:
      for (const Term& arg : t.args()) collectFreeVars(arg, scopes, seen, out);
      return;
    case TermKind::Binder:
      scopes.push(t.boundVars());
      collectFreeVars(t.body(), scopes, seen, out);
      scopes.pop();
      return;
  }
}

Term applyRec(const Term& t, const Substitution& s, BoundScopes& scopes, bool& changed) {
  switch (t.kind()) {
    case TermKind::Constant:
      return t;
    case TermKind::Variable: {
      if (scopes.binds(t.name())) return t;
      const Var* image = s.lookup(Var{t.name(), t.sort()});
      if (!image) return t;
      if (scopes.binds(image->name))
        throw CaptureError("substitution image " + image->name +
                           " is captured by an enclosing binder");
      changed = true;
      return Term::variable(image->sort, image->name);
    }
    case TermKind::Apply: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      bool localChange = false;
      for (const Term& arg : t.args())
        args.push_back(applyRec(arg, s, scopes, localChange));
      if (!localChange) return t;
      changed = true;
      return Term::apply(t.sort(), t.op(), t.opInterpreted(), std::move(args));
    }
    case TermKind::Binder: {
      scopes.push(t.boundVars());
      bool localChange = false;
      Term body = applyRec(t.body(), s, scopes, localChange);
      scopes.pop();
      if (!localChange) return t;
      changed = true;
      return Term::binder(t.binderKind(),
                          std::vector<Var>(t.boundVars().begin(), t.boundVars().end()),
                          std::move(body));
    }
  }
  return t;
}

}  // namespace

std::vector<Clause> flattenConjunction(const Term& root) {
  std::vector<Clause> out;
  flattenRec(root, out);
  return out;
}

std::vector<Var> freeVariables(const Term& t) {
  BoundScopes scopes;
  std::set<Var> seen;
  std::vector<Var> out;
  collectFreeVars(t, scopes, seen, out);
  return out;
}

Term applySubstitution(const Term& t, const Substitution& s) {
  BoundScopes scopes;
  bool changed = false;
  return applyRec(t, s, scopes, changed);
}

Clause applySubstitution(const Clause& c, const Substitution& s) {
  return Clause(applySubstitution(c.term(), s), c.label());
}

Clause alphaRenameFree(const Clause& c, const Substitution& bijection) {
  std::set<Var> images;
  for (const Var& v : c.freeVars()) {
    const Var* image = bijection.lookup(v);
    const Var& target = image ? *image : v;
    if (!images.insert(target).second)
      throw NonInjectiveError("rename maps two variables to " + target.name);
  }
  return applySubstitution(c, bijection);
}

namespace {

Term renameBindersRec(const Term& t, const std::set<std::string>& forbidden,
                      std::size_t& counter,
                      std::vector<std::pair<std::string, std::string>>& scope) {
  switch (t.kind()) {
    case TermKind::Constant:
      return t;
    case TermKind::Variable: {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->first == t.name()) return Term::variable(t.sort(), it->second);
      return t;
    }
    case TermKind::Apply: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& arg : t.args())
        args.push_back(renameBindersRec(arg, forbidden, counter, scope));
      return Term::apply(t.sort(), t.op(), t.opInterpreted(), std::move(args));
    }
    case TermKind::Binder: {
      std::vector<Var> bound;
      bound.reserve(t.boundVars().size());
      std::size_t pushed = 0;
      for (const Var& v : t.boundVars()) {
        std::string fresh;
        do {
          fresh = "!b" + std::to_string(counter++);
        } while (forbidden.count(fresh) > 0);
        scope.emplace_back(v.name, fresh);
        ++pushed;
        bound.push_back(Var{std::move(fresh), v.sort});
      }
      Term body = renameBindersRec(t.body(), forbidden, counter, scope);
      scope.resize(scope.size() - pushed);
      return Term::binder(t.binderKind(), std::move(bound), std::move(body));
    }
  }
  return t;
}

}  // namespace

Term renameBindersAvoiding(const Term& t, const std::set<std::string>& forbidden) {
  std::set<std::string> avoid = forbidden;
  for (const Var& v : freeVariables(t)) avoid.insert(v.name);
  std::size_t counter = 0;
  std::vector<std::pair<std::string, std::string>> scope;
  return renameBindersRec(t, avoid, counter, scope);
}

}  // namespace unsatcache
