#include "twostep/pddl.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "twostep/errors.h"

namespace twostep {

std::string Atom::ToString() const {
  std::string out = "(" + predicate;
  for (const auto& arg : args) out += " " + arg;
  return out + ")";
}

std::string Literal::ToString() const {
  return negated ? "(not " + atom.ToString() + ")" : atom.ToString();
}

const PredicateDecl* DomainDef::FindPredicate(std::string_view name) const {
  for (const auto& p : predicates) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const ActionSchema* DomainDef::FindAction(std::string_view name) const {
  for (const auto& a : actions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

bool DomainDef::HasType(std::string_view type) const {
  return type == kRootType || types.contains(std::string(type));
}

bool DomainDef::IsSubtype(std::string_view type, std::string_view ancestor) const {
  if (ancestor == kRootType) return true;
  std::string current(type);
  // Bounded walk; the parser rejects cycles but stay safe on hand-built input.
  for (std::size_t depth = 0; depth <= types.size() + 1; ++depth) {
    if (current == ancestor) return true;
    auto it = types.find(current);
    if (it == types.end()) return false;
    current = it->second;
  }
  return false;
}

std::vector<std::string> DomainDef::TypeNames() const {
  std::vector<std::string> out;
  for (const auto& [name, parent] : types) out.push_back(name);
  return out;
}

std::optional<std::string> ProblemDef::ObjectType(std::string_view object) const {
  for (const auto& o : objects) {
    if (o.name == object) return o.type;
  }
  return std::nullopt;
}

namespace {

const std::set<std::string, std::less<>> kSupportedRequirements = {
    ":strips", ":typing", ":negative-preconditions", ":equality"};

[[noreturn]] void Fail(const SExpr& at, const std::string& message) {
  throw SyntaxError(message, at.line, at.column);
}

const std::string& ExpectAtom(const SExpr& e, const std::string& what) {
  if (!e.IsAtom()) Fail(e, "expected " + what + ", found list");
  return e.atom;
}

const SExpr& ExpectList(const SExpr& e, const std::string& what) {
  if (!e.IsList()) Fail(e, "expected " + what + ", found '" + e.atom + "'");
  return e;
}

bool IsVariable(std::string_view term) { return !term.empty() && term[0] == '?'; }

// `a b - t c - u d` -> [(a,t) (b,t) (c,u) (d,object)].
std::vector<TypedName> ParseTypedList(const std::vector<SExpr>& items,
                                      std::size_t begin) {
  std::vector<TypedName> out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& item = items[i];
    if (item.IsList()) {
      if (item.HeadIs("either")) throw UnsupportedFeature("either types");
      Fail(item, "expected name in typed list");
    }
    if (item.atom == "-") {
      if (i + 1 >= items.size()) Fail(item, "expected type after '-'");
      const SExpr& type = items[++i];
      if (type.HeadIs("either")) throw UnsupportedFeature("either types");
      const std::string& type_name = ExpectAtom(type, "type name");
      if (pending.empty()) Fail(item, "'-' without preceding names");
      for (auto& name : pending) out.push_back({std::move(name), type_name});
      pending.clear();
      continue;
    }
    pending.push_back(item.atom);
  }
  for (auto& name : pending) out.push_back({std::move(name), std::string(kRootType)});
  return out;
}

Atom ParseAtom(const SExpr& e) {
  ExpectList(e, "atom");
  if (e.items.empty()) Fail(e, "empty atom");
  Atom atom;
  atom.predicate = ExpectAtom(e.items[0], "predicate name");
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    atom.args.push_back(ExpectAtom(e.items[i], "term"));
  }
  return atom;
}

void RejectUnsupportedHead(const SExpr& e) {
  static const std::set<std::string, std::less<>> kConstructs = {
      "or",     "imply",  "forall",   "exists",     "when",
      "increase", "decrease", "assign", "scale-up", "scale-down"};
  if (!e.IsList() || e.items.empty() || !e.items[0].IsAtom()) return;
  const std::string& head = e.items[0].atom;
  if (kConstructs.contains(head)) throw UnsupportedFeature(head);
  // `at` is also a common predicate name; only `(at start ...)` and
  // `(at end ...)` are temporal.
  const bool second_is = e.items.size() > 1 && e.items[1].IsAtom();
  if (head == "at" && second_is &&
      (e.items[1].atom == "start" || e.items[1].atom == "end")) {
    throw UnsupportedFeature("timed condition (at " + e.items[1].atom + ")");
  }
  if (head == "over" && second_is && e.items[1].atom == "all") {
    throw UnsupportedFeature("timed condition (over all)");
  }
  if (head == ">" || head == "<" || head == ">=" || head == "<=") {
    throw UnsupportedFeature("numeric comparison " + head);
  }
}

void ParseCondition(const SExpr& e, Formula& out) {
  ExpectList(e, "condition");
  if (e.items.empty()) return;  // `()` is the empty conjunction
  RejectUnsupportedHead(e);
  if (e.HeadIs("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) ParseCondition(e.items[i], out);
    return;
  }
  if (e.HeadIs("not")) {
    if (e.items.size() != 2) Fail(e, "'not' takes exactly one argument");
    const SExpr& inner = ExpectList(e.items[1], "negated atom");
    RejectUnsupportedHead(inner);
    if (inner.HeadIs("=")) {
      if (inner.items.size() != 3) Fail(inner, "'=' takes two terms");
      out.equalities.push_back({ExpectAtom(inner.items[1], "term"),
                                ExpectAtom(inner.items[2], "term"), true});
      return;
    }
    if (inner.HeadIs("and") || inner.HeadIs("not")) {
      throw UnsupportedFeature("negation of compound formula");
    }
    out.literals.push_back({ParseAtom(inner), true});
    return;
  }
  if (e.HeadIs("=")) {
    if (e.items.size() != 3) Fail(e, "'=' takes two terms");
    out.equalities.push_back({ExpectAtom(e.items[1], "term"),
                              ExpectAtom(e.items[2], "term"), false});
    return;
  }
  out.literals.push_back({ParseAtom(e), false});
}

void ParseEffect(const SExpr& e, std::vector<Literal>& out) {
  ExpectList(e, "effect");
  if (e.items.empty()) return;
  RejectUnsupportedHead(e);
  if (e.HeadIs("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) ParseEffect(e.items[i], out);
    return;
  }
  if (e.HeadIs("not")) {
    if (e.items.size() != 2) Fail(e, "'not' takes exactly one argument");
    RejectUnsupportedHead(e.items[1]);
    if (e.items[1].HeadIs("=")) Fail(e.items[1], "equality is not an effect");
    out.push_back({ParseAtom(e.items[1]), true});
    return;
  }
  if (e.HeadIs("=")) Fail(e, "equality is not an effect");
  out.push_back({ParseAtom(e), false});
}

std::string SectionName(const SExpr& section) {
  if (!section.IsList() || section.items.empty() || !section.items[0].IsAtom()) {
    Fail(section, "expected section '(:keyword ...)'");
  }
  return section.items[0].atom;
}

void CheckTypeExists(const DomainDef& d, const std::string& type,
                     const std::string& where) {
  if (!d.HasType(type)) {
    throw SemanticError("undeclared type '" + type + "' in " + where);
  }
}

bool TypesCompatible(const DomainDef& d, const std::string& a, const std::string& b) {
  return d.IsSubtype(a, b) || d.IsSubtype(b, a);
}

void ValidateSchemaAtom(const DomainDef& d, const ActionSchema& action,
                        const Atom& atom) {
  const PredicateDecl* pred = d.FindPredicate(atom.predicate);
  const std::string where = "action '" + action.name + "'";
  if (pred == nullptr) {
    throw SemanticError("undeclared predicate '" + atom.predicate + "' in " + where);
  }
  if (pred->params.size() != atom.args.size()) {
    throw SemanticError("arity mismatch for '" + atom.predicate + "' in " + where +
                        ": expected " + std::to_string(pred->params.size()) +
                        ", got " + std::to_string(atom.args.size()));
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const std::string& term = atom.args[i];
    std::string term_type;
    if (IsVariable(term)) {
      auto it = std::find_if(action.params.begin(), action.params.end(),
                             [&](const TypedName& p) { return p.name == term; });
      if (it == action.params.end()) {
        throw SemanticError("variable " + term + " not a parameter of " + where);
      }
      term_type = it->type;
    } else {
      auto it = std::find_if(d.constants.begin(), d.constants.end(),
                             [&](const TypedName& c) { return c.name == term; });
      if (it == d.constants.end()) {
        throw SemanticError("unknown constant '" + term + "' in " + where);
      }
      term_type = it->type;
    }
    if (!TypesCompatible(d, term_type, pred->params[i].type)) {
      throw SemanticError("type mismatch for " + term + " in " + atom.ToString() +
                          " of " + where);
    }
  }
}

void ValidateTerm(const DomainDef& d, const ActionSchema& action,
                  const std::string& term) {
  if (IsVariable(term)) {
    for (const auto& p : action.params) {
      if (p.name == term) return;
    }
    throw SemanticError("variable " + term + " not a parameter of action '" +
                        action.name + "'");
  }
  for (const auto& c : d.constants) {
    if (c.name == term) return;
  }
  throw SemanticError("unknown constant '" + term + "' in action '" + action.name + "'");
}

void ValidateDomain(const DomainDef& d) {
  for (const auto& [type, parent] : d.types) {
    CheckTypeExists(d, parent, "type hierarchy");
    std::string current = parent;
    for (std::size_t depth = 0; current != kRootType; ++depth) {
      if (current == type || depth > d.types.size()) {
        throw SemanticError("cyclic type hierarchy at '" + type + "'");
      }
      current = d.types.at(current);
    }
  }
  for (const auto& c : d.constants) CheckTypeExists(d, c.type, "constants");
  std::set<std::string> seen;
  for (const auto& p : d.predicates) {
    if (!seen.insert(p.name).second) {
      throw SemanticError("duplicate predicate '" + p.name + "'");
    }
    for (const auto& param : p.params) {
      CheckTypeExists(d, param.type, "predicate '" + p.name + "'");
    }
  }
  seen.clear();
  for (const auto& a : d.actions) {
    if (!seen.insert(a.name).second) {
      throw SemanticError("duplicate action '" + a.name + "'");
    }
    std::set<std::string> vars;
    for (const auto& param : a.params) {
      if (!IsVariable(param.name)) {
        throw SemanticError("parameter '" + param.name + "' of action '" + a.name +
                            "' must start with '?'");
      }
      if (!vars.insert(param.name).second) {
        throw SemanticError("duplicate parameter " + param.name + " in action '" +
                            a.name + "'");
      }
      CheckTypeExists(d, param.type, "action '" + a.name + "'");
    }
    for (const auto& lit : a.precondition.literals) ValidateSchemaAtom(d, a, lit.atom);
    for (const auto& eq : a.precondition.equalities) {
      ValidateTerm(d, a, eq.lhs);
      ValidateTerm(d, a, eq.rhs);
    }
    std::set<Atom> adds;
    std::set<Atom> dels;
    for (const auto& lit : a.effect) {
      ValidateSchemaAtom(d, a, lit.atom);
      (lit.negated ? dels : adds).insert(lit.atom);
    }
    for (const auto& atom : adds) {
      if (dels.contains(atom)) {
        throw SemanticError("action '" + a.name + "' both adds and deletes " +
                            atom.ToString());
      }
    }
  }
}

void ValidateGroundAtom(const DomainDef& d, const ProblemDef& p, const Atom& atom,
                        const std::string& where) {
  const PredicateDecl* pred = d.FindPredicate(atom.predicate);
  if (pred == nullptr) {
    throw SemanticError("undeclared predicate '" + atom.predicate + "' in " + where);
  }
  if (pred->params.size() != atom.args.size()) {
    throw SemanticError("arity mismatch in " + where + ": " + atom.ToString() +
                        " expects " + std::to_string(pred->params.size()) +
                        " arguments");
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    std::optional<std::string> type = p.ObjectType(atom.args[i]);
    if (!type) {
      for (const auto& c : d.constants) {
        if (c.name == atom.args[i]) type = c.type;
      }
    }
    if (!type) {
      throw SemanticError("unknown object '" + atom.args[i] + "' in " + where +
                          ": " + atom.ToString());
    }
    if (!d.IsSubtype(*type, pred->params[i].type)) {
      throw SemanticError("object '" + atom.args[i] + "' of type " + *type +
                          " does not fit parameter type " + pred->params[i].type +
                          " in " + atom.ToString());
    }
  }
}

}  // namespace

Formula ParseGoalFormula(const SExpr& expr) {
  Formula goal;
  ParseCondition(expr, goal);
  if (!goal.equalities.empty()) throw UnsupportedFeature("equality in goal");
  return goal;
}

void ValidateGroundFormula(const Formula& formula, const DomainDef& domain,
                           const ProblemDef& problem) {
  for (const auto& lit : formula.literals) {
    ValidateGroundAtom(domain, problem, lit.atom, "goal");
  }
}

DomainDef ParseDomain(std::string_view text) {
  const SExpr root = ReadOne(text);
  if (!root.HeadIs("define")) Fail(root, "expected '(define ...'");
  if (root.items.size() < 2 || !root.items[1].HeadIs("domain") ||
      root.items[1].items.size() != 2) {
    Fail(root, "expected '(domain <name>)'");
  }
  DomainDef d;
  d.name = ExpectAtom(root.items[1].items[1], "domain name");

  for (std::size_t s = 2; s < root.items.size(); ++s) {
    const SExpr& section = root.items[s];
    const std::string key = SectionName(section);
    if (key == ":requirements") {
      for (std::size_t i = 1; i < section.items.size(); ++i) {
        const std::string& req = ExpectAtom(section.items[i], "requirement");
        if (!kSupportedRequirements.contains(req)) throw UnsupportedFeature(req);
        d.requirements.push_back(req);
      }
    } else if (key == ":types") {
      for (auto& t : ParseTypedList(section.items, 1)) {
        if (t.name == kRootType) continue;
        d.types[t.name] = t.type;
      }
      // Parents that are only mentioned as parents are implicit subtypes of
      // object.
      std::vector<std::string> parents;
      for (const auto& [type, parent] : d.types) parents.push_back(parent);
      for (const auto& parent : parents) {
        if (parent != kRootType && !d.types.contains(parent)) {
          d.types[parent] = std::string(kRootType);
        }
      }
    } else if (key == ":constants") {
      auto constants = ParseTypedList(section.items, 1);
      d.constants.insert(d.constants.end(), constants.begin(), constants.end());
    } else if (key == ":predicates") {
      for (std::size_t i = 1; i < section.items.size(); ++i) {
        const SExpr& decl = ExpectList(section.items[i], "predicate declaration");
        if (decl.items.empty()) Fail(decl, "empty predicate declaration");
        PredicateDecl pred;
        pred.name = ExpectAtom(decl.items[0], "predicate name");
        pred.params = ParseTypedList(decl.items, 1);
        d.predicates.push_back(std::move(pred));
      }
    } else if (key == ":action") {
      if (section.items.size() < 2) Fail(section, "expected action name");
      ActionSchema action;
      action.name = ExpectAtom(section.items[1], "action name");
      for (std::size_t i = 2; i < section.items.size(); i += 2) {
        const std::string& field = ExpectAtom(section.items[i], "action field");
        if (i + 1 >= section.items.size()) {
          Fail(section.items[i], "missing value for " + field);
        }
        const SExpr& value = section.items[i + 1];
        if (field == ":parameters") {
          action.params = ParseTypedList(ExpectList(value, "parameter list").items, 0);
        } else if (field == ":precondition") {
          ParseCondition(value, action.precondition);
        } else if (field == ":effect") {
          ParseEffect(value, action.effect);
        } else {
          Fail(section.items[i], "unknown action field '" + field + "'");
        }
      }
      d.actions.push_back(std::move(action));
    } else if (key == ":functions") {
      throw UnsupportedFeature("numeric fluents (:functions)");
    } else if (key == ":durative-action") {
      throw UnsupportedFeature("durative actions");
    } else if (key == ":derived") {
      throw UnsupportedFeature("derived predicates");
    } else {
      throw UnsupportedFeature("domain section " + key);
    }
  }
  ValidateDomain(d);
  return d;
}

ProblemDef ParseProblem(std::string_view text, const DomainDef& domain) {
  const SExpr root = ReadOne(text);
  if (!root.HeadIs("define")) Fail(root, "expected '(define ...'");
  if (root.items.size() < 2 || !root.items[1].HeadIs("problem") ||
      root.items[1].items.size() != 2) {
    Fail(root, "expected '(problem <name>)'");
  }
  ProblemDef p;
  p.name = ExpectAtom(root.items[1].items[1], "problem name");
  bool has_goal = false;

  for (std::size_t s = 2; s < root.items.size(); ++s) {
    const SExpr& section = root.items[s];
    const std::string key = SectionName(section);
    if (key == ":domain") {
      if (section.items.size() != 2) Fail(section, "expected '(:domain <name>)'");
      p.domain_name = ExpectAtom(section.items[1], "domain name");
    } else if (key == ":requirements") {
      for (std::size_t i = 1; i < section.items.size(); ++i) {
        const std::string& req = ExpectAtom(section.items[i], "requirement");
        if (!kSupportedRequirements.contains(req)) throw UnsupportedFeature(req);
      }
    } else if (key == ":objects") {
      for (auto& obj : ParseTypedList(section.items, 1)) {
        CheckTypeExists(domain, obj.type, "objects");
        auto existing = p.ObjectType(obj.name);
        if (existing) {
          if (*existing != obj.type) {
            throw SemanticError("object '" + obj.name + "' declared with types " +
                                *existing + " and " + obj.type);
          }
          continue;
        }
        p.objects.push_back(std::move(obj));
      }
    } else if (key == ":init") {
      for (std::size_t i = 1; i < section.items.size(); ++i) {
        const SExpr& fact = section.items[i];
        if (fact.HeadIs("not")) Fail(fact, "negative literal in :init");
        if (fact.HeadIs("=")) throw UnsupportedFeature("numeric fluents in :init");
        p.init.push_back(ParseAtom(fact));
      }
    } else if (key == ":goal") {
      if (section.items.size() != 2) Fail(section, "expected one goal formula");
      p.goal = ParseGoalFormula(section.items[1]);
      has_goal = true;
    } else if (key == ":metric") {
      throw UnsupportedFeature("plan metrics (:metric)");
    } else {
      throw UnsupportedFeature("problem section " + key);
    }
  }

  if (p.domain_name.empty()) throw SemanticError("problem is missing (:domain ...)");
  if (p.domain_name != domain.name) {
    throw SemanticError("problem '" + p.name + "' is for domain '" + p.domain_name +
                        "', not '" + domain.name + "'");
  }
  if (!has_goal) throw SemanticError("problem is missing (:goal ...)");
  for (const auto& atom : p.init) ValidateGroundAtom(domain, p, atom, "init");
  ValidateGroundFormula(p.goal, domain, p);
  // Duplicate init atoms collapse; states are sets.
  std::set<Atom> seen;
  std::vector<Atom> unique;
  for (auto& atom : p.init) {
    if (seen.insert(atom).second) unique.push_back(std::move(atom));
  }
  p.init = std::move(unique);
  return p;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

DomainDef LoadDomain(const std::filesystem::path& path) {
  return ParseDomain(ReadTextFile(path));
}

ProblemDef LoadProblem(const std::filesystem::path& path, const DomainDef& domain) {
  return ParseProblem(ReadTextFile(path), domain);
}

namespace {

std::string FormatTypedList(const std::vector<TypedName>& names) {
  std::string out;
  std::size_t i = 0;
  while (i < names.size()) {
    std::size_t j = i;
    while (j < names.size() && names[j].type == names[i].type) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (!out.empty()) out += ' ';
      out += names[k].name;
    }
    // A bare trailing group defaults to the root type; anywhere else it
    // would be absorbed by the next group's type.
    if (names[i].type != kRootType || j < names.size()) out += " - " + names[i].type;
    i = j;
  }
  return out;
}

std::string FormatConjunction(const std::vector<Literal>& literals,
                              const std::vector<Equality>& equalities) {
  std::vector<std::string> parts;
  for (const auto& lit : literals) parts.push_back(lit.ToString());
  for (const auto& eq : equalities) {
    std::string e = "(= " + eq.lhs + " " + eq.rhs + ")";
    parts.push_back(eq.negated ? "(not " + e + ")" : e);
  }
  std::string out = "(and";
  for (const auto& part : parts) out += " " + part;
  return out + ")";
}

}  // namespace

std::string SerializeDomain(const DomainDef& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    out << "  (:requirements";
    for (const auto& r : d.requirements) out << ' ' << r;
    out << ")\n";
  }
  if (!d.types.empty()) {
    out << "  (:types\n";
    for (const auto& [type, parent] : d.types) {
      out << "    " << type << " - " << parent << "\n";
    }
    out << "  )\n";
  }
  if (!d.constants.empty()) {
    out << "  (:constants " << FormatTypedList(d.constants) << ")\n";
  }
  out << "  (:predicates\n";
  for (const auto& p : d.predicates) {
    out << "    (" << p.name;
    if (!p.params.empty()) out << ' ' << FormatTypedList(p.params);
    out << ")\n";
  }
  out << "  )\n";
  for (const auto& a : d.actions) {
    out << "  (:action " << a.name << "\n";
    out << "    :parameters (" << FormatTypedList(a.params) << ")\n";
    out << "    :precondition "
        << FormatConjunction(a.precondition.literals, a.precondition.equalities)
        << "\n";
    out << "    :effect " << FormatConjunction(a.effect, {}) << ")\n";
  }
  out << ")\n";
  return out.str();
}

std::string SerializeGoal(const Formula& goal) {
  return "(:goal " + FormatConjunction(goal.literals, goal.equalities) + ")";
}

std::string SerializeProblem(const ProblemDef& p, const SerializeOptions& options) {
  std::ostringstream out;
  out << "(define (problem " << p.name << ")\n";
  out << "  (:domain " << p.domain_name << ")\n";
  out << "  (:objects\n";
  // Group by type, keeping first-appearance order of types.
  std::vector<std::string> type_order;
  for (const auto& o : p.objects) {
    if (std::find(type_order.begin(), type_order.end(), o.type) == type_order.end()) {
      type_order.push_back(o.type);
    }
  }
  for (const auto& type : type_order) {
    std::vector<TypedName> group;
    for (const auto& o : p.objects) {
      if (o.type == type) group.push_back(o);
    }
    out << "    " << FormatTypedList(group) << "\n";
  }
  out << "  )\n";
  out << "  (:init\n";
  for (const auto& atom : p.init) out << "    " << atom.ToString() << "\n";
  out << "  )\n";
  if (options.include_goal) {
    out << "  (:goal (and\n";
    for (const auto& lit : p.goal.literals) out << "    " << lit.ToString() << "\n";
    out << "  ))\n";
  }
  out << ")\n";
  return out.str();
}

}  // namespace twostep
