#include "bgc/model_export.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <utility>

namespace bgc::model {

// ---------------------------------------------------------------------------
// Expression trees
// ---------------------------------------------------------------------------

ExprPtr e_const(Rational v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Const;
  v.canonicalize();
  e->value = std::move(v);
  return e;
}

ExprPtr e_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr e_op(Expr::Op op, std::vector<ExprPtr> kids) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->kids = std::move(kids);
  return e;
}

ExprPtr e_forall(std::vector<std::string> symbols, ExprPtr body) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Forall;
  e->symbols = std::move(symbols);
  e->kids = {std::move(body)};
  return e;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->value != b->value || a->name != b->name || a->symbols != b->symbols ||
      a->kids.size() != b->kids.size())
    return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!expr_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

bool ModelDocument::structurally_equal(const ModelDocument& other) const {
  if (kind != other.kind || variables != other.variables || sense != other.sense ||
      objective != other.objective || rows != other.rows || inner_sense != other.inner_sense ||
      inner_objective != other.inner_objective || logic != other.logic || big_m != other.big_m ||
      assertions.size() != other.assertions.size())
    return false;
  for (std::size_t i = 0; i < assertions.size(); ++i)
    if (!expr_equal(assertions[i], other.assertions[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Shared naming / constants
// ---------------------------------------------------------------------------

namespace {

std::string h_name(const std::string& id) { return "h_" + id; }
std::string hp_name(const std::string& id) { return "hp_" + id; }
std::string hm_name(const std::string& id) { return "hm_" + id; }

Rational compute_big_m(const Arena& arena) {
  Rational mx(0);
  for (int v = 0; v < arena.size(); ++v) mx = std::max(mx, arena.charge_factor(v));
  // The absolute-value rows need M >= 2|y| and |y| is bounded by the
  // largest charge factor K, so the smallest safe integer is 2*floor(K)+3
  // (strictly above 2K even when K is integral).
  mpz_class floor_part = mx.get_num() / mx.get_den();
  return Rational(2 * floor_part + 3);
}

std::vector<char> mark(const Arena& arena, const std::vector<int>& set) {
  std::vector<char> in(arena.size(), 0);
  for (int v : set) in[v] = 1;
  return in;
}

// ---------------------------------------------------------------------------
// MILP construction
// ---------------------------------------------------------------------------

struct MilpBuilder {
  const Arena& arena;
  ModelDocument doc;
  long abs_counter = 0;

  explicit MilpBuilder(const Arena& a) : arena(a) {
    doc.kind = ModelKind::MILP;
    doc.big_m = compute_big_m(a);
  }

  void declare_h() {
    for (int v = 0; v < arena.size(); ++v) doc.variables.push_back({h_name(arena.id(v)), 0, 1, false});
  }

  // h+/h- with the binary selector encoding of argmax / argmin.
  void add_selection(int v) {
    const std::string& u = arena.id(v);
    const Rational& M = doc.big_m;
    doc.variables.push_back({hp_name(u), 0, 1, false});
    doc.variables.push_back({hm_name(u), 0, 1, false});
    for (int w : arena.successors(v))
      doc.variables.push_back({"b_" + u + "_" + arena.id(w), 0, 1, true});
    for (int w : arena.successors(v))
      doc.variables.push_back({"c_" + u + "_" + arena.id(w), 0, 1, true});

    LinearConstraint one_hi{"hi_one_" + u, {}, LinearConstraint::EQ, 1};
    LinearConstraint one_lo{"lo_one_" + u, {}, LinearConstraint::EQ, 1};
    for (int w : arena.successors(v)) {
      const std::string wid = arena.id(w);
      doc.rows.push_back({"hi_ge_" + u + "_" + wid,
                          {{1, hp_name(u)}, {-1, h_name(wid)}},
                          LinearConstraint::GE,
                          0});
      doc.rows.push_back({"hi_pick_" + u + "_" + wid,
                          {{1, hp_name(u)}, {-1, h_name(wid)}, {M, "b_" + u + "_" + wid}},
                          LinearConstraint::LE,
                          M});
      one_hi.terms.push_back({1, "b_" + u + "_" + wid});
    }
    for (int w : arena.successors(v)) {
      const std::string wid = arena.id(w);
      doc.rows.push_back({"lo_le_" + u + "_" + wid,
                          {{1, hm_name(u)}, {-1, h_name(wid)}},
                          LinearConstraint::LE,
                          0});
      doc.rows.push_back({"lo_pick_" + u + "_" + wid,
                          {{1, hm_name(u)}, {-1, h_name(wid)}, {-M, "c_" + u + "_" + wid}},
                          LinearConstraint::GE,
                          -M});
      one_lo.terms.push_back({1, "c_" + u + "_" + wid});
    }
    doc.rows.push_back(std::move(one_hi));
    doc.rows.push_back(std::move(one_lo));
  }

  // |y| -> a with the two constraint groups; y given as terms + constant.
  // Returns the name of the a-variable.
  std::string add_abs(std::vector<LinearTerm> y, const Rational& d) {
    const Rational& M = doc.big_m;
    const std::string n = std::to_string(++abs_counter);
    const std::string a = "a_" + n, z = "z_" + n;
    doc.variables.push_back({a, 0, M, false});
    doc.variables.push_back({z, 0, 1, true});

    auto negate = [](std::vector<LinearTerm> t) {
      for (auto& term : t) term.coeff = -term.coeff;
      return t;
    };
    // a - y >= 0
    std::vector<LinearTerm> row = {{1, a}};
    for (auto& t : negate(y)) row.push_back(t);
    doc.rows.push_back({"abs_lo_" + n, row, LinearConstraint::GE, d});
    // a + y >= 0
    row = {{1, a}};
    for (auto& t : y) row.push_back(t);
    doc.rows.push_back({"abs_hi_" + n, row, LinearConstraint::GE, -d});
    // y + M z >= a
    row = y;
    row.push_back({M, z});
    row.push_back({-1, a});
    doc.rows.push_back({"abs_z1_" + n, row, LinearConstraint::GE, -d});
    // -y + M (1 - z) >= a
    row = negate(y);
    row.push_back({-M, z});
    row.push_back({-1, a});
    doc.rows.push_back({"abs_z0_" + n, row, LinearConstraint::GE, d - M});
    return a;
  }

  // Fixed-point row for h(u) = clamp((h+ + h-) / 2 * K - R1) via
  // min(1,x) = ((x-1) - |x-1|)/2 + 1 and max(0,m) = (m + |m|)/2.
  void add_clamp(int v) {
    const std::string& u = arena.id(v);
    const Rational K = arena.charge_factor(v);
    const Rational R1 = arena.charge1(v);
    // y1 = x - 1 with x = (K/2)(h+ + h-) - R1
    const std::string a1 =
        add_abs({{K / 2, hp_name(u)}, {K / 2, hm_name(u)}}, -R1 - 1);
    // y2 = m = (x - 1 - a1)/2 + 1
    const std::string a2 = add_abs(
        {{K / 4, hp_name(u)}, {K / 4, hm_name(u)}, {Rational(-1, 2), a1}}, (1 - R1) / 2);
    // h = (m + a2)/2
    doc.rows.push_back({"clamp_" + u,
                        {{1, h_name(u)},
                         {-K / 8, hp_name(u)},
                         {-K / 8, hm_name(u)},
                         {Rational(1, 4), a1},
                         {Rational(-1, 2), a2}},
                        LinearConstraint::EQ,
                        (1 - R1) / 4});
  }
};

// ---------------------------------------------------------------------------
// Real-arithmetic construction
// ---------------------------------------------------------------------------

// Names the three variable families for one side of a quantified formula.
struct VarNaming {
  std::string h_prefix = "h_", hp_prefix = "hp_", hm_prefix = "hm_";
  std::string h(const std::string& id) const { return h_prefix + id; }
  std::string hp(const std::string& id) const { return hp_prefix + id; }
  std::string hm(const std::string& id) const { return hm_prefix + id; }
};

ExprPtr conj(std::vector<ExprPtr> kids) {
  if (kids.size() == 1) return kids[0];
  return e_op(Expr::And, std::move(kids));
}

ExprPtr disj(std::vector<ExprPtr> kids) {
  if (kids.size() == 1) return kids[0];
  return e_op(Expr::Or, std::move(kids));
}

// ((1 - tau) h- + h+) / ((h+ - h- - 1) tau + 2) * K - R1
ExprPtr update_value(const Arena& arena, const Mechanism& mech, const VarNaming& nm, int v) {
  const std::string& id = arena.id(v);
  const Rational tau = mech.effective_tau();
  ExprPtr hp = e_var(nm.hp(id)), hm = e_var(nm.hm(id));
  ExprPtr num = e_op(Expr::Add, {e_op(Expr::Mul, {e_const(1 - tau), hm}), hp});
  ExprPtr den = e_op(
      Expr::Add,
      {e_op(Expr::Mul, {e_op(Expr::Sub, {e_op(Expr::Sub, {hp, hm}), e_const(1)}), e_const(tau)}),
       e_const(2)});
  return e_op(Expr::Sub, {e_op(Expr::Mul, {e_op(Expr::Div, {num, den}), e_const(arena.charge_factor(v))}),
                          e_const(arena.charge1(v))});
}

// h(u+) / h(u-) selection: each equals some successor value and bounds all.
ExprPtr selection_formula(const Arena& arena, const VarNaming& nm, int v) {
  const std::string& id = arena.id(v);
  std::vector<ExprPtr> eq_hi, eq_lo, bounds;
  for (int w : arena.successors(v)) {
    ExprPtr hw = e_var(nm.h(arena.id(w)));
    eq_hi.push_back(e_op(Expr::Eq, {e_var(nm.hp(id)), hw}));
    eq_lo.push_back(e_op(Expr::Eq, {e_var(nm.hm(id)), hw}));
    bounds.push_back(e_op(Expr::Ge, {e_var(nm.hp(id)), hw}));
    bounds.push_back(e_op(Expr::Le, {e_var(nm.hm(id)), hw}));
  }
  std::vector<ExprPtr> kids = {disj(std::move(eq_hi)), disj(std::move(eq_lo))};
  for (auto& b : bounds) kids.push_back(std::move(b));
  return conj(std::move(kids));
}

// Three-way clamp disjunction: h = 0 with value <= 0, h = 1 with
// value >= 1, or h = value in [0,1].
ExprPtr clamp_formula(const Arena& arena, const Mechanism& mech, const VarNaming& nm, int v) {
  ExprPtr h = e_var(nm.h(arena.id(v)));
  ExprPtr val = update_value(arena, mech, nm, v);
  return disj({conj({e_op(Expr::Eq, {h, e_const(0)}), e_op(Expr::Le, {val, e_const(0)})}),
               conj({e_op(Expr::Eq, {h, e_const(1)}), e_op(Expr::Ge, {val, e_const(1)})}),
               conj({e_op(Expr::Le, {e_const(0), h}), e_op(Expr::Le, {h, e_const(1)}),
                     e_op(Expr::Eq, {h, val})})});
}

std::vector<ExprPtr> range_assertions(const std::string& var) {
  return {e_op(Expr::Le, {e_const(0), e_var(var)}), e_op(Expr::Le, {e_var(var), e_const(1)})};
}

// Complete fixed-point formula over one naming (used primed and unprimed).
ExprPtr fixpoint_formula(const Arena& arena, const Mechanism& mech, const VarNaming& nm,
                         const std::vector<char>& pinned_zero) {
  std::vector<ExprPtr> kids;
  for (int v = 0; v < arena.size(); ++v)
    for (const std::string& name : {nm.h(arena.id(v)), nm.hp(arena.id(v)), nm.hm(arena.id(v))})
      for (auto& r : range_assertions(name)) kids.push_back(r);
  for (int v = 0; v < arena.size(); ++v) kids.push_back(selection_formula(arena, nm, v));
  for (int v = 0; v < arena.size(); ++v) {
    if (pinned_zero[v])
      kids.push_back(e_op(Expr::Eq, {e_var(nm.h(arena.id(v))), e_const(0)}));
    else
      kids.push_back(clamp_formula(arena, mech, nm, v));
  }
  return conj(std::move(kids));
}

}  // namespace

// ---------------------------------------------------------------------------
// Exporters
// ---------------------------------------------------------------------------

ModelDocument export_reach_milp(const Arena& arena, const std::vector<int>& targets,
                                const Mechanism& mech) {
  if (mech.effective_tau() != 0)
    throw NonRichmanMILPUnsupported("the MILP encoding is only exact for the Richman mechanism");
  const auto in_t = mark(arena, targets);

  MilpBuilder b(arena);
  b.doc.sense = Sense::Maximize;
  b.declare_h();
  for (int v = 0; v < arena.size(); ++v) b.doc.objective.push_back({1, h_name(arena.id(v))});
  for (int v = 0; v < arena.size(); ++v)
    if (in_t[v])
      b.doc.rows.push_back({"fix_" + arena.id(v), {{1, h_name(arena.id(v))}}, LinearConstraint::EQ, 0});
  for (int v = 0; v < arena.size(); ++v) b.add_selection(v);
  for (int v = 0; v < arena.size(); ++v)
    if (!in_t[v]) b.add_clamp(v);
  return std::move(b.doc);
}

ModelDocument export_reach_etr(const Arena& arena, const std::vector<int>& targets,
                               const Mechanism& mech) {
  const auto in_t = mark(arena, targets);
  ModelDocument doc;
  doc.kind = ModelKind::ETR;
  doc.logic = "QF_NRA";
  VarNaming nm;
  for (int v = 0; v < arena.size(); ++v) {
    doc.variables.push_back({nm.h(arena.id(v))});
    doc.variables.push_back({nm.hp(arena.id(v))});
    doc.variables.push_back({nm.hm(arena.id(v))});
  }
  for (const auto& var : doc.variables)
    for (auto& r : range_assertions(var.name)) doc.assertions.push_back(r);
  for (int v = 0; v < arena.size(); ++v)
    if (in_t[v])
      doc.assertions.push_back(e_op(Expr::Eq, {e_var(nm.h(arena.id(v))), e_const(0)}));
  for (int v = 0; v < arena.size(); ++v) doc.assertions.push_back(selection_formula(arena, nm, v));
  for (int v = 0; v < arena.size(); ++v)
    if (!in_t[v]) doc.assertions.push_back(clamp_formula(arena, mech, nm, v));
  return doc;
}

ModelDocument export_buchi_bilevel(const Arena& arena, const std::vector<int>& b_set,
                                   const Mechanism& mech) {
  if (b_set.empty()) throw std::invalid_argument("export_buchi_bilevel: B must be nonempty");
  const auto in_b = mark(arena, b_set);

  if (mech.effective_tau() == 0) {
    // Bilevel MILP: outer minimum over B, inner maximum off B, the same
    // linearized fixed-point rows at every vertex.
    MilpBuilder b(arena);
    b.doc.kind = ModelKind::BilevelQuantified;
    b.doc.sense = Sense::Minimize;
    b.doc.inner_sense = Sense::Maximize;
    b.declare_h();
    for (int v = 0; v < arena.size(); ++v) {
      if (in_b[v])
        b.doc.objective.push_back({1, h_name(arena.id(v))});
      else
        b.doc.inner_objective.push_back({1, h_name(arena.id(v))});
    }
    for (int v = 0; v < arena.size(); ++v) b.add_selection(v);
    for (int v = 0; v < arena.size(); ++v) b.add_clamp(v);
    return std::move(b.doc);
  }

  // Quantified formula: a fixed point h that is least on B among all fixed
  // points and greatest off B among those agreeing on B.
  ModelDocument doc;
  doc.kind = ModelKind::BilevelQuantified;
  doc.logic = "NRA";
  VarNaming nm;
  VarNaming primed{"hq_", "hqp_", "hqm_"};
  for (int v = 0; v < arena.size(); ++v) {
    doc.variables.push_back({nm.h(arena.id(v))});
    doc.variables.push_back({nm.hp(arena.id(v))});
    doc.variables.push_back({nm.hm(arena.id(v))});
  }
  const std::vector<char> no_pins(arena.size(), 0);
  doc.assertions.push_back(fixpoint_formula(arena, mech, nm, no_pins));

  std::vector<std::string> symbols;
  for (int v = 0; v < arena.size(); ++v) {
    symbols.push_back(primed.h(arena.id(v)));
    symbols.push_back(primed.hp(arena.id(v)));
    symbols.push_back(primed.hm(arena.id(v)));
  }
  ExprPtr primed_fix = fixpoint_formula(arena, mech, primed, no_pins);

  auto sum_over_b = [&](const VarNaming& n) {
    ExprPtr s;
    for (int v : b_set) {
      ExprPtr hv = e_var(n.h(arena.id(v)));
      s = s ? e_op(Expr::Add, {s, hv}) : hv;
    }
    return s;
  };
  doc.assertions.push_back(e_forall(
      symbols, e_op(Expr::Implies, {primed_fix, e_op(Expr::Ge, {sum_over_b(primed), sum_over_b(nm)})})));

  std::vector<ExprPtr> agree, dominated;
  for (int v = 0; v < arena.size(); ++v) {
    if (in_b[v])
      agree.push_back(e_op(Expr::Eq, {e_var(primed.h(arena.id(v))), e_var(nm.h(arena.id(v)))}));
    else
      dominated.push_back(e_op(Expr::Le, {e_var(primed.h(arena.id(v))), e_var(nm.h(arena.id(v)))}));
  }
  if (!dominated.empty()) {
    std::vector<ExprPtr> ante = {fixpoint_formula(arena, mech, primed, no_pins)};
    for (auto& a : agree) ante.push_back(a);
    doc.assertions.push_back(
        e_forall(symbols, e_op(Expr::Implies, {conj(std::move(ante)), conj(std::move(dominated))})));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

std::string fmt_terms(const std::vector<LinearTerm>& terms) {
  std::ostringstream os;
  for (const auto& t : terms) {
    os << (t.coeff < 0 ? " - " : " + ") << format_rational(ScalarOps<Rational>::abs(t.coeff)) << " "
       << t.var;
  }
  return os.str();
}

std::string emit_lp(const ModelDocument& doc) {
  std::ostringstream os;
  os << "\\ kind: " << (doc.kind == ModelKind::MILP ? "milp" : "bilevel") << "\n";
  os << "\\ big-m: " << format_rational(doc.big_m) << "\n";
  if (doc.kind == ModelKind::BilevelQuantified) {
    os << "\\ inner-sense: " << (doc.inner_sense == Sense::Maximize ? "maximize" : "minimize")
       << "\n";
    os << "\\ inner-obj:" << fmt_terms(doc.inner_objective) << "\n";
  }
  os << (doc.sense == Sense::Maximize ? "Maximize" : "Minimize") << "\n";
  os << " obj:" << fmt_terms(doc.objective) << "\n";
  os << "Subject To\n";
  for (const auto& row : doc.rows) {
    os << " " << row.name << ":" << fmt_terms(row.terms) << " "
       << (row.rel == LinearConstraint::LE ? "<=" : row.rel == LinearConstraint::GE ? ">=" : "=")
       << " " << format_rational(row.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& var : doc.variables)
    os << " " << format_rational(var.lb) << " <= " << var.name << " <= " << format_rational(var.ub)
       << "\n";
  bool any_binary = false;
  for (const auto& var : doc.variables)
    if (var.is_binary) any_binary = true;
  if (any_binary) {
    os << "Binaries\n";
    for (const auto& var : doc.variables)
      if (var.is_binary) os << " " << var.name << "\n";
  }
  os << "End\n";
  return os.str();
}

void emit_const(std::ostream& os, const Rational& v) {
  if (v < 0) {
    os << "(- ";
    if (v.get_den() == 1)
      os << mpz_class(-v.get_num()).get_str();
    else
      os << "(/ " << mpz_class(-v.get_num()).get_str() << " " << v.get_den().get_str() << ")";
    os << ")";
  } else if (v.get_den() == 1) {
    os << v.get_num().get_str();
  } else {
    os << "(/ " << v.get_num().get_str() << " " << v.get_den().get_str() << ")";
  }
}

void emit_expr(std::ostream& os, const ExprPtr& e) {
  switch (e->op) {
    case Expr::Const:
      emit_const(os, e->value);
      return;
    case Expr::Var:
      os << e->name;
      return;
    case Expr::Forall: {
      os << "(forall (";
      for (std::size_t i = 0; i < e->symbols.size(); ++i)
        os << (i ? " (" : "(") << e->symbols[i] << " Real)";
      os << ") ";
      emit_expr(os, e->kids[0]);
      os << ")";
      return;
    }
    default:
      break;
  }
  static const std::map<Expr::Op, std::string> names = {
      {Expr::Add, "+"},     {Expr::Sub, "-"},  {Expr::Mul, "*"},  {Expr::Div, "/"},
      {Expr::Neg, "-"},     {Expr::Eq, "="},   {Expr::Le, "<="},  {Expr::Ge, ">="},
      {Expr::Lt, "<"},      {Expr::Gt, ">"},   {Expr::And, "and"}, {Expr::Or, "or"},
      {Expr::Not, "not"},   {Expr::Implies, "=>"}};
  os << "(" << names.at(e->op);
  for (const auto& k : e->kids) {
    os << " ";
    emit_expr(os, k);
  }
  os << ")";
}

std::string emit_smt(const ModelDocument& doc) {
  std::ostringstream os;
  os << "(set-logic " << doc.logic << ")\n";
  for (const auto& var : doc.variables) os << "(declare-const " << var.name << " Real)\n";
  for (const auto& a : doc.assertions) {
    os << "(assert ";
    emit_expr(os, a);
    os << ")\n";
  }
  os << "(check-sat)\n";
  return os.str();
}

}  // namespace

std::string emit(const ModelDocument& doc) {
  return doc.logic.empty() ? emit_lp(doc) : emit_smt(doc);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<LinearTerm> parse_terms(const std::vector<std::string>& toks, std::size_t begin,
                                    std::size_t end) {
  std::vector<LinearTerm> terms;
  for (std::size_t i = begin; i + 2 < end + 1; i += 3) {
    const std::string& sign = toks[i];
    if (sign != "+" && sign != "-") throw std::invalid_argument("bad term sign: " + sign);
    Rational c = parse_rational(toks[i + 1]);
    if (sign == "-") c = -c;
    terms.push_back({c, toks[i + 2]});
  }
  return terms;
}

}  // namespace

ModelDocument parse_lp(const std::string& text) {
  ModelDocument doc;
  doc.kind = ModelKind::MILP;
  enum Section { None, Objective, Rows, Bounds, Binaries } section = None;
  std::istringstream is(text);
  std::string line;
  std::map<std::string, std::size_t> var_index;
  while (std::getline(is, line)) {
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "\\") {
      if (toks.size() >= 3 && toks[1] == "kind:")
        doc.kind = toks[2] == "bilevel" ? ModelKind::BilevelQuantified : ModelKind::MILP;
      else if (toks.size() >= 3 && toks[1] == "big-m:")
        doc.big_m = parse_rational(toks[2]);
      else if (toks.size() >= 3 && toks[1] == "inner-sense:")
        doc.inner_sense = toks[2] == "maximize" ? Sense::Maximize : Sense::Minimize;
      else if (toks.size() >= 2 && toks[1] == "inner-obj:")
        doc.inner_objective = parse_terms(toks, 2, toks.size() - 1);
      continue;
    }
    if (toks[0] == "Maximize" || toks[0] == "Minimize") {
      doc.sense = toks[0] == "Maximize" ? Sense::Maximize : Sense::Minimize;
      section = Objective;
      continue;
    }
    if (toks[0] == "Subject") {
      section = Rows;
      continue;
    }
    if (toks[0] == "Bounds") {
      section = Bounds;
      continue;
    }
    if (toks[0] == "Binaries") {
      section = Binaries;
      continue;
    }
    if (toks[0] == "End") break;
    switch (section) {
      case Objective:
        doc.objective = parse_terms(toks, 1, toks.size() - 1);
        break;
      case Rows: {
        if (toks[0].empty() || toks[0].back() != ':')
          throw std::invalid_argument("constraint row without a name: " + line);
        LinearConstraint row;
        row.name = toks[0].substr(0, toks[0].size() - 1);
        const std::string& rel = toks[toks.size() - 2];
        row.rel = rel == "<=" ? LinearConstraint::LE
                 : rel == ">=" ? LinearConstraint::GE
                               : LinearConstraint::EQ;
        if (rel != "<=" && rel != ">=" && rel != "=")
          throw std::invalid_argument("bad relation in row: " + line);
        row.rhs = parse_rational(toks.back());
        row.terms = parse_terms(toks, 1, toks.size() - 3);
        doc.rows.push_back(std::move(row));
        break;
      }
      case Bounds: {
        if (toks.size() != 5 || toks[1] != "<=" || toks[3] != "<=")
          throw std::invalid_argument("bad bounds line: " + line);
        var_index[toks[2]] = doc.variables.size();
        doc.variables.push_back({toks[2], parse_rational(toks[0]), parse_rational(toks[4]), false});
        break;
      }
      case Binaries: {
        for (const auto& name : toks) {
          auto it = var_index.find(name);
          if (it == var_index.end()) throw std::invalid_argument("binary for unknown variable: " + name);
          doc.variables[it->second].is_binary = true;
        }
        break;
      }
      case None:
        throw std::invalid_argument("content outside any LP section: " + line);
    }
  }
  return doc;
}

namespace {

struct SExpr {
  std::string atom;              // nonempty for atoms
  std::vector<SExpr> kids;       // for lists
  bool is_atom() const { return !atom.empty(); }
};

std::vector<std::string> tokenize_smt(const std::string& text) {
  std::vector<std::string> toks;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      if (!cur.empty()) toks.push_back(std::exchange(cur, ""));
      toks.push_back(std::string(1, c));
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) toks.push_back(std::exchange(cur, ""));
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

SExpr read_sexpr(const std::vector<std::string>& toks, std::size_t& pos) {
  if (pos >= toks.size()) throw std::invalid_argument("unexpected end of SMT input");
  if (toks[pos] == "(") {
    ++pos;
    SExpr list;
    while (pos < toks.size() && toks[pos] != ")") list.kids.push_back(read_sexpr(toks, pos));
    if (pos >= toks.size()) throw std::invalid_argument("unbalanced parenthesis in SMT input");
    ++pos;  // consume ')'
    return list;
  }
  SExpr atom;
  atom.atom = toks[pos++];
  return atom;
}

ExprPtr sexpr_to_expr(const SExpr& s) {
  if (s.is_atom()) {
    const char c = s.atom[0];
    if (std::isdigit(static_cast<unsigned char>(c))) return e_const(parse_rational(s.atom));
    return e_var(s.atom);
  }
  if (s.kids.empty()) throw std::invalid_argument("empty SMT list");
  const std::string& head = s.kids[0].atom;
  if (head == "forall") {
    std::vector<std::string> symbols;
    for (const auto& binding : s.kids[1].kids) symbols.push_back(binding.kids[0].atom);
    return e_forall(std::move(symbols), sexpr_to_expr(s.kids[2]));
  }
  static const std::map<std::string, Expr::Op> ops = {
      {"+", Expr::Add}, {"*", Expr::Mul}, {"/", Expr::Div}, {"=", Expr::Eq},
      {"<=", Expr::Le}, {">=", Expr::Ge}, {"<", Expr::Lt},  {">", Expr::Gt},
      {"and", Expr::And}, {"or", Expr::Or}, {"not", Expr::Not}, {"=>", Expr::Implies}};
  std::vector<ExprPtr> kids;
  for (std::size_t i = 1; i < s.kids.size(); ++i) kids.push_back(sexpr_to_expr(s.kids[i]));
  Expr::Op op;
  if (head == "-")
    op = kids.size() == 1 ? Expr::Neg : Expr::Sub;
  else {
    auto it = ops.find(head);
    if (it == ops.end()) throw std::invalid_argument("unknown SMT operator: " + head);
    op = it->second;
  }
  // Fold constant negation and division back into rational literals so
  // parse(emit(e)) is structurally identical to e.
  if (op == Expr::Neg && kids[0]->op == Expr::Const) return e_const(-kids[0]->value);
  if (op == Expr::Div && kids.size() == 2 && kids[0]->op == Expr::Const &&
      kids[1]->op == Expr::Const)
    return e_const(kids[0]->value / kids[1]->value);
  return e_op(op, std::move(kids));
}

}  // namespace

ModelDocument parse_smt(const std::string& text) {
  ModelDocument doc;
  auto toks = tokenize_smt(text);
  std::size_t pos = 0;
  while (pos < toks.size()) {
    SExpr form = read_sexpr(toks, pos);
    if (form.is_atom() || form.kids.empty() || !form.kids[0].is_atom()) continue;
    const std::string& head = form.kids[0].atom;
    if (head == "set-logic")
      doc.logic = form.kids[1].atom;
    else if (head == "declare-const")
      doc.variables.push_back({form.kids[1].atom});
    else if (head == "assert")
      doc.assertions.push_back(sexpr_to_expr(form.kids[1]));
  }
  doc.kind = doc.logic == "NRA" ? ModelKind::BilevelQuantified : ModelKind::ETR;
  return doc;
}

ModelDocument parse(const std::string& text) {
  return text.find("(set-logic") != std::string::npos ? parse_smt(text) : parse_lp(text);
}

// ---------------------------------------------------------------------------
// Residual checking
// ---------------------------------------------------------------------------

namespace {

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

// Collect per-hp/hm successor h-variables from the linear rows and the
// quantifier-free assertions, then fill in argmax/argmin values.
void infer_extrema(const ModelDocument& doc, std::map<std::string, Rational>& values) {
  std::map<std::string, std::vector<std::string>> hi_succ, lo_succ;
  for (const auto& row : doc.rows) {
    if (row.terms.size() != 2 || row.rhs != 0) continue;
    const auto& t0 = row.terms[0];
    const auto& t1 = row.terms[1];
    if (t0.coeff != 1 || t1.coeff != -1) continue;
    if (row.rel == LinearConstraint::GE && starts_with(t0.var, "hp_"))
      hi_succ[t0.var].push_back(t1.var);
    else if (row.rel == LinearConstraint::LE && starts_with(t0.var, "hm_"))
      lo_succ[t0.var].push_back(t1.var);
  }
  std::function<void(const ExprPtr&)> scan = [&](const ExprPtr& e) {
    if (e->op == Expr::Forall) return;  // only the existential part is checked
    if ((e->op == Expr::Ge || e->op == Expr::Le) && e->kids.size() == 2 &&
        e->kids[0]->op == Expr::Var && e->kids[1]->op == Expr::Var) {
      const std::string& lhs = e->kids[0]->name;
      if (e->op == Expr::Ge && starts_with(lhs, "hp_")) hi_succ[lhs].push_back(e->kids[1]->name);
      if (e->op == Expr::Le && starts_with(lhs, "hm_")) lo_succ[lhs].push_back(e->kids[1]->name);
    }
    for (const auto& k : e->kids) scan(k);
  };
  for (const auto& a : doc.assertions) scan(a);

  auto value_of = [&values](const std::string& name) {
    auto it = values.find(name);
    if (it == values.end()) throw MissingVariable("assignment is missing variable " + name);
    return it->second;
  };
  for (const auto& [hp, succ] : hi_succ) {
    if (values.count(hp)) continue;
    Rational best = value_of(succ[0]);
    for (const auto& w : succ) best = std::max(best, value_of(w));
    values[hp] = best;
  }
  for (const auto& [hm, succ] : lo_succ) {
    if (values.count(hm)) continue;
    Rational best = value_of(succ[0]);
    for (const auto& w : succ) best = std::min(best, value_of(w));
    values[hm] = best;
  }
}

// Selector binaries: 1 on the first successor attaining the extremum.
void infer_selectors(const ModelDocument& doc, std::map<std::string, Rational>& values) {
  std::map<std::string, bool> chosen;  // hp_/hm_ var -> already matched
  for (const auto& row : doc.rows) {
    if (row.terms.size() != 3) continue;
    const auto& ext = row.terms[0];
    const auto& succ = row.terms[1];
    const auto& sel = row.terms[2];
    const bool hi = row.rel == LinearConstraint::LE && starts_with(ext.var, "hp_");
    const bool lo = row.rel == LinearConstraint::GE && starts_with(ext.var, "hm_");
    if (!hi && !lo) continue;
    if (values.count(sel.var)) continue;
    auto e = values.find(ext.var);
    auto s = values.find(succ.var);
    if (e == values.end() || s == values.end())
      throw MissingVariable("assignment is missing variable " + succ.var);
    const bool attains = e->second == s->second;
    bool& done = chosen[ext.var];
    values[sel.var] = Rational(attains && !done ? 1 : 0);
    if (attains && !done) done = true;
  }
}

// Absolute-value carriers: a = |y| with y recovered from the first
// lower-bound row of each group; z = 1 exactly when y is negative.
void infer_abs(const ModelDocument& doc, std::map<std::string, Rational>& values) {
  for (const auto& var : doc.variables) {
    if (!starts_with(var.name, "a_") || values.count(var.name)) continue;
    for (const auto& row : doc.rows) {
      if (row.rel != LinearConstraint::GE) continue;
      bool carries = false;
      for (const auto& t : row.terms)
        if (t.var == var.name && t.coeff == 1) carries = true;
      if (!carries) continue;
      Rational y = row.rhs;
      for (const auto& t : row.terms) {
        if (t.var == var.name) continue;
        auto it = values.find(t.var);
        if (it == values.end()) throw MissingVariable("assignment is missing variable " + t.var);
        y -= t.coeff * it->second;
      }
      values[var.name] = ScalarOps<Rational>::abs(y);
      values["z_" + var.name.substr(2)] = Rational(y < 0 ? 1 : 0);
      break;
    }
  }
}

Rational eval_arith(const ExprPtr& e, const std::map<std::string, Rational>& values) {
  switch (e->op) {
    case Expr::Const:
      return e->value;
    case Expr::Var: {
      auto it = values.find(e->name);
      if (it == values.end()) throw MissingVariable("assignment is missing variable " + e->name);
      return it->second;
    }
    case Expr::Add:
      return eval_arith(e->kids[0], values) + eval_arith(e->kids[1], values);
    case Expr::Sub:
      return eval_arith(e->kids[0], values) - eval_arith(e->kids[1], values);
    case Expr::Mul:
      return eval_arith(e->kids[0], values) * eval_arith(e->kids[1], values);
    case Expr::Div:
      return eval_arith(e->kids[0], values) / eval_arith(e->kids[1], values);
    case Expr::Neg:
      return -eval_arith(e->kids[0], values);
    default:
      throw std::invalid_argument("expected an arithmetic expression");
  }
}

// 0 when the formula holds; otherwise a positive witness of how far off
// the failing comparison is.
Rational eval_violation(const ExprPtr& e, const std::map<std::string, Rational>& values) {
  auto cmp = [&](auto holds) {
    Rational l = eval_arith(e->kids[0], values), r = eval_arith(e->kids[1], values);
    return holds(l, r) ? Rational(0) : ScalarOps<Rational>::abs(l - r);
  };
  switch (e->op) {
    case Expr::Eq:
      return cmp([](const Rational& l, const Rational& r) { return l == r; });
    case Expr::Le:
      return cmp([](const Rational& l, const Rational& r) { return l <= r; });
    case Expr::Ge:
      return cmp([](const Rational& l, const Rational& r) { return l >= r; });
    case Expr::Lt:
      return cmp([](const Rational& l, const Rational& r) { return l < r; });
    case Expr::Gt:
      return cmp([](const Rational& l, const Rational& r) { return l > r; });
    case Expr::And: {
      Rational worst(0);
      for (const auto& k : e->kids) worst = std::max(worst, eval_violation(k, values));
      return worst;
    }
    case Expr::Or: {
      Rational best(-1);
      for (const auto& k : e->kids) {
        Rational v = eval_violation(k, values);
        if (best < 0 || v < best) best = v;
        if (best == 0) break;
      }
      return best < 0 ? Rational(1) : best;
    }
    case Expr::Not:
      return eval_violation(e->kids[0], values) > 0 ? Rational(0) : Rational(1);
    case Expr::Implies: {
      if (eval_violation(e->kids[0], values) > 0) return Rational(0);
      return eval_violation(e->kids[1], values);
    }
    case Expr::Forall:
      return Rational(0);  // only the existential part is checked
    default:
      throw std::invalid_argument("expected a boolean formula");
  }
}

}  // namespace

ResidualReport check_model_residual(const ModelDocument& doc,
                                    const std::map<std::string, Rational>& assignment) {
  std::map<std::string, Rational> values = assignment;
  infer_extrema(doc, values);
  infer_selectors(doc, values);
  infer_abs(doc, values);

  ResidualReport report;
  auto record = [&report](const std::string& name, const Rational& slack) {
    if (slack > 0) {
      report.violations.push_back({name, slack});
      report.max_violation = std::max(report.max_violation, slack);
    } else {
      ++report.satisfied;
    }
  };

  for (const auto& row : doc.rows) {
    Rational lhs(0);
    for (const auto& t : row.terms) {
      auto it = values.find(t.var);
      if (it == values.end()) throw MissingVariable("assignment is missing variable " + t.var);
      lhs += t.coeff * it->second;
    }
    Rational slack(0);
    switch (row.rel) {
      case LinearConstraint::LE:
        slack = std::max(Rational(0), Rational(lhs - row.rhs));
        break;
      case LinearConstraint::GE:
        slack = std::max(Rational(0), Rational(row.rhs - lhs));
        break;
      case LinearConstraint::EQ:
        slack = ScalarOps<Rational>::abs(lhs - row.rhs);
        break;
    }
    record(row.name, slack);
  }
  for (const auto& var : doc.variables) {
    auto it = values.find(var.name);
    if (it == values.end()) throw MissingVariable("assignment is missing variable " + var.name);
    record("bound_" + var.name,
           std::max(std::max(Rational(0), Rational(var.lb - it->second)),
                    Rational(it->second - var.ub)));
  }
  for (std::size_t i = 0; i < doc.assertions.size(); ++i) {
    if (doc.assertions[i]->op == Expr::Forall) continue;
    record("assert_" + std::to_string(i), eval_violation(doc.assertions[i], values));
  }
  return report;
}

}  // namespace bgc::model
