#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgc/arena.hpp"
#include "bgc/game.hpp"
#include "bgc/rational.hpp"

namespace bgc::model {

enum class ModelKind { MILP, ETR, BilevelQuantified };
enum class Sense { Maximize, Minimize };

struct Variable {
  std::string name;
  Rational lb = 0, ub = 1;
  bool is_binary = false;
  bool operator==(const Variable&) const = default;
};

struct LinearTerm {
  Rational coeff;
  std::string var;
  bool operator==(const LinearTerm&) const = default;
};

struct LinearConstraint {
  enum Rel { LE, GE, EQ };
  std::string name;
  std::vector<LinearTerm> terms;
  Rel rel = EQ;
  Rational rhs = 0;
  bool operator==(const LinearConstraint&) const = default;
};

/// Expression tree for the nonlinear (real-arithmetic) encodings.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum Op {
    Const, Var, Add, Sub, Mul, Div, Neg,
    Eq, Le, Ge, Lt, Gt,
    And, Or, Not, Implies, Forall
  };
  Op op = Const;
  Rational value = 0;                 // Const
  std::string name;                   // Var
  std::vector<std::string> symbols;   // Forall bound variables
  std::vector<ExprPtr> kids;
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

ExprPtr e_const(Rational v);
ExprPtr e_var(std::string name);
ExprPtr e_op(Expr::Op op, std::vector<ExprPtr> kids);
ExprPtr e_forall(std::vector<std::string> symbols, ExprPtr body);

/// One of the paper-derived optimization encodings as a standard-format
/// model file. Deterministic variable naming: h_<v>, hp_<v>, hm_<v>,
/// b_<v>_<w>, c_<v>_<w>, a_<n>, z_<n>.
struct ModelDocument {
  ModelKind kind = ModelKind::MILP;
  std::vector<Variable> variables;
  Sense sense = Sense::Maximize;
  std::vector<LinearTerm> objective;
  std::vector<LinearConstraint> rows;
  // Bilevel MILP only:
  Sense inner_sense = Sense::Maximize;
  std::vector<LinearTerm> inner_objective;
  // Real-arithmetic documents only:
  std::string logic;
  std::vector<ExprPtr> assertions;
  Rational big_m = 0;

  bool structurally_equal(const ModelDocument& other) const;
};

struct NonRichmanMILPUnsupported : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct MissingVariable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Big-M MILP for the Richman reachability greatest fixed point:
/// maximize sum h(v) subject to boundary h = 0 on T, selector-encoded
/// v+/v- and the absolute-value linearization of clamp.
ModelDocument export_reach_milp(const Arena& arena, const std::vector<int>& targets,
                                const Mechanism& mech);

/// Quantifier-free real-arithmetic fixed-point formula (three-way clamp
/// disjunction per non-target vertex plus v+/v- selection constraints).
ModelDocument export_reach_etr(const Arena& arena, const std::vector<int>& targets,
                               const Mechanism& mech);

/// Buchi encoding: bilevel MILP (min over B outside a max off B) for
/// Richman, quantified real-arithmetic formula for taxman/poorman.
ModelDocument export_buchi_bilevel(const Arena& arena, const std::vector<int>& b_set,
                                   const Mechanism& mech);

/// CPLEX-LP text for MILP/bilevel documents, SMT-LIB 2.6 for the rest.
std::string emit(const ModelDocument& doc);

ModelDocument parse_lp(const std::string& text);
ModelDocument parse_smt(const std::string& text);
ModelDocument parse(const std::string& text);  // dispatches on content

struct ResidualViolation {
  std::string constraint;
  Rational slack;  // positive amount by which the constraint is violated
};

struct ResidualReport {
  long satisfied = 0;
  std::vector<ResidualViolation> violations;
  Rational max_violation = 0;
  bool clean() const { return violations.empty(); }
};

/// Exhaustive exact-rational constraint evaluation of an assignment of
/// the h-variables; auxiliary and selector variables are inferred from
/// the v+/v- selections. Quantified assertions are checked on their
/// existential part only.
ResidualReport check_model_residual(const ModelDocument& doc,
                                    const std::map<std::string, Rational>& assignment);

}  // namespace bgc::model
