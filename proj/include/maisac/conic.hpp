#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "maisac/common.hpp"

namespace maisac {

/// Complex Hermitian PSD matrix variable. Its dim^2 real coordinates start at
/// `offset`: dim diagonal entries, then Re W_ij, then Im W_ij for i < j in
/// row-major order.
struct HermitianVar {
  int id = -1;
  int offset = 0;
  int dim = 0;
};

struct ScalarVar {
  int index = -1;
};

/// constant + sum coef * x over real coordinates.
struct LinearExpr {
  double constant = 0.0;
  std::map<int, double> terms;

  LinearExpr() = default;
  LinearExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)

  LinearExpr& operator+=(const LinearExpr& o);
  LinearExpr& operator-=(const LinearExpr& o);
  LinearExpr& operator*=(double s);
  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
  friend LinearExpr operator*(LinearExpr a, double s) { return a *= s; }
  friend LinearExpr operator*(double s, LinearExpr a) { return a *= s; }

  double evaluate(const RVector& x) const;
};

/// Hermitian-matrix-valued affine expression:
/// constant + sum_i x_i F_i + sum_k L_k W_k L_k^H.
struct MatrixExpr {
  CMatrix constant;
  std::vector<std::pair<ScalarVar, CMatrix>> scalar_terms;
  std::vector<std::pair<HermitianVar, CMatrix>> congruences;
};

enum class ConicStatus { optimal, infeasible, numerical_failure };

const char* to_string(ConicStatus s);

struct ConicSettings {
  double feasibility_tolerance = 1e-8;
  double gap_tolerance = 1e-7;
  int max_iterations = 200;  // Newton steps per phase
};

class ConicProblem;

struct ConicSolution {
  ConicStatus status = ConicStatus::numerical_failure;
  RVector x;
  double objective = kInfinity;
  int iterations = 0;
  double gap = kInfinity;            // barrier duality gap bound, objective units
  double dual_residual = kInfinity;  // centering gradient norm over barrier weight
  double primal_residual = kInfinity;
  double min_psd_eigenvalue = -kInfinity;
  std::string message;

  CMatrix value(const HermitianVar& v) const;
  double value(const ScalarVar& v) const { return x(v.index); }
  double value(const LinearExpr& e) const { return e.evaluate(x); }
};

/// Minimize a linear objective over Hermitian PSD blocks and real scalars
/// subject to nonnegativity rows, rotated second-order cones and LMIs.
class ConicProblem {
 public:
  HermitianVar add_hermitian(std::string name, int dim);
  /// `lower` = -inf leaves the scalar free.
  ScalarVar add_scalar(std::string name, double lower = -kInfinity);

  LinearExpr var(const ScalarVar& v) const;
  /// Re tr(C^H W); equals tr(C W) for Hermitian C.
  LinearExpr inner(const HermitianVar& w, const CMatrix& c) const;
  LinearExpr trace(const HermitianVar& w) const;
  /// h^H W h.
  LinearExpr quadratic(const HermitianVar& w, const CVector& h) const;

  void minimize(LinearExpr objective);
  /// expr >= 0.
  void add_nonnegative(LinearExpr expr, std::string label = {});
  /// 2 u v >= sum w_k^2 with u, v >= 0.
  void add_rotated_cone(LinearExpr u, LinearExpr v, std::vector<LinearExpr> w,
                        std::string label = {});
  /// expr is Hermitian PSD.
  void add_lmi(MatrixExpr expr, std::string label = {});

  int variable_count() const { return variable_count_; }
  const std::vector<HermitianVar>& hermitian_vars() const { return hermitians_; }

  /// Packs a Hermitian matrix into the real coordinates of `w` inside `x`.
  void pack(const HermitianVar& w, const CMatrix& value, RVector& x) const;

  struct NonnegativeRow {
    LinearExpr expr;
    std::string label;
  };
  struct RotatedCone {
    LinearExpr u;
    LinearExpr v;
    std::vector<LinearExpr> w;
    std::string label;
  };
  struct Lmi {
    MatrixExpr expr;
    std::string label;
  };

  const LinearExpr& objective() const { return objective_; }
  const std::vector<NonnegativeRow>& nonnegative_rows() const { return rows_; }
  const std::vector<RotatedCone>& rotated_cones() const { return cones_; }
  const std::vector<Lmi>& lmis() const { return lmis_; }
  const std::vector<std::string>& coordinate_names() const { return names_; }

 private:
  void check_expr(const LinearExpr& e) const;

  int variable_count_ = 0;
  std::vector<HermitianVar> hermitians_;
  std::vector<std::string> names_;
  LinearExpr objective_;
  std::vector<NonnegativeRow> rows_;
  std::vector<RotatedCone> cones_;
  std::vector<Lmi> lmis_;
};

/// Deterministic single-threaded log-barrier interior-point method. A
/// `hint` is used as the phase-one starting point (or skips phase one when
/// strictly feasible).
ConicSolution solve(const ConicProblem& problem, const ConicSettings& settings = {},
                    const RVector* hint = nullptr);

/// Plain-text dump: coordinates, objective, every cone with its coefficients.
void write_problem(const ConicProblem& problem, std::ostream& out);

/// Real embedding [Re -Im; Im Re] of a complex matrix.
RMatrix real_embedding(const CMatrix& m);

}  // namespace maisac
