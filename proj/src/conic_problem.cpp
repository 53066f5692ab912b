#include <ostream>

#include "maisac/conic.hpp"

namespace maisac {

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
  constant += o.constant;
  for (const auto& [k, v] : o.terms) terms[k] += v;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& o) {
  constant -= o.constant;
  for (const auto& [k, v] : o.terms) terms[k] -= v;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
  constant *= s;
  for (auto& [k, v] : terms) v *= s;
  return *this;
}

double LinearExpr::evaluate(const RVector& x) const {
  double s = constant;
  for (const auto& [k, v] : terms) s += v * x(k);
  return s;
}

const char* to_string(ConicStatus s) {
  switch (s) {
    case ConicStatus::optimal:
      return "optimal";
    case ConicStatus::infeasible:
      return "infeasible";
    case ConicStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

CMatrix ConicSolution::value(const HermitianVar& v) const {
  const int k = v.dim;
  CMatrix w = CMatrix::Zero(k, k);
  int idx = v.offset;
  for (int i = 0; i < k; ++i) w(i, i) = x(idx++);
  const int pairs = k * (k - 1) / 2;
  int p = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j, ++p) {
      const Complex z{x(idx + p), x(idx + pairs + p)};
      w(i, j) = z;
      w(j, i) = std::conj(z);
    }
  }
  return w;
}

HermitianVar ConicProblem::add_hermitian(std::string name, int dim) {
  if (dim < 1) throw ConfigError("Hermitian variable needs positive dimension");
  HermitianVar v{static_cast<int>(hermitians_.size()), variable_count_, dim};
  for (int i = 0; i < dim; ++i) names_.push_back(name + "[" + std::to_string(i) + "," + std::to_string(i) + "]");
  for (const char* part : {"re", "im"}) {
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        names_.push_back(name + "." + part + "[" + std::to_string(i) + "," + std::to_string(j) + "]");
      }
    }
  }
  variable_count_ += dim * dim;
  hermitians_.push_back(v);
  MatrixExpr psd;
  psd.constant = CMatrix::Zero(dim, dim);
  psd.congruences.emplace_back(v, CMatrix::Identity(dim, dim));
  lmis_.push_back({std::move(psd), name + " psd"});
  return v;
}

ScalarVar ConicProblem::add_scalar(std::string name, double lower) {
  ScalarVar v{variable_count_++};
  names_.push_back(name);
  if (std::isfinite(lower)) rows_.push_back({var(v) - LinearExpr(lower), name + " lower bound"});
  return v;
}

LinearExpr ConicProblem::var(const ScalarVar& v) const {
  if (v.index < 0 || v.index >= variable_count_) throw DomainError("undeclared scalar variable");
  LinearExpr e;
  e.terms[v.index] = 1.0;
  return e;
}

LinearExpr ConicProblem::inner(const HermitianVar& w, const CMatrix& c) const {
  if (w.id < 0 || w.id >= static_cast<int>(hermitians_.size())) {
    throw DomainError("undeclared Hermitian variable");
  }
  if (c.rows() != w.dim || c.cols() != w.dim) throw DomainError("coefficient matrix has wrong size");
  const int k = w.dim;
  const int pairs = k * (k - 1) / 2;
  LinearExpr e;
  for (int i = 0; i < k; ++i) e.terms[w.offset + i] = c(i, i).real();
  int p = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j, ++p) {
      e.terms[w.offset + k + p] = (c(i, j) + c(j, i)).real();
      e.terms[w.offset + k + pairs + p] = c(i, j).imag() - c(j, i).imag();
    }
  }
  return e;
}

LinearExpr ConicProblem::trace(const HermitianVar& w) const {
  return inner(w, CMatrix::Identity(w.dim, w.dim));
}

LinearExpr ConicProblem::quadratic(const HermitianVar& w, const CVector& h) const {
  return inner(w, h * h.adjoint());
}

void ConicProblem::check_expr(const LinearExpr& e) const {
  for (const auto& [k, v] : e.terms) {
    if (k < 0 || k >= variable_count_) throw DomainError("expression references undeclared variable");
    if (!std::isfinite(v)) throw DomainError("expression has non-finite coefficient");
  }
  if (!std::isfinite(e.constant)) throw DomainError("expression has non-finite constant");
}

void ConicProblem::minimize(LinearExpr objective) {
  check_expr(objective);
  objective_ = std::move(objective);
}

void ConicProblem::add_nonnegative(LinearExpr expr, std::string label) {
  check_expr(expr);
  rows_.push_back({std::move(expr), std::move(label)});
}

void ConicProblem::add_rotated_cone(LinearExpr u, LinearExpr v, std::vector<LinearExpr> w,
                                    std::string label) {
  check_expr(u);
  check_expr(v);
  for (const auto& e : w) check_expr(e);
  cones_.push_back({std::move(u), std::move(v), std::move(w), std::move(label)});
}

void ConicProblem::add_lmi(MatrixExpr expr, std::string label) {
  const auto n = expr.constant.rows();
  if (n == 0 || expr.constant.cols() != n) throw DomainError("LMI constant must be square");
  for (const auto& [s, f] : expr.scalar_terms) {
    if (s.index < 0 || s.index >= variable_count_) throw DomainError("LMI references undeclared scalar");
    if (f.rows() != n || f.cols() != n) throw DomainError("LMI term has wrong size");
  }
  for (const auto& [w, l] : expr.congruences) {
    if (w.id < 0 || w.id >= static_cast<int>(hermitians_.size())) {
      throw DomainError("LMI references undeclared Hermitian variable");
    }
    if (l.rows() != n || l.cols() != w.dim) throw DomainError("LMI congruence has wrong size");
  }
  lmis_.push_back({std::move(expr), std::move(label)});
}

void ConicProblem::pack(const HermitianVar& w, const CMatrix& value, RVector& x) const {
  if (value.rows() != w.dim || value.cols() != w.dim) throw DomainError("value has wrong size");
  if (x.size() != variable_count_) throw DomainError("coordinate vector has wrong size");
  const int k = w.dim;
  const int pairs = k * (k - 1) / 2;
  for (int i = 0; i < k; ++i) x(w.offset + i) = value(i, i).real();
  int p = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j, ++p) {
      x(w.offset + k + p) = value(i, j).real();
      x(w.offset + k + pairs + p) = value(i, j).imag();
    }
  }
}

RMatrix real_embedding(const CMatrix& m) {
  const auto r = m.rows();
  const auto c = m.cols();
  RMatrix e(2 * r, 2 * c);
  e.topLeftCorner(r, c) = m.real();
  e.topRightCorner(r, c) = -m.imag();
  e.bottomLeftCorner(r, c) = m.imag();
  e.bottomRightCorner(r, c) = m.real();
  return e;
}

namespace {

void write_expr(std::ostream& out, const LinearExpr& e) {
  out << e.constant;
  for (const auto& [k, v] : e.terms) {
    if (v != 0.0) out << " " << k << ":" << v;
  }
  out << "\n";
}

void write_matrix(std::ostream& out, const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << " (" << m(i, j).real() << "," << m(i, j).imag() << ")";
    }
    out << "\n";
  }
}

}  // namespace

void write_problem(const ConicProblem& problem, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "variables " << problem.variable_count() << "\n";
  const auto& names = problem.coordinate_names();
  for (std::size_t i = 0; i < names.size(); ++i) out << "  " << i << " " << names[i] << "\n";
  out << "objective ";
  write_expr(out, problem.objective());
  for (const auto& r : problem.nonnegative_rows()) {
    out << "nonnegative " << r.label << "\n  ";
    write_expr(out, r.expr);
  }
  for (const auto& c : problem.rotated_cones()) {
    out << "rotated_cone " << c.label << " terms " << c.w.size() << "\n  u ";
    write_expr(out, c.u);
    out << "  v ";
    write_expr(out, c.v);
    for (const auto& w : c.w) {
      out << "  w ";
      write_expr(out, w);
    }
  }
  for (const auto& l : problem.lmis()) {
    out << "lmi " << l.label << " dim " << l.expr.constant.rows() << "\n  constant\n";
    write_matrix(out, l.expr.constant);
    for (const auto& [s, f] : l.expr.scalar_terms) {
      out << "  scalar " << s.index << "\n";
      write_matrix(out, f);
    }
    for (const auto& [w, m] : l.expr.congruences) {
      out << "  congruence block " << w.id << "\n";
      write_matrix(out, m);
    }
  }
  out.precision(old_precision);
}

}  // namespace maisac
