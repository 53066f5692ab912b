#include <functional>
#include <map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "maisac/conic.hpp"

namespace maisac {

namespace {

constexpr double kBarrierGrowth = 30.0;

struct Row {
  RVector a;
  double b = 0.0;
  double eval(const RVector& x) const { return a.dot(x) + b; }
};

struct Cone {
  Row u;
  Row v;
  std::vector<Row> w;
};

struct Lmi {
  RMatrix f0;
  std::vector<std::pair<int, RMatrix>> terms;
};

// Barrier problem in real coordinates with every block rescaled to unit
// max-abs coefficient. The objective is c.x, rescaled by 1 / c_scale.
struct Compiled {
  int n = 0;
  RVector c;
  double c_scale = 1.0;
  std::vector<Row> rows;
  std::vector<Cone> cones;
  std::vector<Lmi> lmis;

  double nu() const {
    double s = static_cast<double>(rows.size()) + 2.0 * static_cast<double>(cones.size());
    for (const auto& l : lmis) s += static_cast<double>(l.f0.rows());
    return s;
  }
};

Row to_row(const LinearExpr& e, int n) {
  Row r{RVector::Zero(n), e.constant};
  for (const auto& [k, v] : e.terms) r.a(k) += v;
  return r;
}

double max_abs(const Row& r) { return std::max(r.a.cwiseAbs().maxCoeff(), std::abs(r.b)); }

void scale_row(Row& r, double s) {
  r.a *= s;
  r.b *= s;
}

CMatrix hermitian_basis(int dim, int local) {
  CMatrix e = CMatrix::Zero(dim, dim);
  if (local < dim) {
    e(local, local) = 1.0;
    return e;
  }
  const int pairs = dim * (dim - 1) / 2;
  const bool imag = local >= dim + pairs;
  int p = local - dim - (imag ? pairs : 0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      if (p-- == 0) {
        if (imag) {
          e(i, j) = Complex{0.0, 1.0};
          e(j, i) = Complex{0.0, -1.0};
        } else {
          e(i, j) = 1.0;
          e(j, i) = 1.0;
        }
        return e;
      }
    }
  }
  return e;
}

Lmi compile_lmi(const MatrixExpr& expr) {
  Lmi l;
  l.f0 = real_embedding(expr.constant);
  std::map<int, RMatrix> terms;
  auto accumulate = [&terms](int idx, const RMatrix& f) {
    auto it = terms.find(idx);
    if (it == terms.end()) {
      terms.emplace(idx, f);
    } else {
      it->second += f;
    }
  };
  for (const auto& [s, f] : expr.scalar_terms) accumulate(s.index, real_embedding(f));
  for (const auto& [w, lmat] : expr.congruences) {
    for (int local = 0; local < w.dim * w.dim; ++local) {
      const CMatrix e = hermitian_basis(w.dim, local);
      accumulate(w.offset + local, real_embedding(lmat * e * lmat.adjoint()));
    }
  }
  double scale = l.f0.cwiseAbs().maxCoeff();
  for (auto& [k, f] : terms) {
    // Symmetrize against round-off so the barrier Hessian stays symmetric.
    f = 0.5 * (f + f.transpose()).eval();
    scale = std::max(scale, f.cwiseAbs().maxCoeff());
    l.terms.emplace_back(k, std::move(f));
  }
  if (scale > 0.0) {
    l.f0 /= scale;
    for (auto& [k, f] : l.terms) f /= scale;
  }
  return l;
}

Compiled compile(const ConicProblem& p) {
  Compiled c;
  c.n = p.variable_count();
  c.c = to_row(p.objective(), c.n).a;
  c.c_scale = c.c.size() > 0 ? c.c.cwiseAbs().maxCoeff() : 0.0;
  if (c.c_scale > 0.0) {
    c.c /= c.c_scale;
  } else {
    c.c_scale = 1.0;
  }
  for (const auto& r : p.nonnegative_rows()) {
    Row row = to_row(r.expr, c.n);
    const double m = max_abs(row);
    if (row.a.cwiseAbs().maxCoeff() == 0.0) {
      if (row.b < 0.0) {
        // Constant violated row; keep it so phase one reports infeasibility.
        row.b = -1.0;
      } else {
        continue;
      }
    } else {
      scale_row(row, 1.0 / m);
    }
    c.rows.push_back(std::move(row));
  }
  for (const auto& k : p.rotated_cones()) {
    Cone cone{to_row(k.u, c.n), to_row(k.v, c.n), {}};
    for (const auto& w : k.w) cone.w.push_back(to_row(w, c.n));
    const double su = std::max(max_abs(cone.u), 1e-300);
    const double sv = std::max(max_abs(cone.v), 1e-300);
    scale_row(cone.u, 1.0 / su);
    scale_row(cone.v, 1.0 / sv);
    for (auto& w : cone.w) scale_row(w, 1.0 / std::sqrt(su * sv));
    c.cones.push_back(std::move(cone));
  }
  for (const auto& l : p.lmis()) c.lmis.push_back(compile_lmi(l.expr));
  return c;
}

// Phase one: extra coordinate s shifts every cone inward; s >= -1 and the
// box |x_i| <= radius keep the centering problems bounded.
Compiled shifted(const Compiled& base, double radius) {
  Compiled c;
  c.n = base.n + 1;
  c.c = RVector::Zero(c.n);
  c.c(base.n) = 1.0;
  auto extend = [&](const Row& r, double shift) {
    Row out{RVector::Zero(c.n), r.b};
    out.a.head(base.n) = r.a;
    out.a(base.n) = shift;
    return out;
  };
  for (const auto& r : base.rows) c.rows.push_back(extend(r, 1.0));
  Row bound{RVector::Zero(c.n), 1.0};
  bound.a(base.n) = 1.0;
  c.rows.push_back(bound);
  for (int i = 0; i < base.n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Row box{RVector::Zero(c.n), 1.0};
      box.a(i) = sign / radius;
      c.rows.push_back(box);
    }
  }
  for (const auto& k : base.cones) {
    Cone cone{extend(k.u, 1.0), extend(k.v, 1.0), {}};
    for (const auto& w : k.w) cone.w.push_back(extend(w, 0.0));
    c.cones.push_back(std::move(cone));
  }
  for (const auto& l : base.lmis) {
    Lmi out = l;
    out.terms.emplace_back(base.n, RMatrix::Identity(l.f0.rows(), l.f0.cols()));
    c.lmis.push_back(std::move(out));
  }
  return c;
}

RMatrix lmi_value(const Lmi& l, const RVector& x) {
  RMatrix f = l.f0;
  for (const auto& [k, fk] : l.terms) f += x(k) * fk;
  return f;
}

struct Barrier {
  double value = 0.0;
  RVector grad;
  RMatrix hess;
};

// Returns false when x is not strictly inside every cone.
bool evaluate(const Compiled& p, const RVector& x, bool derivatives, Barrier& out) {
  out.value = 0.0;
  if (derivatives) {
    out.grad = RVector::Zero(p.n);
    out.hess = RMatrix::Zero(p.n, p.n);
  }
  for (const auto& r : p.rows) {
    const double s = r.eval(x);
    if (!(s > 0.0)) return false;
    out.value -= std::log(s);
    if (derivatives) {
      out.grad -= r.a / s;
      out.hess.noalias() += (r.a * r.a.transpose()) / (s * s);
    }
  }
  for (const auto& k : p.cones) {
    const double u = k.u.eval(x);
    const double v = k.v.eval(x);
    if (!(u > 0.0) || !(v > 0.0)) return false;
    double ww = 0.0;
    for (const auto& w : k.w) ww += w.eval(x) * w.eval(x);
    const double q = 2.0 * u * v - ww;
    if (!(q > 0.0)) return false;
    out.value -= std::log(q);
    if (derivatives) {
      RVector dq = 2.0 * v * k.u.a + 2.0 * u * k.v.a;
      RMatrix d2q = 2.0 * (k.u.a * k.v.a.transpose() + k.v.a * k.u.a.transpose());
      for (const auto& w : k.w) {
        dq -= 2.0 * w.eval(x) * w.a;
        d2q -= 2.0 * w.a * w.a.transpose();
      }
      out.grad -= dq / q;
      out.hess.noalias() += (dq * dq.transpose()) / (q * q) - d2q / q;
    }
  }
  for (const auto& l : p.lmis) {
    const RMatrix f = lmi_value(l, x);
    Eigen::LLT<RMatrix> llt(f);
    if (llt.info() != Eigen::Success) return false;
    const RMatrix lower = llt.matrixL();
    const RVector diag = lower.diagonal();
    if (!(diag.minCoeff() > 0.0)) return false;
    out.value -= 2.0 * diag.array().log().sum();
    if (derivatives) {
      std::vector<RMatrix> g;
      g.reserve(l.terms.size());
      for (const auto& [k, fk] : l.terms) {
        RMatrix tmp = llt.matrixL().solve(fk);
        tmp = llt.matrixL().solve(tmp.transpose()).eval();
        g.push_back(std::move(tmp));
      }
      for (std::size_t i = 0; i < l.terms.size(); ++i) {
        const int ki = l.terms[i].first;
        out.grad(ki) -= g[i].trace();
        for (std::size_t j = i; j < l.terms.size(); ++j) {
          const int kj = l.terms[j].first;
          const double h = (g[i].array() * g[j].transpose().array()).sum();
          out.hess(ki, kj) += h;
          if (j != i) out.hess(kj, ki) += h;
        }
      }
    }
  }
  if (!std::isfinite(out.value)) return false;
  return true;
}

bool newton_direction(const RMatrix& h, const RVector& g, RVector& dx) {
  const auto n = h.rows();
  RVector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = 1.0 / std::sqrt(std::max(h(i, i), 1e-30));
  RMatrix m = d.asDiagonal() * h * d.asDiagonal();
  const RVector rhs = -(d.asDiagonal() * g);
  for (double reg = 1e-13; reg <= 1e-2; reg *= 100.0) {
    RMatrix mr = m;
    mr.diagonal().array() += reg;
    Eigen::LDLT<RMatrix> ldlt(mr);
    if (ldlt.info() != Eigen::Success) continue;
    const RVector y = ldlt.solve(rhs);
    if (!y.allFinite()) continue;
    dx = d.asDiagonal() * y;
    return true;
  }
  return false;
}

struct PathState {
  RVector x;
  double t = 1.0;
  int iterations = 0;
  double dual_residual = kInfinity;
  bool failed = false;
  std::string message;
};

// One centering run at fixed t. Returns false on a numerical breakdown.
bool center(const Compiled& p, PathState& st, int max_iterations,
            const std::function<bool(const RVector&)>& early_exit) {
  constexpr double kDecrementTol = 1e-10;
  constexpr double kArmijo = 0.01;
  Barrier b;
  Barrier trial;
  for (int k = 0; k < 100; ++k) {
    if (st.iterations >= max_iterations) return true;
    if (!evaluate(p, st.x, true, b)) {
      st.message = "iterate left the cone";
      return false;
    }
    const RVector grad = st.t * p.c + b.grad;
    st.dual_residual = grad.norm() / st.t;
    RVector dx;
    if (!newton_direction(b.hess, grad, dx)) {
      st.message = "Newton system could not be factored";
      return false;
    }
    const double decrement = -grad.dot(dx);
    if (!(decrement >= 0.0) || decrement / 2.0 <= kDecrementTol) return true;
    ++st.iterations;
    const double f0 = st.t * p.c.dot(st.x) + b.value;
    const bool quadratic_region = std::sqrt(decrement) < 0.2;
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      const RVector xn = st.x + step * dx;
      if (!evaluate(p, xn, false, trial)) continue;
      const double f1 = st.t * p.c.dot(xn) + trial.value;
      if (quadratic_region || f1 <= f0 - kArmijo * step * decrement) {
        st.x = xn;
        accepted = true;
        break;
      }
    }
    if (!accepted) return true;  // no progress possible at this precision
    if (st.x.cwiseAbs().maxCoeff() > 1e15) {
      st.message = "iterates diverged (unbounded problem?)";
      return false;
    }
    if (early_exit && early_exit(st.x)) return true;
  }
  return true;
}

double max_violation(const ConicProblem& problem, const RVector& x, double& min_psd) {
  double worst = 0.0;
  for (const auto& r : problem.nonnegative_rows()) worst = std::max(worst, -r.expr.evaluate(x));
  for (const auto& k : problem.rotated_cones()) {
    const double u = k.u.evaluate(x);
    const double v = k.v.evaluate(x);
    double ww = 0.0;
    for (const auto& w : k.w) ww += std::pow(w.evaluate(x), 2);
    worst = std::max({worst, -u, -v, ww - 2.0 * u * v});
  }
  min_psd = kInfinity;
  for (const auto& l : problem.lmis()) {
    CMatrix f = l.expr.constant;
    for (const auto& [s, fs] : l.expr.scalar_terms) f += x(s.index) * fs;
    for (const auto& [w, lm] : l.expr.congruences) {
      ConicSolution tmp;
      tmp.x = x;
      f += lm * tmp.value(w) * lm.adjoint();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(f, Eigen::EigenvaluesOnly);
    min_psd = std::min(min_psd, es.eigenvalues()(0));
  }
  worst = std::max(worst, -min_psd);
  return worst;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const ConicSettings& settings,
                    const RVector* hint) {
  ConicSolution sol;
  const Compiled p = compile(problem);
  const int n = p.n;
  RVector x0 = RVector::Zero(n);
  if (hint) {
    if (hint->size() != n) throw DomainError("hint has wrong dimension");
    x0 = *hint;
  }

  Barrier scratch;
  int phase_one_iterations = 0;
  if (!evaluate(p, x0, false, scratch)) {
    // Phase one from x0 with the smallest shift that makes it interior.
    const double radius = 1e6 * std::max(1.0, x0.cwiseAbs().maxCoeff());
    const Compiled q = shifted(p, radius);
    double s0 = 0.0;
    for (const auto& r : p.rows) s0 = std::max(s0, -r.eval(x0));
    for (const auto& k : p.cones) {
      double wn = 0.0;
      for (const auto& w : k.w) wn += w.eval(x0) * w.eval(x0);
      s0 = std::max(s0, std::max(-k.u.eval(x0), -k.v.eval(x0)) + std::sqrt(wn));
    }
    for (const auto& l : p.lmis) {
      Eigen::SelfAdjointEigenSolver<RMatrix> es(lmi_value(l, x0), Eigen::EigenvaluesOnly);
      s0 = std::max(s0, -es.eigenvalues()(0));
    }
    PathState st;
    st.x = RVector::Zero(n + 1);
    st.x.head(n) = x0;
    st.x(n) = s0 + 1.0;
    st.t = 1.0;
    const double nu = q.nu();
    auto strictly_feasible = [n](const RVector& x) { return x(n) < -0.1; };
    bool found = false;
    while (true) {
      if (!center(q, st, settings.max_iterations, strictly_feasible)) {
        sol.status = ConicStatus::numerical_failure;
        sol.message = "phase one: " + st.message;
        sol.iterations = st.iterations;
        return sol;
      }
      const double s = st.x(n);
      // Any strictly negative shift is an interior point of the original
      // problem; centering already pushed it as deep as this t allows.
      if (s < 0.0) {
        found = true;
        break;
      }
      const double lower_bound = s - nu / st.t;
      if (lower_bound > settings.feasibility_tolerance) break;
      if (nu / st.t < 1e-12 || st.iterations >= settings.max_iterations) {
        found = s < 0.0;
        break;
      }
      st.t *= kBarrierGrowth;
    }
    phase_one_iterations = st.iterations;
    if (!found) {
      const double s = st.x(n);
      const double lower_bound = s - nu / st.t;
      sol.iterations = phase_one_iterations;
      if (lower_bound > settings.feasibility_tolerance || st.iterations < settings.max_iterations) {
        sol.status = ConicStatus::infeasible;
        sol.message = "no strictly feasible point; phase-one bound " + std::to_string(lower_bound);
      } else {
        sol.status = ConicStatus::numerical_failure;
        sol.message = "phase one hit the iteration limit";
      }
      sol.x = st.x.head(n);
      return sol;
    }
    x0 = st.x.head(n);
  }

  PathState st;
  st.x = x0;
  st.t = 1.0;
  const double nu = p.nu();
  bool done = false;
  while (!done) {
    if (!center(p, st, settings.max_iterations, {})) {
      sol.status = ConicStatus::numerical_failure;
      sol.message = "phase two: " + st.message;
      break;
    }
    const double objective = problem.objective().evaluate(st.x);
    const double gap = nu / st.t * p.c_scale;
    // The gap bound nu/t only holds at a completed centering.
    if (st.iterations >= settings.max_iterations) {
      sol.status = ConicStatus::numerical_failure;
      sol.message = "phase two hit the iteration limit";
      done = true;
    } else if (gap <= settings.gap_tolerance * std::max(1.0, std::abs(objective))) {
      sol.status = ConicStatus::optimal;
      done = true;
    } else {
      st.t *= kBarrierGrowth;
    }
    sol.gap = gap;
  }
  sol.x = st.x;
  sol.iterations = phase_one_iterations + st.iterations;
  sol.objective = problem.objective().evaluate(st.x);
  sol.dual_residual = st.dual_residual;
  double min_psd = kInfinity;
  sol.primal_residual = max_violation(problem, st.x, min_psd);
  sol.min_psd_eigenvalue = min_psd;
  if (sol.status == ConicStatus::optimal &&
      (sol.primal_residual > settings.feasibility_tolerance ||
       min_psd < -settings.feasibility_tolerance)) {
    sol.status = ConicStatus::numerical_failure;
    sol.message = "final iterate violates a cone";
  }
  return sol;
}

}  // namespace maisac
