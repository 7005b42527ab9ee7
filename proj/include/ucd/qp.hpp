#ifndef UCD_QP_HPP
#define UCD_QP_HPP

/**
 * @file
 * @brief Dense strictly convex QP with a separable diagonal objective.
 *
 * Problems have the form
 *
 *     min   sum_i quad_i x_i^2 + lin_i x_i + constant
 *     s.t.  E x  = e
 *           A x <= b
 *
 * with quad_i > 0. Feasibility is decided by a phase-one linear program
 * (Bland's-rule tableau simplex on the slack-augmented rows); the optimum is
 * then found by a primal active-set method started from the phase-one vertex.
 * Every step solves the range-space KKT system of the current working set,
 * which is cheap because the Hessian is diagonal.
 */

#include "ucd/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ucd {

template <typename Scalar> struct QpProblem {
  VectorX<Scalar> quad;
  VectorX<Scalar> lin;
  Scalar constant = 0;
  MatrixX<Scalar> eq_matrix;
  VectorX<Scalar> eq_rhs;
  MatrixX<Scalar> ineq_matrix;
  VectorX<Scalar> ineq_rhs;
  std::vector<std::string> ineq_labels;

  explicit QpProblem(Eigen::Index n = 0)
      : quad(VectorX<Scalar>::Zero(n)), lin(VectorX<Scalar>::Zero(n)), eq_matrix(0, n), eq_rhs(0),
        ineq_matrix(0, n), ineq_rhs(0) {}

  Eigen::Index size() const { return quad.size(); }
  Eigen::Index eq_count() const { return eq_matrix.rows(); }
  Eigen::Index ineq_count() const { return ineq_matrix.rows(); }

  void add_equality(const VectorX<Scalar>& row, Scalar rhs) {
    eq_matrix.conservativeResize(eq_matrix.rows() + 1, size());
    eq_matrix.row(eq_matrix.rows() - 1) = row.transpose();
    eq_rhs.conservativeResize(eq_rhs.size() + 1);
    eq_rhs(eq_rhs.size() - 1) = rhs;
  }

  void add_inequality(const VectorX<Scalar>& row, Scalar rhs, std::string label = {}) {
    ineq_matrix.conservativeResize(ineq_matrix.rows() + 1, size());
    ineq_matrix.row(ineq_matrix.rows() - 1) = row.transpose();
    ineq_rhs.conservativeResize(ineq_rhs.size() + 1);
    ineq_rhs(ineq_rhs.size() - 1) = rhs;
    ineq_labels.push_back(std::move(label));
  }

  Scalar objective(const VectorX<Scalar>& x) const {
    return (quad.array() * x.array().square() + lin.array() * x.array()).sum() + constant;
  }

  /// Largest violation of E x = e or A x <= b.
  Scalar infeasibility(const VectorX<Scalar>& x) const {
    Scalar worst = 0;
    if (eq_count() > 0)
      worst = std::max(worst, (eq_matrix * x - eq_rhs).cwiseAbs().maxCoeff());
    if (ineq_count() > 0)
      worst = std::max(worst, (ineq_matrix * x - ineq_rhs).maxCoeff());
    return worst;
  }
};

enum class QpStatus { optimal, infeasible };

template <typename Scalar> struct QpSolution {
  QpStatus status = QpStatus::infeasible;
  VectorX<Scalar> x;
  VectorX<Scalar> eq_multipliers;
  VectorX<Scalar> ineq_multipliers;
  Scalar objective_value = std::numeric_limits<Scalar>::infinity();
  Scalar phase_one_residual = 0;
  int iterations = 0;
};

struct QpSettings {
  double pivot_tolerance = 1e-10;
  double feasibility_tolerance = 1e-8;
  double kkt_tolerance = 1e-8;
  int max_iterations = 500;
};

/// Ill-conditioning or iteration overrun; never an infeasibility verdict.
class QpNumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar> struct PhaseOneResult {
  bool feasible = false;
  Scalar residual = 0;
  VectorX<Scalar> x;
};

namespace detail {

template <typename Scalar> Scalar rhs_scale(const QpProblem<Scalar>& q) {
  Scalar s = 1;
  if (q.eq_count() > 0)
    s = std::max(s, q.eq_rhs.cwiseAbs().maxCoeff());
  if (q.ineq_count() > 0)
    s = std::max(s, q.ineq_rhs.cwiseAbs().maxCoeff());
  return s;
}

} // namespace detail

/**
 * Phase-one LP: minimise the total artificial infeasibility over the rows of `q`.
 *
 * Variables are split x = x+ - x- so no sign assumption is made. The problem
 * is feasible iff the optimal residual is within the feasibility tolerance
 * (scaled by the largest right-hand side).
 */
template <typename Scalar>
PhaseOneResult<Scalar> phase_one(const QpProblem<Scalar>& q, const QpSettings& settings = {}) {
  const Eigen::Index n = q.size();
  const Eigen::Index m_eq = q.eq_count();
  const Eigen::Index m_in = q.ineq_count();
  const Eigen::Index m = m_eq + m_in;

  // Row normalisation: every row gets rhs >= 0; rows whose slack cannot start
  // basic get an artificial.
  std::vector<Scalar> sign(static_cast<std::size_t>(m), 1);
  std::vector<bool> needs_artificial(static_cast<std::size_t>(m), false);
  Eigen::Index n_art = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Scalar rhs = i < m_eq ? q.eq_rhs(i) : q.ineq_rhs(i - m_eq);
    if (rhs < 0)
      sign[i] = -1;
    if (i < m_eq || rhs < 0) {
      needs_artificial[i] = true;
      ++n_art;
    }
  }

  const Eigen::Index col_slack = 2 * n;
  const Eigen::Index col_art = col_slack + m_in;
  const Eigen::Index cols = col_art + n_art;
  MatrixX<Scalar> tab = MatrixX<Scalar>::Zero(m + 1, cols + 1); // last row: reduced costs, last col: rhs
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));

  Eigen::Index next_art = col_art;
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool is_eq = i < m_eq;
    const auto row = is_eq ? q.eq_matrix.row(i) : q.ineq_matrix.row(i - m_eq);
    const Scalar rhs = is_eq ? q.eq_rhs(i) : q.ineq_rhs(i - m_eq);
    const Scalar sg = sign[i];
    tab.row(i).segment(0, n) = sg * row;
    tab.row(i).segment(n, n) = -sg * row;
    if (!is_eq)
      tab(i, col_slack + (i - m_eq)) = sg;
    tab(i, cols) = sg * rhs;
    if (needs_artificial[i]) {
      tab(i, next_art) = 1;
      basis[i] = next_art++;
    } else {
      basis[i] = col_slack + (i - m_eq);
    }
  }
  // Reduced costs of the phase-one objective (sum of artificials).
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] >= col_art)
      tab.row(m) -= tab.row(i);
  for (Eigen::Index j = col_art; j < cols; ++j)
    tab(m, j) = 0;

  const Scalar tol = settings.pivot_tolerance;
  const int max_pivots = 50 * static_cast<int>(cols + m + 1);
  for (int it = 0; it < max_pivots; ++it) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (tab(m, j) < -tol) {
        enter = j;
        break;
      }
    if (enter < 0)
      break;
    Eigen::Index leave = -1;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab(i, enter) > tol) {
        const Scalar ratio = tab(i, cols) / tab(i, enter);
        if (leave < 0 || ratio < best - tol) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + tol && basis[i] < basis[leave]) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
    }
    if (leave < 0)
      break; // unbounded direction cannot occur for a bounded-below objective
    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != leave && tab(i, enter) != 0)
        tab.row(i) -= tab(i, enter) * tab.row(leave);
    basis[leave] = enter;
  }

  PhaseOneResult<Scalar> out;
  VectorX<Scalar> split = VectorX<Scalar>::Zero(cols);
  for (Eigen::Index i = 0; i < m; ++i)
    split(basis[i]) = std::max<Scalar>(tab(i, cols), 0);
  out.x = split.segment(0, n) - split.segment(n, n);
  out.residual = n_art > 0 ? split.segment(col_art, n_art).sum() : Scalar(0);
  // The residual is judged on the recovered point too, so a degenerate
  // tableau cannot certify an infeasible x.
  out.residual = std::max(out.residual, q.infeasibility(out.x));
  out.feasible = out.residual <= settings.feasibility_tolerance * detail::rhs_scale(q);
  return out;
}

/// Max-norm of stationarity, primal feasibility, dual feasibility and complementarity.
template <typename Scalar> Scalar kkt_residual(const QpProblem<Scalar>& q, const QpSolution<Scalar>& sol) {
  const auto& x = sol.x;
  VectorX<Scalar> grad = 2 * q.quad.cwiseProduct(x) + q.lin;
  if (q.eq_count() > 0)
    grad += q.eq_matrix.transpose() * sol.eq_multipliers;
  if (q.ineq_count() > 0)
    grad += q.ineq_matrix.transpose() * sol.ineq_multipliers;
  Scalar r = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : Scalar(0);
  r = std::max(r, q.infeasibility(x));
  if (q.ineq_count() > 0) {
    r = std::max(r, (-sol.ineq_multipliers).maxCoeff());
    const VectorX<Scalar> slack = q.ineq_matrix * x - q.ineq_rhs;
    r = std::max(r, sol.ineq_multipliers.cwiseProduct(slack).cwiseAbs().maxCoeff());
  }
  return r;
}

namespace detail {

/// Minimiser of the objective on {x : rows(W) x = rhs(W)} and the multipliers of those rows.
template <typename Scalar>
void solve_working_set(const QpProblem<Scalar>& q, const MatrixX<Scalar>& rows, const VectorX<Scalar>& rhs,
                       VectorX<Scalar>& x, VectorX<Scalar>& multipliers) {
  const VectorX<Scalar> hinv = (2 * q.quad).cwiseInverse();
  if (rows.rows() == 0) {
    x = -hinv.cwiseProduct(q.lin);
    multipliers.resize(0);
    return;
  }
  const MatrixX<Scalar> scaled = rows * hinv.asDiagonal();
  const MatrixX<Scalar> schur = scaled * rows.transpose();
  multipliers = schur.completeOrthogonalDecomposition().solve(-rhs - scaled * q.lin);
  x = -hinv.cwiseProduct(q.lin + rows.transpose() * multipliers);
}

} // namespace detail

/**
 * Solves `q`. Returns status infeasible with the phase-one residual when the
 * rows admit no point; throws QpNumericalError when the active-set iteration
 * fails to reach a KKT point within tolerance.
 *
 * `start`, when given and feasible, replaces the phase-one vertex as the
 * starting point (the minimiser is unique, so the result must not change).
 */
template <typename Scalar>
QpSolution<Scalar> solve(const QpProblem<Scalar>& q, const QpSettings& settings = {},
                         const std::optional<VectorX<Scalar>>& start = std::nullopt) {
  const Eigen::Index n = q.size();
  const Eigen::Index m_eq = q.eq_count();
  const Eigen::Index m_in = q.ineq_count();
  const Scalar scale = detail::rhs_scale(q);

  QpSolution<Scalar> sol;
  const auto p1 = phase_one(q, settings);
  sol.phase_one_residual = p1.residual;
  if (!p1.feasible)
    return sol;

  VectorX<Scalar> x = p1.x;
  if (start && start->size() == n && q.infeasibility(*start) <= settings.feasibility_tolerance * scale)
    x = *start;

  std::vector<Eigen::Index> working; // inequality rows held at equality
  auto build = [&](MatrixX<Scalar>& rows, VectorX<Scalar>& rhs) {
    const Eigen::Index k = m_eq + static_cast<Eigen::Index>(working.size());
    rows.resize(k, n);
    rhs.resize(k);
    if (m_eq > 0) {
      rows.topRows(m_eq) = q.eq_matrix;
      rhs.head(m_eq) = q.eq_rhs;
    }
    for (std::size_t w = 0; w < working.size(); ++w) {
      rows.row(m_eq + static_cast<Eigen::Index>(w)) = q.ineq_matrix.row(working[w]);
      rhs(m_eq + static_cast<Eigen::Index>(w)) = q.ineq_rhs(working[w]);
    }
  };

  const VectorX<Scalar> hinv = (2 * q.quad).cwiseInverse();
  bool converged = false;
  MatrixX<Scalar> rows;
  VectorX<Scalar> rhs, nu;
  int it = 0;
  for (; it < settings.max_iterations; ++it) {
    build(rows, rhs);
    const VectorX<Scalar> grad = 2 * q.quad.cwiseProduct(x) + q.lin;
    VectorX<Scalar> step;
    if (rows.rows() == 0) {
      step = -hinv.cwiseProduct(grad);
      nu.resize(0);
    } else {
      const MatrixX<Scalar> scaled = rows * hinv.asDiagonal();
      const MatrixX<Scalar> schur = scaled * rows.transpose();
      nu = schur.completeOrthogonalDecomposition().solve(-scaled * grad);
      step = -hinv.cwiseProduct(grad + rows.transpose() * nu);
    }

    const Scalar xnorm = n > 0 ? std::max<Scalar>(1, x.cwiseAbs().maxCoeff()) : Scalar(1);
    const Scalar pnorm = n > 0 ? step.cwiseAbs().maxCoeff() : Scalar(0);
    if (pnorm <= settings.pivot_tolerance * xnorm) {
      const Scalar gscale = n > 0 ? std::max<Scalar>(1, grad.cwiseAbs().maxCoeff()) : Scalar(1);
      Eigen::Index drop = -1;
      Scalar most_negative = -settings.pivot_tolerance * gscale;
      for (std::size_t w = 0; w < working.size(); ++w) {
        const Scalar mu = nu(m_eq + static_cast<Eigen::Index>(w));
        if (mu < most_negative) {
          most_negative = mu;
          drop = static_cast<Eigen::Index>(w);
        }
      }
      if (drop < 0) {
        converged = true;
        break;
      }
      working.erase(working.begin() + drop);
      continue;
    }

    Scalar alpha = 1;
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < m_in; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end())
        continue;
      const Scalar ap = q.ineq_matrix.row(i).dot(step);
      const Scalar row_norm = q.ineq_matrix.row(i).cwiseAbs().maxCoeff();
      if (ap <= settings.pivot_tolerance * row_norm * pnorm)
        continue;
      const Scalar slack = std::max<Scalar>(0, q.ineq_rhs(i) - q.ineq_matrix.row(i).dot(x));
      const Scalar ratio = slack / ap;
      if (ratio < alpha) {
        alpha = ratio;
        blocking = i;
      }
    }
    x += alpha * step;
    if (blocking >= 0)
      working.push_back(blocking);
  }
  sol.iterations = it;
  if (!converged)
    throw QpNumericalError("active-set iteration limit reached (" + std::to_string(settings.max_iterations) + ")");

  // Recompute the point and multipliers directly from the final working set.
  build(rows, rhs);
  if (n > 0) {
    detail::solve_working_set(q, rows, rhs, x, nu);
  } else {
    nu = VectorX<Scalar>::Zero(rows.rows());
  }
  sol.x = x;
  sol.eq_multipliers = nu.head(m_eq);
  sol.ineq_multipliers = VectorX<Scalar>::Zero(m_in);
  for (std::size_t w = 0; w < working.size(); ++w)
    sol.ineq_multipliers(working[w]) = nu(m_eq + static_cast<Eigen::Index>(w));
  sol.objective_value = q.objective(x);
  sol.status = QpStatus::optimal;

  const Scalar residual = kkt_residual(q, sol);
  if (!(residual <= settings.kkt_tolerance))
    throw QpNumericalError("KKT residual " + std::to_string(static_cast<double>(residual)) +
                           " exceeds tolerance after active-set convergence");
  return sol;
}

} // namespace ucd

#endif // UCD_QP_HPP
