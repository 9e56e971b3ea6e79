#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pce::lp {

enum class Direction { maximize, minimize };
enum class Sense { less_equal, greater_equal, equal };
enum class Status { optimal, infeasible, unbounded, iteration_limit, numeric_error };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
    case Status::numeric_error: return "numeric_error";
  }
  return "?";
}

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A linear program over `num_vars` variables with sparse constraint rows.
template <typename Scalar = double>
class LinearProgram {
 public:
  using Term = std::pair<int, Scalar>;

  struct Constraint {
    std::vector<Term> terms;
    Sense sense;
    Scalar rhs;
  };

  explicit LinearProgram(int num_vars, Direction direction = Direction::maximize)
      : direction_(direction), objective_(Vector<Scalar>::Zero(num_vars)), nonneg_(num_vars, true) {}

  int num_vars() const { return static_cast<int>(objective_.size()); }
  Direction direction() const { return direction_; }
  const Vector<Scalar>& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  bool nonneg(int var) const { return nonneg_[var]; }

  void set_objective(int var, Scalar coeff) { objective_(var) = coeff; }
  void set_objective(const Vector<Scalar>& c) { objective_ = c; }
  void set_free(int var) { nonneg_[var] = false; }

  void add_constraint(std::vector<Term> terms, Sense sense, Scalar rhs) {
    constraints_.push_back({std::move(terms), sense, rhs});
  }
  void add_constraint(std::initializer_list<Term> terms, Sense sense, Scalar rhs) {
    add_constraint(std::vector<Term>(terms), sense, rhs);
  }

  void add_constraint(const Vector<Scalar>& coeffs, Sense sense, Scalar rhs) {
    std::vector<Term> terms;
    for (int j = 0; j < coeffs.size(); ++j)
      if (coeffs(j) != Scalar(0)) terms.emplace_back(j, coeffs(j));
    add_constraint(std::move(terms), sense, rhs);
  }

  /// Left-hand side of constraint `i` at `x`.
  Scalar activity(int i, const Vector<Scalar>& x) const {
    Scalar s(0);
    for (const auto& [j, a] : constraints_[i].terms) s += a * x(j);
    return s;
  }

  /// Largest absolute constraint or sign violation at `x`.
  Scalar max_violation(const Vector<Scalar>& x) const {
    Scalar worst(0);
    for (int i = 0; i < static_cast<int>(constraints_.size()); ++i) {
      const auto& c = constraints_[i];
      Scalar lhs = activity(i, x);
      Scalar v(0);
      if (c.sense != Sense::greater_equal) v = std::max(v, lhs - c.rhs);
      if (c.sense != Sense::less_equal) v = std::max(v, c.rhs - lhs);
      worst = std::max(worst, v);
    }
    for (int j = 0; j < num_vars(); ++j)
      if (nonneg_[j]) worst = std::max(worst, -x(j));
    return worst;
  }

 private:
  Direction direction_;
  Vector<Scalar> objective_;
  std::vector<bool> nonneg_;
  std::vector<Constraint> constraints_;
};

template <typename Scalar = double>
struct Result {
  Status status = Status::numeric_error;
  Scalar value = 0;
  Vector<Scalar> point;
  int iterations = 0;
};

struct SolveOptions {
  /// Pivot elements below this are treated as zero.
  double pivot_tolerance = 1e-11;
  /// Reduced costs above -this count as optimal.
  double optimality_tolerance = 1e-10;
  /// Per-constraint absolute feasibility required of a returned optimum.
  double feasibility_tolerance = 1e-9;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_streak = 50;
  /// 0 picks a limit from the problem size.
  int max_iterations = 0;
};

namespace detail {

/// Dense simplex tableau in the form min c'x, Ax = b, x >= 0, b >= 0.
template <typename Scalar>
class Tableau {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Tableau(Matrix a, Vector<Scalar> b, std::vector<int> basis, int num_artificial, const SolveOptions& opts)
      : rows_(static_cast<int>(a.rows())), cols_(static_cast<int>(a.cols())), opts_(opts), basis_(std::move(basis)) {
    t_ = Matrix::Zero(rows_ + 1, cols_ + 1);
    t_.topLeftCorner(rows_, cols_) = a;
    t_.topRightCorner(rows_, 1) = b;
    first_artificial_ = cols_ - num_artificial;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<int>& basis() const { return basis_; }
  Scalar rhs(int r) const { return t_(r, cols_); }
  bool is_artificial(int col) const { return col >= first_artificial_; }

  /// Sets the cost row to the reduced costs of `cost` under the current basis.
  void price(const Vector<Scalar>& cost) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(cols_) = cost.transpose();
    for (int r = 0; r < rows_; ++r) {
      Scalar cb = cost(basis_[r]);
      if (cb != Scalar(0)) t_.row(rows_) -= cb * t_.row(r);
    }
  }

  /// Objective value of the current basis for the priced cost row.
  Scalar objective() const { return -t_(rows_, cols_); }

  /// Runs the simplex loop. Columns at or past `entry_limit` never enter.
  Status optimize(int entry_limit, int& iterations, int max_iterations) {
    int streak = 0;
    bool bland = false;
    for (;;) {
      if (iterations >= max_iterations) return Status::iteration_limit;
      int enter = -1;
      Scalar best = -Scalar(opts_.optimality_tolerance);
      for (int j = 0; j < entry_limit; ++j) {
        Scalar d = t_(rows_, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return Status::optimal;

      int leave = -1;
      Scalar ratio = std::numeric_limits<Scalar>::infinity();
      for (int r = 0; r < rows_; ++r) {
        Scalar a = t_(r, enter);
        if (a <= Scalar(opts_.pivot_tolerance)) continue;
        Scalar q = t_(r, cols_) / a;
        if (leave < 0 || q < ratio - Scalar(1e-12)) {
          leave = r;
          ratio = q;
        } else if (q <= ratio + Scalar(1e-12)) {
          bool better = bland ? basis_[r] < basis_[leave] : a > t_(leave, enter);
          if (better) {
            leave = r;
            ratio = std::min(ratio, q);
          }
        }
      }
      if (leave < 0) return Status::unbounded;

      bool degenerate = t_(leave, cols_) <= Scalar(opts_.pivot_tolerance);
      streak = degenerate ? streak + 1 : 0;
      if (!degenerate) bland = false;
      if (streak >= opts_.degenerate_streak) bland = true;
      pivot(leave, enter);
      ++iterations;
    }
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      Scalar f = t_(i, c);
      if (f != Scalar(0)) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  /// Pivots basic artificials out where some real column can replace them.
  void drive_out_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (int j = 0; j < first_artificial_; ++j) {
        if (std::abs(t_(r, j)) > Scalar(1e-9)) {
          pivot(r, j);
          break;
        }
      }
    }
  }

  int first_artificial() const { return first_artificial_; }

  Vector<Scalar> solution() const {
    Vector<Scalar> x = Vector<Scalar>::Zero(cols_);
    for (int r = 0; r < rows_; ++r) x(basis_[r]) = t_(r, cols_);
    return x;
  }

 private:
  int rows_, cols_;
  SolveOptions opts_;
  std::vector<int> basis_;
  int first_artificial_ = 0;
  Matrix t_;
};

}  // namespace detail

/// Dense two-phase primal simplex. Dantzig pricing, falling back to Bland's
/// rule after a streak of degenerate pivots so the method cannot cycle.
/// An optimum is returned only if the point satisfies every constraint within
/// the feasibility tolerance; otherwise the status is numeric_error.
template <typename Scalar>
Result<Scalar> solve(const LinearProgram<Scalar>& lp, const SolveOptions& opts = {}) {
  using Matrix = typename detail::Tableau<Scalar>::Matrix;
  const int n = lp.num_vars();
  const int m = static_cast<int>(lp.constraints().size());

  // Structural columns: one per nonnegative variable, two per free variable.
  std::vector<int> pos_col(n), neg_col(n, -1);
  int structural = 0;
  for (int j = 0; j < n; ++j) {
    pos_col[j] = structural++;
    if (!lp.nonneg(j)) neg_col[j] = structural++;
  }

  // Normalize rows to rhs >= 0 and count auxiliary columns.
  std::vector<Sense> sense(m);
  std::vector<Scalar> sign(m, Scalar(1));
  int slacks = 0, artificials = 0;
  for (int i = 0; i < m; ++i) {
    const auto& c = lp.constraints()[i];
    sense[i] = c.sense;
    if (c.rhs < Scalar(0)) {
      sign[i] = Scalar(-1);
      if (c.sense == Sense::less_equal) sense[i] = Sense::greater_equal;
      else if (c.sense == Sense::greater_equal) sense[i] = Sense::less_equal;
    }
    if (sense[i] != Sense::equal) ++slacks;
    if (sense[i] != Sense::less_equal) ++artificials;
  }

  const int cols = structural + slacks + artificials;
  Matrix a = Matrix::Zero(m, cols);
  Vector<Scalar> b(m);
  std::vector<int> basis(m);
  int slack_at = structural, art_at = structural + slacks;
  for (int i = 0; i < m; ++i) {
    const auto& c = lp.constraints()[i];
    for (const auto& [j, coeff] : c.terms) {
      a(i, pos_col[j]) += sign[i] * coeff;
      if (neg_col[j] >= 0) a(i, neg_col[j]) -= sign[i] * coeff;
    }
    b(i) = sign[i] * c.rhs;
    if (sense[i] == Sense::less_equal) {
      a(i, slack_at) = Scalar(1);
      basis[i] = slack_at++;
    } else {
      if (sense[i] == Sense::greater_equal) a(i, slack_at++) = Scalar(-1);
      a(i, art_at) = Scalar(1);
      basis[i] = art_at++;
    }
  }

  detail::Tableau<Scalar> tab(std::move(a), std::move(b), std::move(basis), artificials, opts);
  Result<Scalar> result;
  const int max_iterations = opts.max_iterations > 0 ? opts.max_iterations : 50 * (m + cols) + 1000;

  if (artificials > 0) {
    Vector<Scalar> phase1 = Vector<Scalar>::Zero(cols);
    phase1.tail(artificials).setOnes();
    tab.price(phase1);
    Status s = tab.optimize(cols, result.iterations, max_iterations);
    if (s != Status::optimal) {
      result.status = s == Status::unbounded ? Status::numeric_error : s;
      return result;
    }
    if (tab.objective() > Scalar(opts.feasibility_tolerance)) {
      result.status = Status::infeasible;
      return result;
    }
    tab.drive_out_artificials();
  }

  Vector<Scalar> cost = Vector<Scalar>::Zero(cols);
  const Scalar dir = lp.direction() == Direction::maximize ? Scalar(-1) : Scalar(1);
  for (int j = 0; j < n; ++j) {
    cost(pos_col[j]) = dir * lp.objective()(j);
    if (neg_col[j] >= 0) cost(neg_col[j]) = -dir * lp.objective()(j);
  }
  tab.price(cost);
  Status s = tab.optimize(tab.first_artificial(), result.iterations, max_iterations);
  if (s != Status::optimal) {
    result.status = s;
    return result;
  }

  Vector<Scalar> full = tab.solution();
  result.point = Vector<Scalar>(n);
  for (int j = 0; j < n; ++j)
    result.point(j) = full(pos_col[j]) - (neg_col[j] >= 0 ? full(neg_col[j]) : Scalar(0));
  result.value = lp.objective().dot(result.point);
  result.status =
      lp.max_violation(result.point) <= Scalar(opts.feasibility_tolerance) ? Status::optimal : Status::numeric_error;
  return result;
}

}  // namespace pce::lp
