#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "usp/rational.hpp"

namespace usp {

using SparseRow = std::vector<std::pair<int, Rational>>;

enum class Relation { LessEq, Equal, GreaterEq };
enum class Sense { Maximize, Minimize };

struct LpRow {
  SparseRow coeffs;
  Relation rel = Relation::Equal;
  Rational rhs;
};

// Variables default to 0 <= x < +inf. Bounds are optional on either side.
struct LinearProgram {
  int num_vars = 0;
  std::vector<LpRow> rows;
  SparseRow objective;
  Sense sense = Sense::Maximize;
  std::vector<std::optional<Rational>> lower;
  std::vector<std::optional<Rational>> upper;

  explicit LinearProgram(int n = 0)
      : num_vars(n), lower(n, Rational(0)), upper(n, std::nullopt) {}

  int add_var(std::optional<Rational> lo = Rational(0), std::optional<Rational> hi = std::nullopt) {
    lower.push_back(std::move(lo));
    upper.push_back(std::move(hi));
    return num_vars++;
  }
  void add_row(SparseRow coeffs, Relation rel, Rational rhs) {
    for (const auto& [j, c] : coeffs)
      if (j < 0 || j >= num_vars) throw std::out_of_range("row coefficient index out of range");
    rows.push_back({std::move(coeffs), rel, std::move(rhs)});
  }
  void set_bounds(int j, std::optional<Rational> lo, std::optional<Rational> hi) {
    lower.at(j) = std::move(lo);
    upper.at(j) = std::move(hi);
  }
};

struct LpOutcome {
  enum class Tag { Optimal, Infeasible, Unbounded };
  Tag tag = Tag::Infeasible;
  std::vector<Rational> point;  // Optimal
  Rational value;               // Optimal
  std::vector<Rational> ray;    // Unbounded: point + t*ray feasible for t >= 0
  std::size_t pivots = 0;

  bool optimal() const { return tag == Tag::Optimal; }
  bool infeasible() const { return tag == Tag::Infeasible; }
  bool unbounded() const { return tag == Tag::Unbounded; }
};

// Exact re-check of a point against rows and bounds.
inline bool lp_feasible(const LinearProgram& lp, const std::vector<Rational>& x) {
  if (static_cast<int>(x.size()) != lp.num_vars) return false;
  for (int j = 0; j < lp.num_vars; ++j) {
    if (lp.lower[j] && x[j] < *lp.lower[j]) return false;
    if (lp.upper[j] && x[j] > *lp.upper[j]) return false;
  }
  for (const auto& row : lp.rows) {
    Rational lhs = 0;
    for (const auto& [j, c] : row.coeffs) lhs += c * x[j];
    switch (row.rel) {
      case Relation::LessEq: if (lhs > row.rhs) return false; break;
      case Relation::Equal: if (lhs != row.rhs) return false; break;
      case Relation::GreaterEq: if (lhs < row.rhs) return false; break;
    }
  }
  return true;
}

namespace detail {

// Dense bounded-variable tableau. Every row is an equality whose basic
// variable has coefficient 1; nonbasic variables sit at any value inside
// their bounds (not necessarily at a bound).
class BoundedSimplex {
 public:
  std::vector<std::vector<Rational>> T;
  std::vector<int> basis;
  std::vector<Rational> x;
  std::vector<std::optional<Rational>> lo, hi;
  std::vector<Rational> cost;
  std::vector<Rational> d;  // reduced costs
  std::vector<bool> is_basic;
  std::size_t pivots = 0;

  int cols() const { return static_cast<int>(x.size()); }
  int rows() const { return static_cast<int>(T.size()); }

  void compute_reduced_costs() {
    d = cost;
    for (int i = 0; i < rows(); ++i) {
      const Rational& cb = cost[basis[i]];
      if (cb == 0) continue;
      for (int k = 0; k < cols(); ++k)
        if (T[i][k] != 0) d[k] -= cb * T[i][k];
    }
  }

  void pivot(int r, int j) {
    ++pivots;
    auto& row = T[r];
    Rational inv = 1 / row[j];
    std::vector<int> nz;
    for (int k = 0; k < cols(); ++k)
      if (row[k] != 0) {
        row[k] *= inv;
        nz.push_back(k);
      }
    Rational tmp;
    for (int i = 0; i < rows(); ++i) {
      if (i == r || T[i][j] == 0) continue;
      Rational f = T[i][j];
      auto& ti = T[i];
      for (int k : nz) {
        tmp = f * row[k];
        ti[k] -= tmp;
      }
    }
    if (d[j] != 0) {
      Rational f = d[j];
      for (int k : nz) {
        tmp = f * row[k];
        d[k] -= tmp;
      }
    }
    is_basic[basis[r]] = false;
    basis[r] = j;
    is_basic[j] = true;
  }

  enum class Result { Optimal, Unbounded };

  // Maximizes cost.x from the current feasible state with Bland's rule.
  // On Unbounded, `ray_col` and `ray_dir` describe the improving ray.
  Result run(int& ray_col, int& ray_dir) {
    compute_reduced_costs();
    for (;;) {
      int j = -1, dir = 0;
      for (int k = 0; k < cols(); ++k) {
        if (is_basic[k] || d[k] == 0) continue;
        if (d[k] > 0 && (!hi[k] || x[k] < *hi[k])) { j = k; dir = 1; break; }
        if (d[k] < 0 && (!lo[k] || x[k] > *lo[k])) { j = k; dir = -1; break; }
      }
      if (j < 0) return Result::Optimal;

      std::optional<Rational> step;
      if (dir > 0 && hi[j]) step = *hi[j] - x[j];
      if (dir < 0 && lo[j]) step = x[j] - *lo[j];
      int leave = -1;
      Rational t;
      for (int i = 0; i < rows(); ++i) {
        const Rational& a = T[i][j];
        if (a == 0) continue;
        int b = basis[i];
        bool decreasing = (dir > 0) == (a > 0);
        if (decreasing && lo[b]) {
          t = (x[b] - *lo[b]) / (dir > 0 ? a : -a);
        } else if (!decreasing && hi[b]) {
          t = (*hi[b] - x[b]) / (dir > 0 ? -a : a);
        } else {
          continue;
        }
        if (leave < 0 || t < leave_step_ || (t == leave_step_ && b < basis[leave])) {
          leave = i;
          leave_step_ = t;
        }
      }
      if (leave < 0 && !step) {
        ray_col = j;
        ray_dir = dir;
        return Result::Unbounded;
      }
      bool flip = leave < 0 || (step && *step <= leave_step_);
      Rational move = flip ? *step : leave_step_;
      if (move != 0) {
        Rational signed_move = dir > 0 ? move : -move;
        x[j] += signed_move;
        for (int i = 0; i < rows(); ++i)
          if (T[i][j] != 0) x[basis[i]] -= T[i][j] * signed_move;
      }
      if (flip) continue;
      int b = basis[leave];
      bool decreasing = (dir > 0) == (T[leave][j] > 0);
      x[b] = decreasing ? *lo[b] : *hi[b];
      pivot(leave, j);
    }
  }

 private:
  Rational leave_step_;
};

}  // namespace detail

// Two-phase bounded-variable primal simplex over the rationals with Bland's
// anti-cycling rule. Equalities and inequalities become rows with a slack of
// the appropriate sign; phase one minimizes a sum of artificials.
inline LpOutcome solve(const LinearProgram& lp) {
  LpOutcome out;
  const int n = lp.num_vars;
  for (int j = 0; j < n; ++j)
    if (lp.lower[j] && lp.upper[j] && *lp.lower[j] > *lp.upper[j]) return out;

  const int m = static_cast<int>(lp.rows.size());
  std::vector<int> slack_of(m, -1);
  int ncols = n;
  for (int i = 0; i < m; ++i)
    if (lp.rows[i].rel != Relation::Equal) slack_of[i] = ncols++;
  const int first_art = ncols;
  ncols += m;

  detail::BoundedSimplex sx;
  sx.lo.assign(ncols, Rational(0));
  sx.hi.assign(ncols, std::nullopt);
  for (int j = 0; j < n; ++j) {
    sx.lo[j] = lp.lower[j];
    sx.hi[j] = lp.upper[j];
  }
  for (int i = 0; i < m; ++i) {
    if (slack_of[i] < 0) continue;
    if (lp.rows[i].rel == Relation::GreaterEq) {
      sx.lo[slack_of[i]] = std::nullopt;
      sx.hi[slack_of[i]] = Rational(0);
    }
  }
  sx.x.assign(ncols, Rational(0));
  for (int j = 0; j < first_art; ++j) {
    if (sx.lo[j] && *sx.lo[j] > 0) sx.x[j] = *sx.lo[j];
    else if (sx.hi[j] && *sx.hi[j] < 0) sx.x[j] = *sx.hi[j];
  }

  sx.T.assign(m, std::vector<Rational>(ncols));
  sx.basis.resize(m);
  sx.is_basic.assign(ncols, false);
  for (int i = 0; i < m; ++i) {
    auto& row = sx.T[i];
    for (const auto& [j, c] : lp.rows[i].coeffs) row[j] += c;
    if (slack_of[i] >= 0) row[slack_of[i]] = 1;
    Rational resid = lp.rows[i].rhs;
    for (int k = 0; k < first_art; ++k)
      if (row[k] != 0) resid -= row[k] * sx.x[k];
    if (resid < 0) {
      for (auto& v : row) v = -v;
      resid = -resid;
    }
    row[first_art + i] = 1;
    sx.x[first_art + i] = resid;
    sx.basis[i] = first_art + i;
    sx.is_basic[first_art + i] = true;
  }

  int ray_col = -1, ray_dir = 0;
  bool need_phase1 = false;
  for (int i = 0; i < m; ++i)
    if (sx.x[first_art + i] != 0) need_phase1 = true;
  if (need_phase1) {
    sx.cost.assign(ncols, Rational(0));
    for (int i = 0; i < m; ++i) sx.cost[first_art + i] = -1;
    sx.run(ray_col, ray_dir);
    for (int i = 0; i < m; ++i)
      if (sx.x[first_art + i] != 0) {
        out.tag = LpOutcome::Tag::Infeasible;
        out.pivots = sx.pivots;
        return out;
      }
  }

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are linear combinations of others and are dropped.
  sx.cost.assign(ncols, Rational(0));
  sx.d.assign(ncols, Rational(0));
  std::vector<bool> drop(m, false);
  for (int i = 0; i < m; ++i) {
    if (sx.basis[i] < first_art) continue;
    int k = 0;
    while (k < first_art && sx.T[i][k] == 0) ++k;
    if (k == first_art) drop[i] = true;
    else sx.pivot(i, k);
  }
  {
    std::vector<std::vector<Rational>> T2;
    std::vector<int> b2;
    for (int i = 0; i < m; ++i) {
      if (drop[i]) continue;
      sx.T[i].resize(first_art);
      T2.push_back(std::move(sx.T[i]));
      b2.push_back(sx.basis[i]);
    }
    sx.T = std::move(T2);
    sx.basis = std::move(b2);
    sx.x.resize(first_art);
    sx.lo.resize(first_art);
    sx.hi.resize(first_art);
    sx.is_basic.resize(first_art);
  }

  sx.cost.assign(first_art, Rational(0));
  for (const auto& [j, c] : lp.objective)
    sx.cost[j] += lp.sense == Sense::Maximize ? c : Rational(-c);
  auto res = sx.run(ray_col, ray_dir);
  out.pivots = sx.pivots;
  if (res == detail::BoundedSimplex::Result::Unbounded) {
    out.tag = LpOutcome::Tag::Unbounded;
    out.point.assign(sx.x.begin(), sx.x.begin() + n);
    out.ray.assign(n, Rational(0));
    if (ray_col < n) out.ray[ray_col] = ray_dir;
    for (int i = 0; i < sx.rows(); ++i)
      if (sx.basis[i] < n && sx.T[i][ray_col] != 0)
        out.ray[sx.basis[i]] = -sx.T[i][ray_col] * ray_dir;
    return out;
  }
  out.tag = LpOutcome::Tag::Optimal;
  out.point.assign(sx.x.begin(), sx.x.begin() + n);
  out.value = 0;
  for (const auto& [j, c] : lp.objective) out.value += c * out.point[j];
  if (!lp_feasible(lp, out.point)) throw std::logic_error("simplex produced an infeasible point");
  return out;
}

// Null space basis of the row space via fraction-free (Bareiss) elimination.
// Each basis vector is primitive integral with a positive free coordinate.
inline std::vector<std::vector<Rational>> kernel_basis(const std::vector<SparseRow>& rows, int dim) {
  std::vector<std::vector<BigInt>> M;
  for (const auto& r : rows) {
    BigInt scale = 1;
    for (const auto& [j, c] : r) lcm_accumulate(scale, c);
    std::vector<BigInt> dense(dim);
    bool any = false;
    for (const auto& [j, c] : r) {
      if (j < 0 || j >= dim) throw std::out_of_range("kernel_basis index out of range");
      Rational v = c * scale;
      dense[j] += v.get_num();
      any = true;
    }
    if (any) M.push_back(std::move(dense));
  }
  const int m = static_cast<int>(M.size());
  std::vector<int> pivot_col;
  BigInt prev = 1;
  int r = 0;
  for (int c = 0; c < dim && r < m; ++c) {
    int p = r;
    while (p < m && M[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(M[p], M[r]);
    for (int i = r + 1; i < m; ++i) {
      for (int j = c + 1; j < dim; ++j) {
        BigInt v = M[r][c] * M[i][j] - M[i][c] * M[r][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        M[i][j] = v;
      }
      M[i][c] = 0;
    }
    prev = M[r][c];
    pivot_col.push_back(c);
    ++r;
  }
  const int rank = r;
  std::vector<bool> is_pivot(dim, false);
  for (int c : pivot_col) is_pivot[c] = true;

  std::vector<std::vector<Rational>> basis;
  for (int f = 0; f < dim; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> x(dim);
    x[f] = 1;
    for (int i = rank - 1; i >= 0; --i) {
      int c = pivot_col[i];
      Rational s = 0;
      for (int j = c + 1; j < dim; ++j)
        if (M[i][j] != 0 && x[j] != 0) s += Rational(M[i][j]) * x[j];
      x[c] = -s / Rational(M[i][c]);
    }
    BigInt scale = 1;
    for (const auto& v : x) lcm_accumulate(scale, v);
    BigInt g = 0;
    for (auto& v : x) {
      v *= scale;
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_num_mpz_t());
    }
    if (g > 1)
      for (auto& v : x) v /= g;
    basis.push_back(std::move(x));
  }
  return basis;
}

}  // namespace usp
