#include "lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "linalg.hpp"

namespace bolasso {

namespace {

double soft_threshold(double z, double mu) {
  if (z > mu) return z - mu;
  if (z < -mu) return z + mu;
  return 0.0;
}

PathKnot make_knot(double mu, Vector w) {
  PathKnot k;
  k.mu = mu;
  k.active = support_of(w, 0.0);
  k.signs = sign_pattern_of(w, 0.0);
  k.weights = std::move(w);
  return k;
}

}  // namespace

LassoProblem make_problem(Matrix design, Vector response, bool centered, bool scaled) {
  if (design.rows() < 1 || design.cols() < 1) throw InvalidArgument("problem: empty design");
  if (design.rows() != response.size()) {
    throw InvalidArgument("problem: design has " + std::to_string(design.rows()) +
                          " rows but response has " + std::to_string(response.size()));
  }
  if (!design.allFinite() || !response.allFinite()) {
    throw InvalidArgument("problem: non-finite entries");
  }
  const double n = static_cast<double>(design.rows());
  if (centered) {
    for (Index j = 0; j < design.cols(); ++j) {
      if (std::abs(design.col(j).mean()) > 1e-10) {
        throw InvalidArgument("problem: column " + std::to_string(j) + " not centered");
      }
    }
    if (std::abs(response.mean()) > 1e-10) throw InvalidArgument("problem: response not centered");
  }
  if (scaled) {
    for (Index j = 0; j < design.cols(); ++j) {
      const double m2 = design.col(j).squaredNorm() / n;
      const double mean = design.col(j).mean();
      if (m2 - mean * mean > 1e-20 && std::abs(std::sqrt(m2) - 1.0) > 1e-10) {
        throw InvalidArgument("problem: column " + std::to_string(j) + " not unit-norm");
      }
    }
  }
  return LassoProblem{std::move(design), std::move(response), centered, scaled};
}

Matrix gram_matrix(const LassoProblem& problem) {
  const double n = static_cast<double>(problem.n());
  Matrix g = (problem.design.transpose() * problem.design) / n;
  // Symmetrize away rounding so downstream Cholesky sees an exactly
  // symmetric matrix.
  g = ((g + Matrix(g.transpose())) * 0.5).eval();
  return g;
}

Vector gram_rhs(const LassoProblem& problem) {
  return problem.design.transpose() * problem.response / static_cast<double>(problem.n());
}

double mu_max(const LassoProblem& problem) {
  return gram_rhs(problem).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// LARS with the lasso modification, run in Gram space. Between events the
// solution moves linearly: w_A(mu_k - t) = w_A(mu_k) + t * d_A with
// d_A = G_AA^{-1} s_A, which keeps c_j = mu s_j on the active set. Events are
// (a) an inactive correlation reaching the boundary |c_j| = mu, (b) an active
// coefficient crossing zero (variable drop), (c) mu reaching 0.
// ---------------------------------------------------------------------------

namespace {

// Active set in insertion order together with an incrementally maintained
// Cholesky factor of G_AA. Entries extend the factor by one row; drops force
// a refactorization (drops are the rarer event).
struct LarsState {
  std::vector<Index> active;  // insertion order
  std::vector<char> in_active;
  Vector signs;  // +-1 on active, 0 elsewhere
  Matrix l;      // leading k x k block holds the lower factor of G_AA
  double pivot_floor = 0.0;

  void init(Index p, const Matrix& g) {
    in_active.assign(static_cast<std::size_t>(p), 0);
    signs = Vector::Zero(p);
    l = Matrix::Zero(p, p);
    pivot_floor = static_cast<double>(p) * std::numeric_limits<double>::epsilon() *
                  std::max(g.diagonal().maxCoeff(), 0.0);
  }

  Index size() const { return static_cast<Index>(active.size()); }

  /// Would-be Cholesky pivot of G_AA extended by column j; fills row k of
  /// the factor buffer as a side effect but leaves the set unchanged.
  double extension_pivot(const Matrix& g, Index j) {
    const Index k = size();
    // New factor row: solve L x = G[active, j], diag = G_jj - |x|^2.
    for (Index i = 0; i < k; ++i) {
      double s = g(active[static_cast<std::size_t>(i)], j);
      for (Index c = 0; c < i; ++c) s -= l(i, c) * l(k, c);
      l(k, i) = s / l(i, i);
    }
    double d = g(j, j);
    for (Index c = 0; c < k; ++c) d -= l(k, c) * l(k, c);
    return d;
  }

  void add(const Matrix& g, Index j, double sign) {
    const Index k = size();
    const double d = extension_pivot(g, j);
    if (d <= pivot_floor) {
      throw DegenerateDesign("lars: entering variable " + std::to_string(j) +
                             " is numerically collinear with the active set");
    }
    l(k, k) = std::sqrt(d);
    active.push_back(j);
    in_active[static_cast<std::size_t>(j)] = 1;
    signs(j) = sign;
  }

  void remove(const Matrix& g, Index j) {
    active.erase(std::find(active.begin(), active.end(), j));
    in_active[static_cast<std::size_t>(j)] = 0;
    signs(j) = 0.0;
    refactor(g);
  }

  void refactor(const Matrix& g) {
    const Index k = size();
    for (Index r = 0; r < k; ++r) {
      const Index jr = active[static_cast<std::size_t>(r)];
      for (Index c = 0; c < r; ++c) {
        double s = g(jr, active[static_cast<std::size_t>(c)]);
        for (Index t = 0; t < c; ++t) s -= l(r, t) * l(c, t);
        l(r, c) = s / l(c, c);
      }
      double d = g(jr, jr);
      for (Index t = 0; t < r; ++t) d -= l(r, t) * l(r, t);
      if (d <= pivot_floor) {
        throw DegenerateDesign("lars: active set became numerically collinear");
      }
      l(r, r) = std::sqrt(d);
    }
  }

  /// Direction d = G_AA^{-1} s_A in active order.
  Vector direction() const {
    const Index k = size();
    Vector x(k);
    for (Index i = 0; i < k; ++i) {
      double s = signs(active[static_cast<std::size_t>(i)]);
      for (Index c = 0; c < i; ++c) s -= l(i, c) * x(c);
      x(i) = s / l(i, i);
    }
    for (Index i = k - 1; i >= 0; --i) {
      double s = x(i);
      for (Index c = i + 1; c < k; ++c) s -= l(c, i) * x(c);
      x(i) = s / l(i, i);
    }
    return x;
  }
};

enum class EventKind { drop, entry, finish };

}  // namespace

LassoPath lars_lasso_path(const LassoProblem& problem) {
  return lars_lasso_path(problem, 32 + 8 * problem.p());
}

LassoPath lars_lasso_path(const LassoProblem& problem, Index max_knots) {
  if (max_knots < 1) throw InvalidArgument("lars: max_knots must be >= 1");
  const Index p = problem.p();
  const Matrix g = gram_matrix(problem);
  const Vector b = gram_rhs(problem);

  LassoPath path;
  double mu = b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
  Vector w = Vector::Zero(p);
  if (mu <= 0.0) {
    // X'y = 0: the zero vector is optimal for every mu.
    path.knots.push_back(make_knot(0.0, w));
    return path;
  }
  path.knots.push_back(make_knot(mu, w));
  if (static_cast<Index>(path.knots.size()) >= max_knots) return path;

  LarsState st;
  st.init(p, g);

  // First entry: most correlated variable, lowest index on ties.
  {
    Index j0 = 0;
    double best = -1.0;
    for (Index j = 0; j < p; ++j) {
      if (std::abs(b(j)) > best) {
        best = std::abs(b(j));
        j0 = j;
      }
    }
    st.add(g, j0, b(j0) > 0 ? 1.0 : -1.0);
  }

  Vector c = b;  // correlations X'(y - Xw)/n at the current knot
  Vector a(p);
  Index just_dropped = -1;
  // Entry candidates whose factor update failed at the current breakpoint;
  // cleared as soon as the path moves.
  std::vector<char> blocked(static_cast<std::size_t>(p), 0);
  const double mu_top = mu;
  const Index iter_cap = 8 * (max_knots + p) + 64;

  for (Index iter = 0; iter < iter_cap; ++iter) {
    const Index na = st.size();
    if (na == 0) throw DegenerateDesign("lars: active set emptied mid-path");

    const Vector d = st.direction();

    // A just-entered variable whose direction points against its sign would
    // immediately violate KKT; treat it as an instantaneous drop.
    {
      bool removed = false;
      for (Index i = 0; i < na && !removed; ++i) {
        const Index j = st.active[static_cast<std::size_t>(i)];
        if (w(j) == 0.0 && d(i) * st.signs(j) < 0.0) {
          st.remove(g, j);
          just_dropped = j;
          removed = true;
        }
      }
      if (removed) continue;
    }

    a.setZero();  // a_j = (G d)_j restricted to the direction
    for (Index i = 0; i < na; ++i) {
      a += d(i) * g.row(st.active[static_cast<std::size_t>(i)]).transpose();
    }

    // An inactive variable pinned on the boundary (|c_j| = mu) whose
    // equiangular coefficient equals the boundary slope stays tied forever:
    // an exactly collinear duplicate of the active set. Such a duplicate is
    // tied from the very top of the path, so the check is restricted to the
    // mu range where correlations are safely above the rounding floor.
    if (mu >= 1e-6 * mu_top) {
      for (Index j = 0; j < p; ++j) {
        if (st.in_active[static_cast<std::size_t>(j)] || j == just_dropped) continue;
        if (std::abs(c(j)) >= mu * (1.0 - 1e-12) &&
            std::abs(a(j) - (c(j) > 0 ? 1.0 : -1.0)) <= 1e-12 * (1.0 + std::abs(a(j)))) {
          throw DegenerateDesign("lars: variable " + std::to_string(j) +
                                 " is exactly collinear with the active set and permanently tied");
        }
      }
    }

    // Smallest positive step among drop / entry / finish events. Scanning
    // drops before entries (each in ascending index) makes tie-breaking
    // deterministic. Entries computing to the finish time itself (within
    // rounding) are endpoint artifacts: once the active set interpolates the
    // response, every remaining correlation scales exactly with mu and the
    // nominal entry lands on mu = 0.
    double t_best = mu;
    const double t_entry_cap = mu * (1.0 - 1e-12);
    EventKind kind = EventKind::finish;
    Index event_j = -1;
    double entry_sign = 0.0;

    for (Index i = 0; i < na; ++i) {
      const Index j = st.active[static_cast<std::size_t>(i)];
      if (w(j) != 0.0 && d(i) != 0.0) {
        const double t = -w(j) / d(i);
        if (t > 0.0 && t < t_best) {
          t_best = t;
          kind = EventKind::drop;
          event_j = j;
        }
      }
    }
    for (Index j = 0; j < p; ++j) {
      if (st.in_active[static_cast<std::size_t>(j)] || blocked[static_cast<std::size_t>(j)]) continue;
      // A just-dropped variable sits exactly on the boundary; demanding a
      // strictly positive step stops a zero-length add/drop flicker while
      // still allowing genuine re-entry later in the segment.
      const double t_min = (j == just_dropped) ? 1e-12 * mu : 0.0;
      const double dplus = 1.0 - a(j);
      if (dplus > 1e-12) {
        double t = (mu - c(j)) / dplus;
        if (t < 0.0 && t > -1e-12 * mu) t = 0.0;
        if (t >= t_min && t < t_best && t < t_entry_cap) {
          t_best = t;
          kind = EventKind::entry;
          event_j = j;
          entry_sign = 1.0;
        }
      }
      const double dminus = 1.0 + a(j);
      if (dminus > 1e-12) {
        double t = (mu + c(j)) / dminus;
        if (t < 0.0 && t > -1e-12 * mu) t = 0.0;
        if (t >= t_min && t < t_best && t < t_entry_cap) {
          t_best = t;
          kind = EventKind::entry;
          event_j = j;
          entry_sign = -1.0;
        }
      }
    }
    just_dropped = -1;

    // An entry whose factor extension has no positive pivot is numerically
    // inside the span of the active set (possible once the fit can
    // interpolate); it cannot carry weight, so exclude it at this breakpoint
    // and re-scan without moving.
    if (kind == EventKind::entry && st.extension_pivot(g, event_j) <= st.pivot_floor) {
      blocked[static_cast<std::size_t>(event_j)] = 1;
      continue;
    }

    // Advance to the event.
    for (Index i = 0; i < na; ++i) w(st.active[static_cast<std::size_t>(i)]) += t_best * d(i);
    mu = (kind == EventKind::finish) ? 0.0 : mu - t_best;
    if (t_best > 0.0) std::fill(blocked.begin(), blocked.end(), 0);

    switch (kind) {
      case EventKind::drop:
        w(event_j) = 0.0;
        st.remove(g, event_j);
        just_dropped = event_j;
        break;
      case EventKind::entry:
        st.add(g, event_j, entry_sign);
        break;
      case EventKind::finish:
        break;
    }

    // Refresh correlations from scratch; incremental updates drift over long
    // paths.
    c = b;
    for (Index j = 0; j < p; ++j) {
      if (w(j) != 0.0) c -= w(j) * g.row(j).transpose();
    }

    // Zero-length steps (simultaneous events) only mutate the active set; the
    // knot at this mu is already recorded, so merge rather than append.
    if (mu < path.knots.back().mu) {
      path.knots.push_back(make_knot(mu, w));
    } else {
      path.knots.back() = make_knot(path.knots.back().mu, w);
    }

    if (mu <= 0.0) return path;
    if (static_cast<Index>(path.knots.size()) >= max_knots) return path;
  }
  throw DegenerateDesign("lars: event limit exceeded (cycling ties)");
}

Vector coordinate_descent(const LassoProblem& problem, double mu, double tol, Index max_iter) {
  if (mu < 0.0) throw InvalidArgument("coordinate_descent: mu must be >= 0");
  if (tol <= 0.0) throw InvalidArgument("coordinate_descent: tol must be > 0");
  if (max_iter < 1) throw InvalidArgument("coordinate_descent: max_iter must be >= 1");
  const Index p = problem.p();
  const Matrix g = gram_matrix(problem);
  const Vector b = gram_rhs(problem);

  Vector w = Vector::Zero(p);
  Vector c = b;  // b - G w
  double max_delta = 0.0;
  for (Index sweep = 0; sweep < max_iter; ++sweep) {
    max_delta = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double gjj = g(j, j);
      if (gjj <= 0.0) continue;  // identically zero column
      const double rho = c(j) + gjj * w(j);
      const double w_new = soft_threshold(rho, mu) / gjj;
      const double delta = w_new - w(j);
      if (delta != 0.0) {
        w(j) = w_new;
        c -= delta * g.row(j).transpose();
      }
      max_delta = std::max(max_delta, std::abs(delta));
    }
    c = b;
    for (Index j = 0; j < p; ++j) {
      if (w(j) != 0.0) c -= w(j) * g.row(j).transpose();
    }
    if (max_delta <= tol * (1.0 + w.cwiseAbs().maxCoeff())) return w;
  }
  throw NotConverged("coordinate_descent: no convergence after " + std::to_string(max_iter) +
                     " sweeps (last max change " + std::to_string(max_delta) + ")");
}

Vector path_at(const LassoPath& path, double mu) {
  if (path.knots.empty()) throw InvalidArgument("path_at: empty path");
  const auto& knots = path.knots;
  if (mu >= knots.front().mu) return Vector::Zero(knots.front().weights.size());
  if (mu <= knots.back().mu) return knots.back().weights;
  // Bracket: knots[k].mu > mu >= knots[k+1].mu (mu strictly decreasing).
  std::size_t lo = 0, hi = knots.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (knots[mid].mu > mu) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (knots[hi].mu == mu) return knots[hi].weights;
  const double span = knots[lo].mu - knots[hi].mu;
  const double t = (knots[lo].mu - mu) / span;
  return (1.0 - t) * knots[lo].weights + t * knots[hi].weights;
}

IndexSet path_support_at(const LassoPath& path, double mu) {
  if (path.knots.empty()) throw InvalidArgument("path_support_at: empty path");
  for (const auto& k : path.knots) {
    if (k.mu == mu) return k.active;
  }
  // Strictly between knots every coordinate is linear with the value at the
  // segment endpoints, so the interpolated nonzeros are exactly the segment's
  // active set.
  return support_of(path_at(path, mu), 0.0);
}

double kkt_residual(const LassoProblem& problem, double mu, const Vector& w) {
  if (mu < 0.0) throw InvalidArgument("kkt_residual: mu must be >= 0");
  if (w.size() != problem.p()) throw InvalidArgument("kkt_residual: weight size mismatch");
  const Vector r = problem.response - problem.design * w;
  const Vector c = problem.design.transpose() * r / static_cast<double>(problem.n());
  double worst = 0.0;
  for (Index j = 0; j < problem.p(); ++j) {
    const double v = (w(j) != 0.0) ? std::abs(c(j) - mu * (w(j) > 0 ? 1.0 : -1.0))
                                   : std::max(std::abs(c(j)) - mu, 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

double lasso_objective(const LassoProblem& problem, double mu, const Vector& w) {
  const double n = static_cast<double>(problem.n());
  return (problem.response - problem.design * w).squaredNorm() / (2.0 * n) + mu * w.lpNorm<1>();
}

IndexSet support_of(const Vector& w, double tol) {
  std::vector<Index> idx;
  for (Index j = 0; j < w.size(); ++j) {
    if (std::abs(w(j)) > tol) idx.push_back(j);
  }
  return IndexSet(std::move(idx));
}

SignPattern sign_pattern_of(const Vector& w, double tol) {
  SignPattern s;
  s.signs.resize(static_cast<std::size_t>(w.size()));
  for (Index j = 0; j < w.size(); ++j) {
    s.signs[static_cast<std::size_t>(j)] =
        std::abs(w(j)) > tol ? static_cast<std::int8_t>(w(j) > 0 ? 1 : -1) : static_cast<std::int8_t>(0);
  }
  return s;
}

double mean_squared_error(const Vector& predicted, const Vector& truth) {
  if (predicted.size() != truth.size() || predicted.size() == 0) {
    throw InvalidArgument("mean_squared_error: size mismatch");
  }
  return (predicted - truth).squaredNorm() / static_cast<double>(predicted.size());
}

}  // namespace bolasso
