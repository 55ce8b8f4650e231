#include "notears/solver.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace notears {

namespace {

double proj_grad_inf_norm(const Vec& x, const Vec& g) {
  double m = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double pg = x(i) > 0.0 ? g(i) : std::min(g(i), 0.0);
    m = std::max(m, std::abs(pg));
  }
  return m;
}

}  // namespace

Vec minimize_box(const BoxObjective& f, Vec x, const SolverConfig& cfg) {
  const double c1 = 1e-4;
  x = x.cwiseMax(0.0);
  Vec g(x.size());
  double fval = f(x, g);
  if (!std::isfinite(fval) || !g.allFinite())
    throw numerical_error("minimize_box: non-finite objective or gradient at start");

  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;  // 1 / (y^T s)

  // Initial trial step, carried across iterations. On stiff objectives (large
  // rho) the acceptable step is orders of magnitude below 1; restarting the
  // backtracking at 1.0 every iteration costs ~50 rejected probes each time.
  double t_init = 1.0;

  for (int iter = 0; iter < cfg.inner_max_iter; ++iter) {
    if (proj_grad_inf_norm(x, g) <= cfg.inner_grad_tol) break;

    // two-loop recursion
    Vec dir = -g;
    if (!s_hist.empty()) {
      const int m = static_cast<int>(s_hist.size());
      std::vector<double> a(m);
      Vec q = g;
      for (int i = m - 1; i >= 0; --i) {
        a[i] = rho_hist[i] * s_hist[i].dot(q);
        q -= a[i] * y_hist[i];
      }
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
      for (int i = 0; i < m; ++i) {
        const double b = rho_hist[i] * y_hist[i].dot(q);
        q += (a[i] - b) * s_hist[i];
      }
      dir = -q;
    }
    if (dir.dot(g) >= 0.0) dir = -g;  // safeguard: ensure descent

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) dir = -g;  // steepest-descent fallback
      double t = t_init;
      while (t >= 1e-16) {
        const Vec x_new = (x + t * dir).cwiseMax(0.0);
        Vec g_new(x.size());
        const double f_new = f(x_new, g_new);
        if (!std::isfinite(f_new) || !g_new.allFinite()) {
          t *= 0.5;  // overshoot into overflow territory: shorten the step
          continue;
        }
        if (f_new <= fval + c1 * g.dot(x_new - x)) {
          const Vec s = x_new - x;
          const Vec y = g_new - g;
          const double sy = s.dot(y);
          if (sy > 1e-10 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > cfg.memory) {
              s_hist.pop_front();
              y_hist.pop_front();
              rho_hist.pop_front();
            }
          }
          x = x_new;
          g = g_new;
          fval = f_new;
          t_init = std::min(1.0, 4.0 * t);  // next search starts near the working scale
          accepted = true;
          break;
        }
        t *= 0.5;
      }
    }
    if (!accepted) break;  // line search exhausted in both directions: stalled
  }
  return x;
}

namespace {

struct Packing {
  std::vector<int> idx;  // flat row-major positions of active entries
  int d;

  Mat unpack(const Vec& x) const {
    Mat W = Mat::Zero(d, d);
    const int nv = static_cast<int>(idx.size());
    for (int k = 0; k < nv; ++k) W(idx[k] / d, idx[k] % d) = x(k) - x(nv + k);
    return W;
  }
};

}  // namespace

std::pair<Mat, AugLagState> augmented_lagrangian(const ScoreFn& score, const HOracle& h_fn,
                                                 const Mat& l1_coeffs, const BoolMat& active_mask,
                                                 const SolverConfig& cfg,
                                                 std::vector<TraceRecord>* trace,
                                                 const SplitVars* start) {
  const int d = static_cast<int>(l1_coeffs.rows());
  if (l1_coeffs.cols() != d || active_mask.rows() != d || active_mask.cols() != d)
    throw invalid_argument_error("augmented_lagrangian: shape mismatch");
  if (!l1_coeffs.allFinite() || (l1_coeffs.array() < 0.0).any())
    throw invalid_argument_error("augmented_lagrangian: l1 coefficients must be finite and >= 0");

  Packing pk;
  pk.d = d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && active_mask(i, j)) pk.idx.push_back(i * d + j);
  const int nv = static_cast<int>(pk.idx.size());

  AugLagState st;
  st.rho = cfg.rho0;
  st.alpha = cfg.alpha0;

  auto make_state_iterate = [&](const Vec& x) {
    SplitVars sv;
    sv.w_plus = Mat::Zero(d, d);
    sv.w_minus = Mat::Zero(d, d);
    sv.mask = BoolMat::Constant(d, d, false);
    for (int k = 0; k < nv; ++k) {
      const int i = pk.idx[k] / d, j = pk.idx[k] % d;
      sv.w_plus(i, j) = x(k);
      sv.w_minus(i, j) = x(nv + k);
      sv.mask(i, j) = true;
    }
    return sv;
  };

  if (nv == 0) {  // degenerate: nothing to optimize (e.g. d = 1)
    st.h_val = h_fn(Mat::Zero(d, d)).h;
    st.converged = true;
    st.iterate = make_state_iterate(Vec::Zero(0));
    return {Mat::Zero(d, d), st};
  }

  Vec x = Vec::Zero(2 * nv);
  if (start) {
    for (int k = 0; k < nv; ++k) {
      const int i = pk.idx[k] / d, j = pk.idx[k] % d;
      x(k) = std::max(start->w_plus(i, j), 0.0);
      x(nv + k) = std::max(start->w_minus(i, j), 0.0);
    }
  }

  Vec l1_flat(nv);
  for (int k = 0; k < nv; ++k) l1_flat(k) = l1_coeffs(pk.idx[k] / d, pk.idx[k] % d);

  auto inner_objective = [&](const Vec& v, Vec& g) -> double {
    const Mat W = pk.unpack(v);
    Mat gs(d, d);
    const double fs = score(W, gs);
    const AcyclicityValue hv = h_fn(W);
    const double obj = fs + 0.5 * st.rho * hv.h * hv.h + st.alpha * hv.h +
                       (l1_flat.array() * (v.head(nv) + v.tail(nv)).array()).sum();
    const Mat gsm = gs + (st.rho * hv.h + st.alpha) * hv.grad;
    for (int k = 0; k < nv; ++k) {
      const double ge = gsm(pk.idx[k] / d, pk.idx[k] % d);
      g(k) = ge + l1_flat(k);
      g(nv + k) = -ge + l1_flat(k);
    }
    return obj;
  };

  double h_prev = std::numeric_limits<double>::infinity();
  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    Vec x_try;
    double h_new = 0.0;
    while (true) {
      x_try = minimize_box(inner_objective, x, cfg);
      h_new = h_fn(pk.unpack(x_try)).h;
      if (h_new < cfg.xi * h_prev || st.rho >= cfg.rho_max) break;
      st.rho *= cfg.eta;
    }
    x = x_try;
    h_prev = h_new;
    st.alpha += st.rho * h_new;
    st.h_val = h_new;
    st.outer_iter = outer;
    if (trace) {
      Mat gs(d, d);
      trace->push_back({outer, st.rho, st.alpha, h_new, score(pk.unpack(x), gs)});
    }
    if (h_new <= cfg.h_tol) {
      st.converged = true;
      break;
    }
    if (st.rho >= cfg.rho_max) {
      st.iterate = make_state_iterate(x);
      throw convergence_error("augmented_lagrangian: rho_max reached with h above tolerance",
                              pk.unpack(x), h_new, outer);
    }
  }

  st.iterate = make_state_iterate(x);
  return {pk.unpack(x), st};
}

}  // namespace notears
