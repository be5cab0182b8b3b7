#pragma once

// Limited-memory BFGS on a real parameter vector with Armijo backtracking.
// Internal to the library.

#include <cmath>
#include <deque>
#include <functional>

#include <Eigen/Dense>

namespace herald::detail {

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// `f` returns the value and writes the gradient.
inline LbfgsResult lbfgs_minimize(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& f,
                                  Eigen::VectorXd x, int max_iters, double gtol = 1e-10, double ftol = 1e-14,
                                  int memory = 10) {
  LbfgsResult r;
  Eigen::VectorXd g(x.size());
  double fx = f(x, g);
  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd g_new(x.size());
  for (int it = 0; it < max_iters; ++it) {
    r.iterations = it + 1;
    if (g.norm() < gtol) {
      r.converged = true;
      break;
    }
    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[static_cast<std::size_t>(i)] = rho_hist[static_cast<std::size_t>(i)] * s_hist[static_cast<std::size_t>(i)].dot(q);
      q -= alpha[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd d = -q;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    double t = 1.0;
    if (s_hist.empty()) t = std::min(1.0, 1.0 / std::max(1e-12, g.norm()));
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = fx;
    for (int h = 0; h < 50; ++h) {
      x_new = x + t * d;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      r.converged = true;
      break;
    }
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    const double improvement = fx - f_new;
    x = std::move(x_new);
    g = g_new;
    fx = f_new;
    if (sy > 1e-16) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (improvement <= ftol * std::max(1.0, std::abs(fx))) {
      r.converged = true;
      break;
    }
  }
  r.x = std::move(x);
  r.value = fx;
  return r;
}

}  // namespace herald::detail
