#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cmsent/errors.hpp"
#include "cmsent/nb.hpp"

namespace cmsent {

enum class Loss { Logistic, Hinge };

std::string_view to_string(Loss loss);
Loss parse_loss(std::string_view s);

struct TrainConfig {
  Loss loss = Loss::Logistic;
  double lambda = 1e-4;  // L2 strength
  double alpha = 1.0;    // NB smoothing
  double beta = 1.0;     // interpolation; 1 disables it
  int epochs = 100;      // L-BFGS iterations (logistic) or SGD passes (hinge)
  std::uint64_t seed = 42;
  double tol = 1e-6;     // full-batch (sub)gradient norm
  bool nb_binarize = false;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

template <typename Scalar>
struct LinearFit {
  DenseVec<Scalar> w;
  Scalar b = 0;
  int iterations = 0;
  Scalar grad_norm = 0;
  bool converged = false;
};

namespace detail {

// ln(1 + e^{-z}) without overflow.
template <typename Scalar>
Scalar log1p_exp_neg(Scalar z) {
  return z >= 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// 1 / (1 + e^{z})
template <typename Scalar>
Scalar sigmoid_neg(Scalar z) {
  if (z >= 0) {
    const Scalar e = std::exp(-z);
    return e / (Scalar(1) + e);
  }
  return Scalar(1) / (Scalar(1) + std::exp(z));
}

template <typename Scalar>
void check_problem(std::span<const Eigen::SparseVector<Scalar>> rows, std::span<const int> signs) {
  if (rows.empty()) throw TrainError("train_linear: no rows");
  if (rows.size() != signs.size()) throw TrainError("train_linear: rows/labels length mismatch");
  bool pos = false, neg = false;
  for (int s : signs) {
    if (s == 1) pos = true;
    else if (s == -1) neg = true;
    else throw TrainError("train_linear: labels must be +1 or -1");
  }
  if (!pos || !neg) throw TrainError("train_linear: both classes must be present");
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw TrainError("train_linear: rows differ in dimension");
}

}  // namespace detail

// (1/N) sum ln(1 + exp(-y (w.x + b))) + lambda |w|^2
template <typename Scalar>
Scalar logistic_objective(std::span<const Eigen::SparseVector<Scalar>> rows,
                          std::span<const int> signs, const DenseVec<Scalar>& w, Scalar b,
                          Scalar lambda) {
  Scalar loss = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    loss += detail::log1p_exp_neg<Scalar>(signs[i] * (rows[i].dot(w) + b));
  return loss / static_cast<Scalar>(rows.size()) + lambda * w.squaredNorm();
}

// Gradient of logistic_objective; returns the objective value as well.
template <typename Scalar>
Scalar logistic_gradient(std::span<const Eigen::SparseVector<Scalar>> rows,
                         std::span<const int> signs, const DenseVec<Scalar>& w, Scalar b,
                         Scalar lambda, DenseVec<Scalar>& grad_w, Scalar& grad_b) {
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(rows.size());
  grad_w = (2 * lambda) * w;
  grad_b = 0;
  Scalar loss = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Scalar z = signs[i] * (rows[i].dot(w) + b);
    loss += detail::log1p_exp_neg(z);
    const Scalar coef = -signs[i] * detail::sigmoid_neg(z) * inv_n;
    for (typename Eigen::SparseVector<Scalar>::InnerIterator it(rows[i]); it; ++it)
      grad_w[it.index()] += coef * it.value();
    grad_b += coef;
  }
  return loss * inv_n + lambda * w.squaredNorm();
}

// (1/N) sum max(0, 1 - y (w.x + b)) + lambda |w|^2
template <typename Scalar>
Scalar hinge_objective(std::span<const Eigen::SparseVector<Scalar>> rows,
                       std::span<const int> signs, const DenseVec<Scalar>& w, Scalar b,
                       Scalar lambda) {
  Scalar loss = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    loss += std::max(Scalar(0), Scalar(1) - signs[i] * (rows[i].dot(w) + b));
  return loss / static_cast<Scalar>(rows.size()) + lambda * w.squaredNorm();
}

// A subgradient of hinge_objective (the zero element is taken at the kink).
template <typename Scalar>
Scalar hinge_subgradient(std::span<const Eigen::SparseVector<Scalar>> rows,
                         std::span<const int> signs, const DenseVec<Scalar>& w, Scalar b,
                         Scalar lambda, DenseVec<Scalar>& grad_w, Scalar& grad_b) {
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(rows.size());
  grad_w = (2 * lambda) * w;
  grad_b = 0;
  Scalar loss = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Scalar z = signs[i] * (rows[i].dot(w) + b);
    if (z < 1) {
      loss += 1 - z;
      const Scalar coef = -signs[i] * inv_n;
      for (typename Eigen::SparseVector<Scalar>::InnerIterator it(rows[i]); it; ++it)
        grad_w[it.index()] += coef * it.value();
      grad_b += coef;
    }
  }
  return loss * inv_n + lambda * w.squaredNorm();
}

namespace detail {

// Full-batch L-BFGS with backtracking (Armijo) line search over theta = [w; b].
template <typename Scalar>
LinearFit<Scalar> fit_logistic(std::span<const Eigen::SparseVector<Scalar>> rows,
                               std::span<const int> signs, Scalar lambda, int max_iter,
                               Scalar tol) {
  constexpr int kMemory = 10;
  const Eigen::Index dim = rows.front().size();
  using Vec = DenseVec<Scalar>;

  auto evaluate = [&](const Vec& theta, Vec& grad) {
    Vec gw;
    Scalar gb;
    const Scalar f = logistic_gradient<Scalar>(rows, signs, theta.head(dim), theta[dim], lambda,
                                               gw, gb);
    grad.resize(dim + 1);
    grad.head(dim) = gw;
    grad[dim] = gb;
    if (!std::isfinite(f)) throw TrainError("train_linear: objective is not finite");
    return f;
  };

  Vec theta = Vec::Zero(dim + 1);
  Vec grad;
  Scalar f = evaluate(theta, grad);
  std::deque<Vec> s_hist, y_hist;
  std::deque<Scalar> rho_hist;

  LinearFit<Scalar> fit;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    if (grad.norm() <= tol) break;

    // Two-loop recursion.
    Vec dir = -grad;
    std::vector<Scalar> a(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      a[k] = rho_hist[k] * s_hist[k].dot(dir);
      dir -= a[k] * y_hist[k];
    }
    if (!s_hist.empty()) dir *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const Scalar beta = rho_hist[k] * y_hist[k].dot(dir);
      dir += (a[k] - beta) * s_hist[k];
    }

    Scalar slope = grad.dot(dir);
    if (!(slope < 0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -grad;
      slope = -grad.squaredNorm();
    }

    Scalar step = s_hist.empty() ? std::min(Scalar(1), Scalar(1) / grad.norm()) : Scalar(1);
    Vec next_theta, next_grad;
    Scalar next_f = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next_theta = theta + step * dir;
      next_f = evaluate(next_theta, next_grad);
      if (next_f <= f + Scalar(1e-4) * step * slope) {
        accepted = true;
        break;
      }
      step *= Scalar(0.5);
    }
    if (!accepted) break;  // no further decrease representable

    Vec s = next_theta - theta;
    Vec y = next_grad - grad;
    const Scalar sy = s.dot(y);
    if (sy > std::numeric_limits<Scalar>::epsilon() * y.squaredNorm()) {
      if (static_cast<int>(s_hist.size()) == kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(Scalar(1) / sy);
    }
    theta = std::move(next_theta);
    grad = std::move(next_grad);
    f = next_f;
  }

  fit.w = theta.head(dim);
  fit.b = theta[dim];
  fit.iterations = iter;
  fit.grad_norm = grad.norm();
  fit.converged = fit.grad_norm <= tol;
  return fit;
}

// Averaged SGD on the hinge objective with step 1 / (2 lambda (t + t0)).
// w is kept as scale * u and the running average as avg_scale * acc +
// avg_u * u, so every update touches only the row's support.
template <typename Scalar>
LinearFit<Scalar> fit_hinge(std::span<const Eigen::SparseVector<Scalar>> rows,
                            std::span<const int> signs, Scalar lambda, int epochs, Scalar tol,
                            std::uint64_t seed) {
  using Vec = DenseVec<Scalar>;
  const Eigen::Index dim = rows.front().size();
  const std::size_t n = rows.size();
  const Scalar t0 = Scalar(1) + Scalar(1) / (2 * lambda);

  Vec u = Vec::Zero(dim);
  Scalar scale = 1, bias = 0;
  Vec acc = Vec::Zero(dim);
  Scalar avg_scale = 1, avg_u = 0, avg_bias = 0;
  bool averaging = false;
  std::uint64_t averaged_steps = 0;

  auto current_w = [&] { return Vec(scale * u); };
  auto average_w = [&] { return Vec(avg_scale * acc + avg_u * u); };

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  LinearFit<Scalar> fit;
  Vec gw;
  Scalar gb;
  Scalar t = 0;
  int epoch = 0;
  for (; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    if (epoch == 1) averaging = true;
    for (std::size_t i : order) {
      const Scalar eta = Scalar(1) / (2 * lambda * (t + t0));
      const auto& x = rows[i];
      const Scalar y = signs[i];
      const Scalar z = y * (scale * x.dot(u) + bias);

      scale *= Scalar(1) - 2 * lambda * eta;
      if (z < 1) {
        const Scalar c = eta * y / scale;
        for (typename Eigen::SparseVector<Scalar>::InnerIterator it(x); it; ++it) {
          u[it.index()] += c * it.value();
          if (averaging && averaged_steps > 0)
            acc[it.index()] -= (avg_u * c / avg_scale) * it.value();
        }
        bias += eta * y;
      }

      if (averaging) {
        ++averaged_steps;
        if (averaged_steps == 1) {
          acc.setZero();
          avg_scale = 1;
          avg_u = scale;
          avg_bias = bias;
        } else {
          const Scalar mu = Scalar(1) / static_cast<Scalar>(averaged_steps);
          avg_scale *= Scalar(1) - mu;
          avg_u = (Scalar(1) - mu) * avg_u + mu * scale;
          avg_bias = (Scalar(1) - mu) * avg_bias + mu * bias;
        }
        if (avg_scale < Scalar(1e-9)) {
          acc = avg_scale * acc;
          avg_scale = 1;
        }
      }
      if (scale < Scalar(1e-9)) {
        const Scalar old = scale;
        u *= old;
        scale = 1;
        if (averaging && averaged_steps > 0) avg_u *= Scalar(1) / old;
      }
      t += 1;
    }

    const Vec w = averaging ? average_w() : current_w();
    const Scalar b = averaging ? avg_bias : bias;
    const Scalar f = hinge_subgradient<Scalar>(rows, signs, w, b, lambda, gw, gb);
    if (!std::isfinite(f)) throw TrainError("train_linear: objective is not finite");
    fit.grad_norm = std::sqrt(gw.squaredNorm() + gb * gb);
    if (fit.grad_norm <= tol) {
      ++epoch;
      fit.converged = true;
      break;
    }
  }

  fit.w = averaging ? average_w() : current_w();
  fit.b = averaging ? avg_bias : bias;
  fit.iterations = epoch;
  return fit;
}

}  // namespace detail

// Minimizes (1/N) sum loss(y_i (w.x_i + b)) + lambda |w|^2. Logistic loss uses
// full-batch L-BFGS; hinge loss uses averaged SGD with a seeded shuffle. Both
// stop once the full-batch (sub)gradient norm is at most cfg.tol or the
// iteration budget is spent.
template <typename Scalar>
LinearFit<Scalar> train_linear(std::span<const Eigen::SparseVector<Scalar>> rows,
                               std::span<const int> signs, const TrainConfig& cfg) {
  cfg.validate();
  detail::check_problem(rows, signs);
  const auto lambda = static_cast<Scalar>(cfg.lambda);
  const auto tol = static_cast<Scalar>(cfg.tol);
  if (cfg.loss == Loss::Logistic)
    return detail::fit_logistic<Scalar>(rows, signs, lambda, cfg.epochs, tol);
  return detail::fit_hinge<Scalar>(rows, signs, lambda, cfg.epochs, tol, cfg.seed);
}

}  // namespace cmsent
