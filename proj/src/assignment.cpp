#include "spa/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spa {

Matrix zeros(int rows, int cols) {
  return Matrix(rows, std::vector<double>(cols, 0.0));
}

Matrix sample_gumbel(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Matrix g = zeros(rows, cols);
  for (auto& row : g)
    for (auto& v : row) {
      double u = std::clamp(uni(rng), 1e-12, 1.0 - 1e-12);
      v = -std::log(-std::log(u));
    }
  return g;
}

Matrix soft_assignment(const Matrix& lambda, const Matrix& g, double tau) {
  if (tau <= 0) throw std::invalid_argument("soft_assignment: tau must be > 0");
  const int rows = (int)lambda.size(), cols = (int)lambda[0].size();
  Matrix soft = zeros(rows, cols);
  for (int j = 0; j < cols; ++j) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i)
      mx = std::max(mx, (lambda[i][j] + g[i][j]) / tau);
    double sum = 0;
    for (int i = 0; i < rows; ++i) {
      soft[i][j] = std::exp((lambda[i][j] + g[i][j]) / tau - mx);
      sum += soft[i][j];
    }
    for (int i = 0; i < rows; ++i) soft[i][j] /= sum;
  }
  return soft;
}

std::vector<int> hard_assignment(const Matrix& lambda, const Matrix& g) {
  const int rows = (int)lambda.size(), cols = (int)lambda[0].size();
  std::vector<int> hot(cols, 0);
  for (int j = 0; j < cols; ++j) {
    double best = lambda[0][j] + g[0][j];
    for (int i = 1; i < rows; ++i) {
      const double v = lambda[i][j] + g[i][j];
      if (v > best) { best = v; hot[j] = i; }
    }
  }
  return hot;
}

Matrix one_hot_columns(const std::vector<int>& hot, int rows) {
  Matrix A = zeros(rows, (int)hot.size());
  for (int j = 0; j < (int)hot.size(); ++j) A[hot[j]][j] = 1.0;
  return A;
}

double assignment_loss(const Matrix& hard) {
  const int rows = (int)hard.size();
  double total = 0;
  for (const auto& row : hard) {
    double used = 0;
    for (double v : row) used += v;
    total += std::max(1.0 - used, 0.0);
  }
  return total / rows;
}

std::vector<std::vector<Vec3>> select_shapes(
    const std::vector<std::vector<Vec3>>& canonical, const Matrix& hard) {
  if (canonical.size() != hard.size())
    throw std::invalid_argument("select_shapes: shape count mismatch");
  const int cols = (int)hard[0].size();
  std::vector<std::vector<Vec3>> out(cols);
  for (int j = 0; j < cols; ++j) {
    int hot = -1;
    for (int i = 0; i < (int)hard.size(); ++i)
      if (hard[i][j] != 0.0) { hot = i; break; }
    if (hot < 0) throw std::invalid_argument("select_shapes: column not one-hot");
    out[j] = canonical[hot];
  }
  return out;
}

void backprop_selection(const Matrix& soft, const Matrix& dW, double tau,
                        Matrix& dlambda) {
  const int rows = (int)soft.size(), cols = (int)soft[0].size();
  for (int j = 0; j < cols; ++j) {
    double inner = 0;
    for (int i = 0; i < rows; ++i) inner += soft[i][j] * dW[i][j];
    for (int i = 0; i < rows; ++i)
      dlambda[i][j] += soft[i][j] * (dW[i][j] - inner) / tau;
  }
}

StraightThroughSelect::StraightThroughSelect(const Matrix& lambda,
                                             const Matrix& g, double tau_)
    : soft(soft_assignment(lambda, g, tau_)),
      hot(hard_assignment(lambda, g)),
      tau(tau_) {}

std::vector<double> StraightThroughSelect::forward(
    const std::vector<double>& values) const {
  std::vector<double> out(hot.size());
  for (int j = 0; j < (int)hot.size(); ++j) out[j] = values[hot[j]];
  return out;
}

void StraightThroughSelect::backward(const std::vector<double>& values,
                                     const std::vector<double>& dout,
                                     Matrix& dlambda) const {
  Matrix dW = zeros((int)values.size(), (int)hot.size());
  for (int j = 0; j < (int)hot.size(); ++j)
    for (int i = 0; i < (int)values.size(); ++i) dW[i][j] = dout[j] * values[i];
  backprop_selection(soft, dW, tau, dlambda);
}

} // namespace spa
