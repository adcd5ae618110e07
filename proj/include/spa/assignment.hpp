// Similar-parts assignment: Gumbel noise, soft/hard assignment columns, the
// straight-through selection contract, and the shape-activation hinge loss.
#pragma once

#include "spa/geometry.hpp"

#include <random>
#include <vector>

namespace spa {

using Matrix = std::vector<std::vector<double>>; // row-major, [rows][cols]

Matrix zeros(int rows, int cols);

// i.i.d. standard Gumbel entries, g = -log(-log u), u ~ Uniform(0,1).
Matrix sample_gumbel(int rows, int cols, std::mt19937_64& rng);

// Column j = softmax((lambda_j + g_j) / tau). Throws for tau <= 0.
Matrix soft_assignment(const Matrix& lambda, const Matrix& g, double tau);

// Hot row index per column, argmax of lambda + g; ties to the lowest index.
std::vector<int> hard_assignment(const Matrix& lambda, const Matrix& g);

// {0,1} matrix with the hot entries of hard_assignment.
Matrix one_hot_columns(const std::vector<int>& hot, int rows);

// Hinge loss (1/M_s) sum_i max(1 - sum_j A_ij, 0) on a hard matrix.
double assignment_loss(const Matrix& hard);

// Per-part selection of per-shape value stacks (3-mode product with A^T for
// one-hot columns reduces to a column gather).
std::vector<std::vector<Vec3>> select_shapes(
    const std::vector<std::vector<Vec3>>& canonical, const Matrix& hard);

// Chains per-entry selection-weight gradients dW through the softmax Jacobian
// of soft_assignment into dlambda. This is the backward half of the
// straight-through estimator: the forward pass selects hard, the backward pass
// differentiates the soft relaxation.
void backprop_selection(const Matrix& soft, const Matrix& dW, double tau,
                        Matrix& dlambda);

// Straight-through selection of scalar stacks: forward picks values[hot(j)],
// backward reports d(sum of selected)/dlambda via the soft path.
struct StraightThroughSelect {
  Matrix soft;
  std::vector<int> hot;
  double tau = 1.0;

  StraightThroughSelect(const Matrix& lambda, const Matrix& g, double tau_);

  std::vector<double> forward(const std::vector<double>& values) const;
  // dout: upstream gradient per part; accumulates into dlambda.
  void backward(const std::vector<double>& values,
                const std::vector<double>& dout, Matrix& dlambda) const;
};

} // namespace spa
