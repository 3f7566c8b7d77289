#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cbd/matrix.hpp"

namespace cbd {

enum class LinearLoss { kLogistic, kHinge };

struct LinearModelConfig {
    LinearLoss loss = LinearLoss::kLogistic;
    double C = 1.0;  // multiplies the data term
    std::uint64_t seed = 0;
    std::size_t max_epochs = 100;
    double learning_rate = 0.1;
    double tolerance = 1e-6;  // gradient-norm stop threshold
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    LinearModelConfig config;
    std::string trained_on;  // feature-space descriptor, e.g. "tfidf:V=13000"
};

// (1/2)||w||^2 + C * sum_i loss(margin_i) with margin = y~ * (w.x + b) and
// y~ in {-1, +1}: log(1 + exp(-margin)) for logistic, max(0, 1 - margin)
// for hinge.
double objective_value(const LinearModel& model, const SparseMatrix& x,
                       const std::vector<int>& y);

// Analytic (sub)gradient of objective_value at the model's parameters. The
// hinge subgradient uses the zero branch at margin == 1.
void objective_gradient(const LinearModel& model, const SparseMatrix& x,
                        const std::vector<int>& y, std::vector<double>& grad_w, double& grad_b);

// Full-batch descent from w = 0, b = 0. The step size starts at
// config.learning_rate and is halved whenever a step would increase the
// objective, so the final objective never exceeds the initial one.
LinearModel train_linear(const SparseMatrix& x, const std::vector<int>& y,
                         const LinearModelConfig& config);

double decision_score(const LinearModel& model, const SparseRow& x);
double decision_score(const LinearModel& model, std::span<const double> x);

// score >= 0 predicts 1 (ties to 1), else 0 — for both losses.
int predict_label(const LinearModel& model, const SparseRow& x);
int predict_label(const LinearModel& model, std::span<const double> x);

}  // namespace cbd
