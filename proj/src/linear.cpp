#include "cbd/linear.hpp"

#include <cmath>
#include <stdexcept>

namespace cbd {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double signed_label(int y) { return y == 1 ? 1.0 : -1.0; }

void check_dims(const LinearModel& model, const SparseMatrix& x, const std::vector<int>& y) {
    if (x.row_count() != y.size())
        throw std::invalid_argument("linear: X/y length mismatch");
    if (x.cols != model.weights.size())
        throw std::invalid_argument("linear: feature dimension mismatch");
}

}  // namespace

double objective_value(const LinearModel& model, const SparseMatrix& x,
                       const std::vector<int>& y) {
    check_dims(model, x, y);
    double value = 0.0;
    for (double w : model.weights) value += w * w;
    value *= 0.5;

    double data_term = 0.0;
    for (std::size_t i = 0; i < x.row_count(); ++i) {
        const double margin =
            signed_label(y[i]) * (sparse_dot(x.rows[i], model.weights) + model.bias);
        if (model.config.loss == LinearLoss::kLogistic)
            data_term += softplus(-margin);
        else
            data_term += std::max(0.0, 1.0 - margin);
    }
    return value + model.config.C * data_term;
}

void objective_gradient(const LinearModel& model, const SparseMatrix& x,
                        const std::vector<int>& y, std::vector<double>& grad_w, double& grad_b) {
    check_dims(model, x, y);
    grad_w.assign(model.weights.begin(), model.weights.end());  // ridge term
    grad_b = 0.0;
    for (std::size_t i = 0; i < x.row_count(); ++i) {
        const double ys = signed_label(y[i]);
        const double margin = ys * (sparse_dot(x.rows[i], model.weights) + model.bias);
        double coeff;  // d loss / d score
        if (model.config.loss == LinearLoss::kLogistic) {
            coeff = -ys / (1.0 + std::exp(margin));
        } else {
            coeff = margin < 1.0 ? -ys : 0.0;  // zero branch at the kink
        }
        if (coeff == 0.0) continue;
        const double scaled = model.config.C * coeff;
        for (const auto& [c, v] : x.rows[i]) grad_w[c] += scaled * v;
        grad_b += scaled;
    }
}

LinearModel train_linear(const SparseMatrix& x, const std::vector<int>& y,
                         const LinearModelConfig& config) {
    if (config.C <= 0.0) throw std::invalid_argument("linear: C must be positive");
    if (config.max_epochs < 1) throw std::invalid_argument("linear: max_epochs must be >= 1");
    bool has0 = false;
    bool has1 = false;
    for (int label : y) (label == 1 ? has1 : has0) = true;
    if (!has0 || !has1)
        throw std::invalid_argument("linear: training data must contain both classes");

    LinearModel model;
    model.config = config;
    model.weights.assign(x.cols, 0.0);
    model.bias = 0.0;

    double objective = objective_value(model, x, y);
    double step = config.learning_rate;
    std::vector<double> grad_w;
    double grad_b = 0.0;
    LinearModel trial = model;

    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        objective_gradient(model, x, y, grad_w, grad_b);
        double norm_sq = grad_b * grad_b;
        for (double g : grad_w) norm_sq += g * g;
        if (std::sqrt(norm_sq) < config.tolerance) break;

        bool accepted = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            for (std::size_t c = 0; c < x.cols; ++c)
                trial.weights[c] = model.weights[c] - step * grad_w[c];
            trial.bias = model.bias - step * grad_b;
            const double trial_objective = objective_value(trial, x, y);
            if (!std::isfinite(trial_objective))
                throw std::runtime_error("linear: non-finite objective at epoch " +
                                         std::to_string(epoch));
            if (trial_objective <= objective) {
                model.weights = trial.weights;
                model.bias = trial.bias;
                objective = trial_objective;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: no descent direction left
    }
    return model;
}

double decision_score(const LinearModel& model, const SparseRow& x) {
    return sparse_dot(x, model.weights) + model.bias;
}

double decision_score(const LinearModel& model, std::span<const double> x) {
    if (x.size() != model.weights.size())
        throw std::invalid_argument("linear: feature dimension mismatch");
    double score = model.bias;
    for (std::size_t c = 0; c < x.size(); ++c) score += model.weights[c] * x[c];
    return score;
}

int predict_label(const LinearModel& model, const SparseRow& x) {
    return decision_score(model, x) >= 0.0 ? 1 : 0;
}

int predict_label(const LinearModel& model, std::span<const double> x) {
    return decision_score(model, x) >= 0.0 ? 1 : 0;
}

}  // namespace cbd
