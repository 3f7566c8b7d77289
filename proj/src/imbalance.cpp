#include "cbd/imbalance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cbd/rng.hpp"

namespace cbd {

int minority_label(const std::vector<int>& y) {
    std::size_t ones = 0;
    for (int label : y) ones += static_cast<std::size_t>(label);
    const std::size_t zeros = y.size() - ones;
    if (ones == 0 || zeros == 0)
        throw std::invalid_argument("smote: both classes must be present");
    return ones <= zeros ? 1 : 0;
}

std::vector<std::vector<std::size_t>> nearest_minority_neighbors(const Matrix& x_minority,
                                                                 std::size_t k) {
    const std::size_t n = x_minority.rows();
    if (n < 2) throw std::invalid_argument("smote: insufficient minority samples");
    const std::size_t k_eff = std::min(k, n - 1);

    std::vector<std::vector<std::size_t>> neighbors(n);
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        const auto row_i = x_minority.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto row_j = x_minority.row(j);
            double d2 = 0.0;
            for (std::size_t c = 0; c < x_minority.cols(); ++c) {
                const double diff = row_i[c] - row_j[c];
                d2 += diff * diff;
            }
            dist.emplace_back(d2, j);
        }
        std::sort(dist.begin(), dist.end());  // ties resolve to the lower index
        neighbors[i].reserve(k_eff);
        for (std::size_t m = 0; m < k_eff; ++m) neighbors[i].push_back(dist[m].second);
    }
    return neighbors;
}

SmotePlan smote_plan(const Matrix& x_minority, std::size_t majority_count,
                     const SmoteConfig& config) {
    if (config.k_neighbors < 1) throw std::invalid_argument("smote: k_neighbors must be >= 1");
    if (!(config.target_ratio > 0.0 && config.target_ratio <= 1.0))
        throw std::invalid_argument("smote: target_ratio must be in (0, 1]");

    const std::size_t n_min = x_minority.rows();
    SmotePlan plan;
    plan.effective_k = std::min(config.k_neighbors, n_min < 2 ? std::size_t{0} : n_min - 1);

    const auto wanted = static_cast<std::size_t>(
        std::ceil(config.target_ratio * static_cast<double>(majority_count)));
    const std::size_t count = wanted > n_min ? wanted - n_min : 0;
    if (count == 0) return plan;

    if (n_min < 2) throw std::invalid_argument("smote: insufficient minority samples");
    if (plan.effective_k < config.k_neighbors)
        plan.warnings.push_back("smote: k_neighbors capped at " +
                                std::to_string(plan.effective_k) + " (minority count " +
                                std::to_string(n_min) + ")");

    const auto neighbors = nearest_minority_neighbors(x_minority, plan.effective_k);
    Rng rng(config.seed);
    plan.blends.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        SyntheticBlend blend;
        blend.base = s % n_min;
        blend.neighbor = neighbors[blend.base][rng.uniform_index(plan.effective_k)];
        blend.interpolation = rng.uniform();
        plan.blends.push_back(blend);
    }
    return plan;
}

std::pair<Matrix, std::vector<int>> smote_oversample(const Matrix& x, const std::vector<int>& y,
                                                     const SmoteConfig& config) {
    if (x.rows() != y.size()) throw std::invalid_argument("smote: X/y length mismatch");
    const int minority = minority_label(y);

    Matrix x_min;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == minority) x_min.append_row(x.row(i));

    const std::size_t majority_count = y.size() - x_min.rows();
    if (x_min.rows() < 2)
        throw std::invalid_argument("smote: insufficient minority samples");

    const SmotePlan plan = smote_plan(x_min, majority_count, config);

    Matrix x_out = x;
    std::vector<int> y_out = y;
    std::vector<double> synthetic(x.cols());
    for (const auto& blend : plan.blends) {
        const auto base = x_min.row(blend.base);
        const auto nb = x_min.row(blend.neighbor);
        for (std::size_t c = 0; c < x.cols(); ++c)
            synthetic[c] = base[c] + blend.interpolation * (nb[c] - base[c]);
        x_out.append_row(synthetic);
        y_out.push_back(minority);
    }
    return {std::move(x_out), std::move(y_out)};
}

void append_smote_sparse(SparseMatrix& x, std::vector<int>& y, const SmoteConfig& config) {
    if (x.row_count() != y.size()) throw std::invalid_argument("smote: X/y length mismatch");
    const int minority = minority_label(y);

    Matrix x_min(0, x.cols);
    std::vector<double> dense(x.cols, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != minority) continue;
        std::fill(dense.begin(), dense.end(), 0.0);
        for (const auto& [c, v] : x.rows[i]) dense[c] = v;
        x_min.append_row(dense);
    }

    const std::size_t majority_count = y.size() - x_min.rows();
    if (x_min.rows() < 2)
        throw std::invalid_argument("smote: insufficient minority samples");

    const SmotePlan plan = smote_plan(x_min, majority_count, config);
    for (const auto& blend : plan.blends) {
        const auto base = x_min.row(blend.base);
        const auto nb = x_min.row(blend.neighbor);
        SparseRow row;
        for (std::uint32_t c = 0; c < x.cols; ++c) {
            const double value = base[c] + blend.interpolation * (nb[c] - base[c]);
            if (value != 0.0) row.emplace_back(c, value);
        }
        x.rows.push_back(std::move(row));
        y.push_back(minority);
    }
}

}  // namespace cbd
