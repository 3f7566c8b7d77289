#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbd/matrix.hpp"

namespace cbd {

struct SmoteConfig {
    std::size_t k_neighbors = 5;
    double target_ratio = 1.0;  // desired minority/majority ratio after synthesis
    std::uint64_t seed = 0;
};

// For each minority row, the indices of its k nearest minority rows by
// Euclidean distance (self excluded, ties to the lower row index). k is
// capped at minority_count - 1.
std::vector<std::vector<std::size_t>> nearest_minority_neighbors(const Matrix& x_minority,
                                                                 std::size_t k);

// One synthetic sample: base + interpolation * (neighbor - base), with row
// indices into the minority matrix.
struct SyntheticBlend {
    std::size_t base = 0;
    std::size_t neighbor = 0;
    double interpolation = 0.0;  // u in [0, 1)
};

// The representation-independent part of SMOTE: which pairs get blended and
// by how much. Synthesis order is round-robin over minority rows.
struct SmotePlan {
    std::size_t effective_k = 0;
    std::vector<SyntheticBlend> blends;
    std::vector<std::string> warnings;
};

SmotePlan smote_plan(const Matrix& x_minority, std::size_t majority_count,
                     const SmoteConfig& config);

// Appends synthetic minority rows after the original rows. Originals are
// copied untouched; labels of synthetics equal the minority label.
std::pair<Matrix, std::vector<int>> smote_oversample(const Matrix& x, const std::vector<int>& y,
                                                     const SmoteConfig& config);

// Sparse-feature variant used by the TF-IDF pipeline: neighbor search and
// interpolation run on the densified minority block only.
void append_smote_sparse(SparseMatrix& x, std::vector<int>& y, const SmoteConfig& config);

// Label with the smaller count; ties go to label 1. Throws if single-class.
int minority_label(const std::vector<int>& y);

}  // namespace cbd
