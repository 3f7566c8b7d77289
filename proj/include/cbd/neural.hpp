#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cbd/autodiff.hpp"
#include "cbd/imbalance.hpp"
#include "cbd/matrix.hpp"
#include "cbd/rng.hpp"
#include "cbd/vectorize.hpp"

namespace cbd {

struct TextCnnConfig {
    std::size_t sequence_length = 300;
    std::size_t embedding_dim = 300;
    std::size_t kernel_width = 5;
    std::size_t num_filters = 128;
    double dropout_rate = 0.1;
    std::size_t epochs = 5;
    std::size_t batch_size = 512;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

// conv (valid, kernel_width, num_filters) -> relu -> max-over-time ->
// dropout -> dense -> sigmoid, on frozen pretrained embeddings.
struct TextCnnModel {
    TextCnnConfig config;
    Tensor conv_filters;   // (width, dim, filters)
    Tensor conv_bias;      // (1, filters)
    Tensor dense_weights;  // (filters, 1)
    Tensor dense_bias;     // (1, 1)

    std::vector<Tensor*> parameters() {
        return {&conv_filters, &conv_bias, &dense_weights, &dense_bias};
    }
    std::vector<const Tensor*> parameters() const {
        return {&conv_filters, &conv_bias, &dense_weights, &dense_bias};
    }
};

struct GruConfig {
    std::size_t sequence_length = 300;
    std::size_t embedding_dim = 300;
    std::size_t hidden_size = 128;
    double dropout_rate = 0.1;
    std::size_t epochs = 5;
    std::size_t batch_size = 512;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

// Gated recurrent unit: z and r gates, candidate state h~, update
// h <- (1-z)*h + z*h~; padded tail positions are skipped.
struct GruModel {
    GruConfig config;
    Tensor w_update, w_reset, w_candidate;  // (dim, hidden)
    Tensor u_update, u_reset, u_candidate;  // (hidden, hidden)
    Tensor b_update, b_reset, b_candidate;  // (1, hidden)
    Tensor dense_weights;                   // (hidden, 1)
    Tensor dense_bias;                      // (1, 1)

    std::vector<Tensor*> parameters() {
        return {&w_update, &w_reset, &w_candidate, &u_update, &u_reset, &u_candidate,
                &b_update, &b_reset, &b_candidate, &dense_weights, &dense_bias};
    }
    std::vector<const Tensor*> parameters() const {
        return {&w_update, &w_reset, &w_candidate, &u_update, &u_reset, &u_candidate,
                &b_update, &b_reset, &b_candidate, &dense_weights, &dense_bias};
    }
};

// Glorot-uniform weights, zero biases, seeded draw order fixed.
TextCnnModel init_textcnn(const TextCnnConfig& config);
GruModel init_gru(const GruConfig& config);

// Probability of label 1 for one embedded sequence (sequence_length x dim).
// Dropout only fires in train mode, drawing its mask from dropout_rng.
double textcnn_forward(const Matrix& embedded, const TextCnnModel& model,
                       bool train_mode = false, Rng* dropout_rng = nullptr);
double gru_forward(const Matrix& embedded, std::size_t valid_length, const GruModel& model,
                   bool train_mode = false, Rng* dropout_rng = nullptr);

// BCE loss for one example; when grads is non-null it receives d loss /
// d parameter aligned with Model::parameters(). Shared by training and by
// gradient verification.
double textcnn_loss(const Matrix& embedded, double target, const TextCnnModel& model,
                    std::vector<Tensor>* grads, bool train_mode = false,
                    Rng* dropout_rng = nullptr);
double gru_loss(const Matrix& embedded, std::size_t valid_length, double target,
                const GruModel& model, std::vector<Tensor>* grads, bool train_mode = false,
                Rng* dropout_rng = nullptr);

struct NeuralTrainData {
    std::vector<SequenceEncoding> encodings;
    std::vector<int> labels;
    const Matrix* embedding_matrix = nullptr;  // (V + 2) x dim, rows 0/1 zero
};

// Minibatch Adam (beta1 0.9, beta2 0.999, eps 1e-8) on mean-BCE batches,
// seeded shuffling per epoch, exactly config.epochs epochs. With smote set,
// synthetic minority examples are interpolated in embedding space from the
// training rows and fed to the network pre-embedded.
TextCnnModel train_textcnn(const NeuralTrainData& data, const TextCnnConfig& config,
                           const std::optional<SmoteConfig>& smote = std::nullopt);
GruModel train_gru(const NeuralTrainData& data, const GruConfig& config,
                   const std::optional<SmoteConfig>& smote = std::nullopt);

}  // namespace cbd
