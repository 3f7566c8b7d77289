#include "cbd/neural.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cbd {

namespace {

void glorot_fill(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : t.data) v = rng.uniform(-limit, limit);
}

struct CnnNodes {
    Tape::ValueId filters, bias, dense_w, dense_b, prob;
};

CnnNodes build_cnn_graph(Tape& tape, const Matrix& embedded, const TextCnnModel& model,
                         bool train_mode, Rng* dropout_rng) {
    CnnNodes nodes{};
    const auto input = tape.leaf(Tensor::from_matrix(embedded));
    nodes.filters = tape.leaf(model.conv_filters);
    nodes.bias = tape.leaf(model.conv_bias);
    nodes.dense_w = tape.leaf(model.dense_weights);
    nodes.dense_b = tape.leaf(model.dense_bias);

    auto conv = tape.add(tape.conv1d_valid(input, nodes.filters), nodes.bias);
    auto pooled = tape.max_over_time(tape.relu(conv));
    if (train_mode && model.config.dropout_rate > 0.0) {
        if (!dropout_rng) throw std::invalid_argument("textcnn: train mode needs a dropout rng");
        pooled = tape.dropout(pooled, model.config.dropout_rate, *dropout_rng);
    }
    nodes.prob = tape.sigmoid(tape.add(tape.matmul(pooled, nodes.dense_w), nodes.dense_b));
    return nodes;
}

struct GruNodes {
    std::vector<Tape::ValueId> params;  // aligned with GruModel::parameters()
    Tape::ValueId prob;
};

GruNodes build_gru_graph(Tape& tape, const Matrix& embedded, std::size_t valid_length,
                         const GruModel& model, bool train_mode, Rng* dropout_rng) {
    if (embedded.cols() != model.config.embedding_dim)
        throw std::invalid_argument("gru: embedding dimension mismatch");
    GruNodes nodes{};
    for (const Tensor* p : model.parameters()) nodes.params.push_back(tape.leaf(*p));
    const auto wz = nodes.params[0], wr = nodes.params[1], wh = nodes.params[2];
    const auto uz = nodes.params[3], ur = nodes.params[4], uh = nodes.params[5];
    const auto bz = nodes.params[6], br = nodes.params[7], bh = nodes.params[8];
    const auto dense_w = nodes.params[9], dense_b = nodes.params[10];

    auto h = tape.leaf(Tensor({std::size_t{1}, model.config.hidden_size}));
    const std::size_t steps = std::min(valid_length, embedded.rows());
    for (std::size_t t = 0; t < steps; ++t) {
        Tensor xt({std::size_t{1}, embedded.cols()});
        for (std::size_t d = 0; d < embedded.cols(); ++d) xt.at(0, d) = embedded(t, d);
        const auto x = tape.leaf(std::move(xt));

        auto z = tape.sigmoid(tape.add(tape.add(tape.matmul(x, wz), tape.matmul(h, uz)), bz));
        auto r = tape.sigmoid(tape.add(tape.add(tape.matmul(x, wr), tape.matmul(h, ur)), br));
        auto candidate = tape.tanh(
            tape.add(tape.add(tape.matmul(x, wh), tape.matmul(tape.hadamard(r, h), uh)), bh));
        h = tape.add(tape.hadamard(tape.one_minus(z), h), tape.hadamard(z, candidate));
    }

    auto final_state = h;
    if (train_mode && model.config.dropout_rate > 0.0) {
        if (!dropout_rng) throw std::invalid_argument("gru: train mode needs a dropout rng");
        final_state = tape.dropout(final_state, model.config.dropout_rate, *dropout_rng);
    }
    nodes.prob = tape.sigmoid(tape.add(tape.matmul(final_state, dense_w), dense_b));
    return nodes;
}

// Shared minibatch Adam driver. materialize(i) returns the embedded input
// and valid length of training item i; run(input, len, label, grads) does
// forward+backward and accumulates parameter gradients.
class AdamOptimizer {
public:
    AdamOptimizer(std::vector<Tensor*> params, double lr) : params_(std::move(params)), lr_(lr) {
        for (Tensor* p : params_) {
            m_.emplace_back(p->shape);
            v_.emplace_back(p->shape);
        }
    }

    void step(const std::vector<Tensor>& grads) {
        ++t_;
        const double correction1 = 1.0 - std::pow(kBeta1, t_);
        const double correction2 = 1.0 - std::pow(kBeta2, t_);
        for (std::size_t p = 0; p < params_.size(); ++p) {
            Tensor& param = *params_[p];
            for (std::size_t i = 0; i < param.size(); ++i) {
                const double g = grads[p].data[i];
                m_[p].data[i] = kBeta1 * m_[p].data[i] + (1.0 - kBeta1) * g;
                v_[p].data[i] = kBeta2 * v_[p].data[i] + (1.0 - kBeta2) * g * g;
                const double m_hat = m_[p].data[i] / correction1;
                const double v_hat = v_[p].data[i] / correction2;
                param.data[i] -= lr_ * m_hat / (std::sqrt(v_hat) + kEps);
            }
        }
    }

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;
    std::vector<Tensor*> params_;
    std::vector<Tensor> m_, v_;
    double lr_;
    int t_ = 0;
};

struct TrainItem {
    bool synthetic = false;
    std::size_t index = 0;     // original example, or blend index when synthetic
    int label = 0;
    std::size_t valid_length = 0;
};

// Expands the training set with embedding-space SMOTE blends when requested.
struct PreparedSet {
    std::vector<TrainItem> items;
    Matrix minority_embedded;          // flattened (L*D) minority rows
    std::vector<SyntheticBlend> blends;
    std::vector<std::size_t> minority_lengths;
};

PreparedSet prepare_items(const NeuralTrainData& data, std::size_t sequence_length,
                          std::size_t dim, const std::optional<SmoteConfig>& smote) {
    if (!data.embedding_matrix) throw std::invalid_argument("train: embedding matrix required");
    if (data.encodings.size() != data.labels.size())
        throw std::invalid_argument("train: encodings/labels length mismatch");
    bool has0 = false;
    bool has1 = false;
    for (int label : data.labels) (label == 1 ? has1 : has0) = true;
    if (!has0 || !has1) throw std::invalid_argument("train: both classes must be present");

    PreparedSet set;
    set.items.reserve(data.encodings.size());
    for (std::size_t i = 0; i < data.encodings.size(); ++i)
        set.items.push_back({false, i, data.labels[i], data.encodings[i].valid_length});

    if (!smote) return set;

    const int minority = minority_label(data.labels);
    std::size_t majority_count = 0;
    set.minority_embedded = Matrix(0, sequence_length * dim);
    for (std::size_t i = 0; i < data.encodings.size(); ++i) {
        if (data.labels[i] != minority) {
            ++majority_count;
            continue;
        }
        const Matrix embedded = embed_with_matrix(data.encodings[i], *data.embedding_matrix);
        set.minority_embedded.append_row(embedded.data());
        set.minority_lengths.push_back(data.encodings[i].valid_length);
    }
    if (set.minority_embedded.rows() < 2)
        throw std::invalid_argument("smote: insufficient minority samples");

    const SmotePlan plan = smote_plan(set.minority_embedded, majority_count, *smote);
    set.blends = plan.blends;
    for (std::size_t s = 0; s < set.blends.size(); ++s) {
        const auto& blend = set.blends[s];
        const std::size_t len =
            std::max(set.minority_lengths[blend.base], set.minority_lengths[blend.neighbor]);
        set.items.push_back({true, s, minority, len});
    }
    return set;
}

Matrix materialize(const PreparedSet& set, const NeuralTrainData& data, const TrainItem& item,
                   std::size_t sequence_length, std::size_t dim) {
    if (!item.synthetic)
        return embed_with_matrix(data.encodings[item.index], *data.embedding_matrix);
    const auto& blend = set.blends[item.index];
    const auto base = set.minority_embedded.row(blend.base);
    const auto nb = set.minority_embedded.row(blend.neighbor);
    Matrix out(sequence_length, dim);
    for (std::size_t i = 0; i < base.size(); ++i)
        out.data()[i] = base[i] + blend.interpolation * (nb[i] - base[i]);
    return out;
}

template <typename LossFn>
void run_training(const NeuralTrainData& data, std::size_t sequence_length, std::size_t dim,
                  std::size_t epochs, std::size_t batch_size, double learning_rate,
                  std::uint64_t seed, const std::optional<SmoteConfig>& smote,
                  std::vector<Tensor*> params, LossFn&& loss_fn) {
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    PreparedSet set = prepare_items(data, sequence_length, dim, smote);

    AdamOptimizer optimizer(params, learning_rate);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);  // training stream, distinct from init
    std::vector<std::size_t> order(set.items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<Tensor> grads;
    for (Tensor* p : params) grads.emplace_back(p->shape);

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(start + batch_size, order.size());
            for (auto& g : grads) std::fill(g.data.begin(), g.data.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t pos = start; pos < end; ++pos) {
                const TrainItem& item = set.items[order[pos]];
                const Matrix input = materialize(set, data, item, sequence_length, dim);
                batch_loss += loss_fn(input, item.valid_length, item.label, rng, grads);
            }
            const double count = static_cast<double>(end - start);
            batch_loss /= count;
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(start / batch_size));
            for (auto& g : grads)
                for (double& v : g.data) v /= count;
            optimizer.step(grads);
        }
    }
}

void accumulate_param_grads(const Tape& tape, const std::vector<Tape::ValueId>& param_nodes,
                            std::vector<Tensor>& grads) {
    for (std::size_t p = 0; p < param_nodes.size(); ++p) {
        const Tensor& g = tape.grad(param_nodes[p]);
        for (std::size_t i = 0; i < g.size(); ++i) grads[p].data[i] += g.data[i];
    }
}

}  // namespace

TextCnnModel init_textcnn(const TextCnnConfig& config) {
    if (config.sequence_length < config.kernel_width)
        throw std::invalid_argument("textcnn: sequence_length shorter than kernel width");
    TextCnnModel model;
    model.config = config;
    model.conv_filters = Tensor({config.kernel_width, config.embedding_dim, config.num_filters});
    model.conv_bias = Tensor({std::size_t{1}, config.num_filters});
    model.dense_weights = Tensor({config.num_filters, std::size_t{1}});
    model.dense_bias = Tensor({std::size_t{1}, std::size_t{1}});

    Rng rng(config.seed);
    glorot_fill(model.conv_filters, config.kernel_width * config.embedding_dim,
                config.num_filters, rng);
    glorot_fill(model.dense_weights, config.num_filters, 1, rng);
    return model;
}

GruModel init_gru(const GruConfig& config) {
    GruModel model;
    model.config = config;
    const std::size_t d = config.embedding_dim;
    const std::size_t h = config.hidden_size;
    for (Tensor* t : {&model.w_update, &model.w_reset, &model.w_candidate})
        *t = Tensor({d, h});
    for (Tensor* t : {&model.u_update, &model.u_reset, &model.u_candidate})
        *t = Tensor({h, h});
    for (Tensor* t : {&model.b_update, &model.b_reset, &model.b_candidate})
        *t = Tensor({std::size_t{1}, h});
    model.dense_weights = Tensor({h, std::size_t{1}});
    model.dense_bias = Tensor({std::size_t{1}, std::size_t{1}});

    Rng rng(config.seed);
    for (Tensor* t : {&model.w_update, &model.w_reset, &model.w_candidate})
        glorot_fill(*t, d, h, rng);
    for (Tensor* t : {&model.u_update, &model.u_reset, &model.u_candidate})
        glorot_fill(*t, h, h, rng);
    glorot_fill(model.dense_weights, h, 1, rng);
    return model;
}

double textcnn_forward(const Matrix& embedded, const TextCnnModel& model, bool train_mode,
                       Rng* dropout_rng) {
    Tape tape;
    return tape.scalar(build_cnn_graph(tape, embedded, model, train_mode, dropout_rng).prob);
}

double gru_forward(const Matrix& embedded, std::size_t valid_length, const GruModel& model,
                   bool train_mode, Rng* dropout_rng) {
    Tape tape;
    return tape.scalar(
        build_gru_graph(tape, embedded, valid_length, model, train_mode, dropout_rng).prob);
}

double textcnn_loss(const Matrix& embedded, double target, const TextCnnModel& model,
                    std::vector<Tensor>* grads, bool train_mode, Rng* dropout_rng) {
    Tape tape;
    const CnnNodes nodes = build_cnn_graph(tape, embedded, model, train_mode, dropout_rng);
    const auto loss = tape.bce_loss(nodes.prob, target);
    if (grads) {
        tape.backward(loss);
        grads->clear();
        for (auto id : {nodes.filters, nodes.bias, nodes.dense_w, nodes.dense_b})
            grads->push_back(tape.grad(id));
    }
    return tape.scalar(loss);
}

double gru_loss(const Matrix& embedded, std::size_t valid_length, double target,
                const GruModel& model, std::vector<Tensor>* grads, bool train_mode,
                Rng* dropout_rng) {
    Tape tape;
    const GruNodes nodes =
        build_gru_graph(tape, embedded, valid_length, model, train_mode, dropout_rng);
    const auto loss = tape.bce_loss(nodes.prob, target);
    if (grads) {
        tape.backward(loss);
        grads->clear();
        for (auto id : nodes.params) grads->push_back(tape.grad(id));
    }
    return tape.scalar(loss);
}

TextCnnModel train_textcnn(const NeuralTrainData& data, const TextCnnConfig& config,
                           const std::optional<SmoteConfig>& smote) {
    TextCnnModel model = init_textcnn(config);
    Tape tape;
    run_training(
        data, config.sequence_length, config.embedding_dim, config.epochs, config.batch_size,
        config.learning_rate, config.seed, smote, model.parameters(),
        [&](const Matrix& input, std::size_t, int label, Rng& rng, std::vector<Tensor>& grads) {
            tape.reset();
            const CnnNodes nodes = build_cnn_graph(tape, input, model, true, &rng);
            const auto loss = tape.bce_loss(nodes.prob, static_cast<double>(label));
            tape.backward(loss);
            accumulate_param_grads(tape, {nodes.filters, nodes.bias, nodes.dense_w, nodes.dense_b},
                                   grads);
            return tape.scalar(loss);
        });
    return model;
}

GruModel train_gru(const NeuralTrainData& data, const GruConfig& config,
                   const std::optional<SmoteConfig>& smote) {
    GruModel model = init_gru(config);
    Tape tape;
    run_training(
        data, config.sequence_length, config.embedding_dim, config.epochs, config.batch_size,
        config.learning_rate, config.seed, smote, model.parameters(),
        [&](const Matrix& input, std::size_t valid_length, int label, Rng& rng,
            std::vector<Tensor>& grads) {
            tape.reset();
            const GruNodes nodes = build_gru_graph(tape, input, valid_length, model, true, &rng);
            const auto loss = tape.bce_loss(nodes.prob, static_cast<double>(label));
            tape.backward(loss);
            accumulate_param_grads(tape, nodes.params, grads);
            return tape.scalar(loss);
        });
    return model;
}

}  // namespace cbd
