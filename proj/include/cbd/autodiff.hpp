#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cbd/matrix.hpp"
#include "cbd/rng.hpp"

namespace cbd {

// Dense row-major tensor, double precision. Rank 2 covers everything here
// except convolution kernels (width x dim x filters).
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        data.assign(n, 0.0);
    }

    static Tensor from_matrix(const Matrix& m) {
        Tensor t({m.rows(), m.cols()});
        t.data = m.data();
        return t;
    }

    std::size_t size() const { return data.size(); }
    std::size_t dim(std::size_t i) const { return shape[i]; }

    double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * shape[1] + j) * shape[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * shape[1] + j) * shape[2] + k];
    }
};

// Reverse-mode tape over Tensor values. Nodes are created in evaluation
// order, which is already topological, so backward() is a single reverse
// sweep with additive gradient accumulation.
class Tape {
public:
    using ValueId = std::size_t;

    ValueId leaf(Tensor value);

    const Tensor& value(ValueId id) const { return nodes_[id].value; }
    const Tensor& grad(ValueId id) const { return nodes_[id].grad; }
    double scalar(ValueId id) const { return nodes_[id].value.data[0]; }

    ValueId add(ValueId a, ValueId b);       // equal shapes, or b a row vector
    ValueId sub(ValueId a, ValueId b);       // equal shapes
    ValueId hadamard(ValueId a, ValueId b);  // equal shapes
    ValueId matmul(ValueId a, ValueId b);    // (m,k) x (k,n)
    ValueId sigmoid(ValueId a);
    ValueId tanh(ValueId a);
    ValueId relu(ValueId a);
    ValueId one_minus(ValueId a);  // 1 - x elementwise

    // input (L, D), kernels (w, D, F) -> (L - w + 1, F), valid windows only.
    ValueId conv1d_valid(ValueId input, ValueId kernels);

    // (T, F) -> (1, F); gradient routes to the first maximum per column.
    ValueId max_over_time(ValueId a);

    // Inverted dropout: kept entries scale by 1/(1 - rate). Train mode only;
    // evaluation should simply not insert the op.
    ValueId dropout(ValueId a, double rate, Rng& rng);

    // prob (1,1) in (0,1) -> scalar loss -(t ln p + (1-t) ln(1-p)).
    ValueId bce_loss(ValueId prob, double target);

    void backward(ValueId loss);

    // Drops all nodes but keeps buffer capacity for the next graph.
    void reset() { nodes_.clear(); }

private:
    enum class Op {
        kLeaf, kAdd, kAddRow, kSub, kHadamard, kMatmul, kSigmoid, kTanh, kRelu,
        kOneMinus, kConv1d, kMaxOverTime, kDropout, kBce
    };

    struct Node {
        Op op = Op::kLeaf;
        ValueId a = 0;
        ValueId b = 0;
        Tensor value;
        Tensor grad;
        std::vector<double> aux;  // masks, argmax positions, bce target
    };

    ValueId push(Node node);
    std::vector<Node> nodes_;
};

// Analytic-vs-central-difference gradient verification. loss_and_grad must
// return the loss at `params` and, when `grads` is non-null, fill one
// gradient tensor per parameter. Probes sample random coordinates; the
// relative error denominator is floored at 1e-3 so near-zero gradients are
// compared absolutely. Returns the max relative error over all probes.
double gradient_check(
    const std::vector<Tensor>& params,
    const std::function<double(const std::vector<Tensor>&, std::vector<Tensor>*)>& loss_and_grad,
    std::size_t probe_count, Rng& rng, double step = 1e-6);

}  // namespace cbd
