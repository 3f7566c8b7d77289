#include "cbd/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbd {

namespace {

void require(bool ok, const char* op, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(op) + ": " + what);
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

}  // namespace

Tape::ValueId Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
}

Tape::ValueId Tape::leaf(Tensor value) {
    Node n;
    n.op = Op::kLeaf;
    n.value = std::move(value);
    return push(std::move(n));
}

Tape::ValueId Tape::add(ValueId a, ValueId b) {
    const Tensor& ta = nodes_[a].value;
    const Tensor& tb = nodes_[b].value;
    Node n;
    n.a = a;
    n.b = b;
    if (same_shape(ta, tb)) {
        n.op = Op::kAdd;
        n.value = ta;
        for (std::size_t i = 0; i < tb.size(); ++i) n.value.data[i] += tb.data[i];
    } else {
        // Row broadcast: b is (1, N) added to every row of a.
        require(tb.shape.size() == 2 && tb.shape[0] == 1 && ta.shape.size() == 2 &&
                    ta.shape[1] == tb.shape[1],
                "add", "shape mismatch");
        n.op = Op::kAddRow;
        n.value = ta;
        for (std::size_t r = 0; r < ta.shape[0]; ++r)
            for (std::size_t c = 0; c < ta.shape[1]; ++c) n.value.at(r, c) += tb.data[c];
    }
    return push(std::move(n));
}

Tape::ValueId Tape::sub(ValueId a, ValueId b) {
    const Tensor& ta = nodes_[a].value;
    const Tensor& tb = nodes_[b].value;
    require(same_shape(ta, tb), "sub", "shape mismatch");
    Node n;
    n.op = Op::kSub;
    n.a = a;
    n.b = b;
    n.value = ta;
    for (std::size_t i = 0; i < tb.size(); ++i) n.value.data[i] -= tb.data[i];
    return push(std::move(n));
}

Tape::ValueId Tape::hadamard(ValueId a, ValueId b) {
    const Tensor& ta = nodes_[a].value;
    const Tensor& tb = nodes_[b].value;
    require(same_shape(ta, tb), "hadamard", "shape mismatch");
    Node n;
    n.op = Op::kHadamard;
    n.a = a;
    n.b = b;
    n.value = ta;
    for (std::size_t i = 0; i < tb.size(); ++i) n.value.data[i] *= tb.data[i];
    return push(std::move(n));
}

Tape::ValueId Tape::matmul(ValueId a, ValueId b) {
    const Tensor& ta = nodes_[a].value;
    const Tensor& tb = nodes_[b].value;
    require(ta.shape.size() == 2 && tb.shape.size() == 2, "matmul", "rank-2 operands required");
    require(ta.shape[1] == tb.shape[0], "matmul", "inner dimension mismatch");
    Node n;
    n.op = Op::kMatmul;
    n.a = a;
    n.b = b;
    n.value = Tensor({ta.shape[0], tb.shape[1]});
    for (std::size_t i = 0; i < ta.shape[0]; ++i)
        for (std::size_t k = 0; k < ta.shape[1]; ++k) {
            const double aik = ta.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < tb.shape[1]; ++j)
                n.value.at(i, j) += aik * tb.at(k, j);
        }
    return push(std::move(n));
}

Tape::ValueId Tape::sigmoid(ValueId a) {
    Node n;
    n.op = Op::kSigmoid;
    n.a = a;
    n.value = nodes_[a].value;
    for (double& v : n.value.data) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(n));
}

Tape::ValueId Tape::tanh(ValueId a) {
    Node n;
    n.op = Op::kTanh;
    n.a = a;
    n.value = nodes_[a].value;
    for (double& v : n.value.data) v = std::tanh(v);
    return push(std::move(n));
}

Tape::ValueId Tape::relu(ValueId a) {
    Node n;
    n.op = Op::kRelu;
    n.a = a;
    n.value = nodes_[a].value;
    for (double& v : n.value.data) v = std::max(0.0, v);
    return push(std::move(n));
}

Tape::ValueId Tape::one_minus(ValueId a) {
    Node n;
    n.op = Op::kOneMinus;
    n.a = a;
    n.value = nodes_[a].value;
    for (double& v : n.value.data) v = 1.0 - v;
    return push(std::move(n));
}

Tape::ValueId Tape::conv1d_valid(ValueId input, ValueId kernels) {
    const Tensor& in = nodes_[input].value;
    const Tensor& k = nodes_[kernels].value;
    require(in.shape.size() == 2 && k.shape.size() == 3, "conv1d", "need (L,D) input, (w,D,F) kernels");
    require(in.shape[1] == k.shape[1], "conv1d", "embedding dimension mismatch");
    require(in.shape[0] >= k.shape[0], "conv1d", "sequence shorter than kernel width");
    const std::size_t width = k.shape[0];
    const std::size_t dim = k.shape[1];
    const std::size_t filters = k.shape[2];
    const std::size_t out_len = in.shape[0] - width + 1;

    Node n;
    n.op = Op::kConv1d;
    n.a = input;
    n.b = kernels;
    n.value = Tensor({out_len, filters});
    for (std::size_t t = 0; t < out_len; ++t)
        for (std::size_t i = 0; i < width; ++i)
            for (std::size_t d = 0; d < dim; ++d) {
                const double x = in.at(t + i, d);
                if (x == 0.0) continue;
                for (std::size_t f = 0; f < filters; ++f)
                    n.value.at(t, f) += x * k.at(i, d, f);
            }
    return push(std::move(n));
}

Tape::ValueId Tape::max_over_time(ValueId a) {
    const Tensor& in = nodes_[a].value;
    require(in.shape.size() == 2, "max_over_time", "rank-2 input required");
    require(in.shape[0] >= 1, "max_over_time", "empty time axis");
    Node n;
    n.op = Op::kMaxOverTime;
    n.a = a;
    n.value = Tensor({std::size_t{1}, in.shape[1]});
    n.aux.resize(in.shape[1]);
    for (std::size_t f = 0; f < in.shape[1]; ++f) {
        std::size_t best = 0;
        double best_value = in.at(0, f);
        for (std::size_t t = 1; t < in.shape[0]; ++t)
            if (in.at(t, f) > best_value) {
                best_value = in.at(t, f);
                best = t;
            }
        n.value.at(0, f) = best_value;
        n.aux[f] = static_cast<double>(best);
    }
    return push(std::move(n));
}

Tape::ValueId Tape::dropout(ValueId a, double rate, Rng& rng) {
    require(rate >= 0.0 && rate < 1.0, "dropout", "rate must be in [0,1)");
    const Tensor& in = nodes_[a].value;
    Node n;
    n.op = Op::kDropout;
    n.a = a;
    n.value = in;
    n.aux.resize(in.size());
    const double keep_scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < in.size(); ++i) {
        n.aux[i] = rng.uniform() < rate ? 0.0 : keep_scale;
        n.value.data[i] *= n.aux[i];
    }
    return push(std::move(n));
}

Tape::ValueId Tape::bce_loss(ValueId prob, double target) {
    const Tensor& in = nodes_[prob].value;
    require(in.size() == 1, "bce_loss", "scalar probability required");
    constexpr double kEps = 1e-12;
    const double p = std::clamp(in.data[0], kEps, 1.0 - kEps);
    Node n;
    n.op = Op::kBce;
    n.a = prob;
    n.value = Tensor({std::size_t{1}, std::size_t{1}});
    n.value.data[0] = -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
    n.aux = {target, p};
    return push(std::move(n));
}

void Tape::backward(ValueId loss) {
    require(nodes_[loss].value.size() == 1, "backward", "loss must be scalar");
    for (auto& node : nodes_) {
        node.grad = Tensor(node.value.shape);
    }
    nodes_[loss].grad.data[0] = 1.0;

    for (std::size_t idx = nodes_.size(); idx-- > 0;) {
        Node& node = nodes_[idx];
        const Tensor& g = node.grad;
        switch (node.op) {
            case Op::kLeaf:
                break;
            case Op::kAdd: {
                Tensor& ga = nodes_[node.a].grad;
                Tensor& gb = nodes_[node.b].grad;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga.data[i] += g.data[i];
                    gb.data[i] += g.data[i];
                }
                break;
            }
            case Op::kAddRow: {
                Tensor& ga = nodes_[node.a].grad;
                Tensor& gb = nodes_[node.b].grad;
                const std::size_t cols = node.value.shape[1];
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga.data[i] += g.data[i];
                    gb.data[i % cols] += g.data[i];
                }
                break;
            }
            case Op::kSub: {
                Tensor& ga = nodes_[node.a].grad;
                Tensor& gb = nodes_[node.b].grad;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga.data[i] += g.data[i];
                    gb.data[i] -= g.data[i];
                }
                break;
            }
            case Op::kHadamard: {
                Tensor& ga = nodes_[node.a].grad;
                Tensor& gb = nodes_[node.b].grad;
                const Tensor& va = nodes_[node.a].value;
                const Tensor& vb = nodes_[node.b].value;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga.data[i] += g.data[i] * vb.data[i];
                    gb.data[i] += g.data[i] * va.data[i];
                }
                break;
            }
            case Op::kMatmul: {
                Tensor& ga = nodes_[node.a].grad;
                Tensor& gb = nodes_[node.b].grad;
                const Tensor& va = nodes_[node.a].value;
                const Tensor& vb = nodes_[node.b].value;
                const std::size_t m = va.shape[0];
                const std::size_t kk = va.shape[1];
                const std::size_t nn = vb.shape[1];
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < nn; ++j) {
                        const double gij = g.at(i, j);
                        if (gij == 0.0) continue;
                        for (std::size_t k2 = 0; k2 < kk; ++k2) {
                            ga.at(i, k2) += gij * vb.at(k2, j);
                            gb.at(k2, j) += gij * va.at(i, k2);
                        }
                    }
                break;
            }
            case Op::kSigmoid: {
                Tensor& ga = nodes_[node.a].grad;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double s = node.value.data[i];
                    ga.data[i] += g.data[i] * s * (1.0 - s);
                }
                break;
            }
            case Op::kTanh: {
                Tensor& ga = nodes_[node.a].grad;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double th = node.value.data[i];
                    ga.data[i] += g.data[i] * (1.0 - th * th);
                }
                break;
            }
            case Op::kRelu: {
                Tensor& ga = nodes_[node.a].grad;
                const Tensor& va = nodes_[node.a].value;
                for (std::size_t i = 0; i < g.size(); ++i)
                    if (va.data[i] > 0.0) ga.data[i] += g.data[i];
                break;
            }
            case Op::kOneMinus: {
                Tensor& ga = nodes_[node.a].grad;
                for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] -= g.data[i];
                break;
            }
            case Op::kConv1d: {
                Tensor& gin = nodes_[node.a].grad;
                Tensor& gk = nodes_[node.b].grad;
                const Tensor& in = nodes_[node.a].value;
                const Tensor& k = nodes_[node.b].value;
                const std::size_t width = k.shape[0];
                const std::size_t dim = k.shape[1];
                const std::size_t filters = k.shape[2];
                const std::size_t out_len = node.value.shape[0];
                for (std::size_t t = 0; t < out_len; ++t)
                    for (std::size_t i = 0; i < width; ++i)
                        for (std::size_t d = 0; d < dim; ++d) {
                            const double x = in.at(t + i, d);
                            double acc = 0.0;
                            for (std::size_t f = 0; f < filters; ++f) {
                                const double gf = g.at(t, f);
                                acc += gf * k.at(i, d, f);
                                gk.at(i, d, f) += gf * x;
                            }
                            gin.at(t + i, d) += acc;
                        }
                break;
            }
            case Op::kMaxOverTime: {
                Tensor& ga = nodes_[node.a].grad;
                const std::size_t cols = node.value.shape[1];
                for (std::size_t f = 0; f < cols; ++f) {
                    const auto t = static_cast<std::size_t>(node.aux[f]);
                    ga.at(t, f) += g.at(0, f);
                }
                break;
            }
            case Op::kDropout: {
                Tensor& ga = nodes_[node.a].grad;
                for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * node.aux[i];
                break;
            }
            case Op::kBce: {
                Tensor& ga = nodes_[node.a].grad;
                const double target = node.aux[0];
                const double p = node.aux[1];
                ga.data[0] += g.data[0] * (-target / p + (1.0 - target) / (1.0 - p));
                break;
            }
        }
    }
}

double gradient_check(
    const std::vector<Tensor>& params,
    const std::function<double(const std::vector<Tensor>&, std::vector<Tensor>*)>& loss_and_grad,
    std::size_t probe_count, Rng& rng, double step) {
    std::vector<Tensor> analytic;
    loss_and_grad(params, &analytic);
    if (analytic.size() != params.size())
        throw std::invalid_argument("gradient_check: one gradient per parameter expected");

    std::size_t total = 0;
    for (const auto& p : params) total += p.size();
    if (total == 0) return 0.0;

    std::vector<Tensor> probe = params;
    double max_rel = 0.0;
    for (std::size_t n = 0; n < probe_count; ++n) {
        std::size_t flat = rng.uniform_index(total);
        std::size_t tensor_idx = 0;
        while (flat >= probe[tensor_idx].size()) {
            flat -= probe[tensor_idx].size();
            ++tensor_idx;
        }
        double& coord = probe[tensor_idx].data[flat];
        const double saved = coord;

        coord = saved + step;
        const double plus = loss_and_grad(probe, nullptr);
        coord = saved - step;
        const double minus = loss_and_grad(probe, nullptr);
        coord = saved;

        const double numeric = (plus - minus) / (2.0 * step);
        const double a = analytic[tensor_idx].data[flat];
        const double rel = std::abs(a - numeric) /
                           std::max({std::abs(a), std::abs(numeric), 1e-3});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

}  // namespace cbd
