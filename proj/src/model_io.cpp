#include "cbd/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <cstring>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace cbd {

static_assert(std::endian::native == std::endian::little,
              "model artifacts assume a little-endian host");

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'C', 'B', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T read_raw(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(value));
    if (!in) throw std::runtime_error("model file: truncated");
    return value;
}

void write_tensor(std::ostream& out, const std::string& name, const Tensor& t) {
    write_raw<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_raw<std::uint8_t>(out, static_cast<std::uint8_t>(t.shape.size()));
    for (std::size_t d : t.shape) write_raw<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}

std::pair<std::string, Tensor> read_tensor(std::istream& in) {
    const auto name_len = read_raw<std::uint16_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto rank = read_raw<std::uint8_t>(in);
    std::vector<std::size_t> shape;
    for (std::uint8_t i = 0; i < rank; ++i)
        shape.push_back(static_cast<std::size_t>(read_raw<std::uint64_t>(in)));
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!in) throw std::runtime_error("model file: truncated tensor " + name);
    return {std::move(name), std::move(t)};
}

Tensor vector_tensor(const std::vector<double>& v) {
    Tensor t({v.size()});
    t.data = v;
    return t;
}

std::string feature_kind_name(FeatureKind kind) {
    return kind == FeatureKind::kTfidf ? "tfidf" : "embeddings";
}

ordered_json preprocess_to_json(const PreprocessConfig& config) {
    std::vector<std::string> stopwords(config.stopwords.begin(), config.stopwords.end());
    std::sort(stopwords.begin(), stopwords.end());
    return ordered_json{{"keep_asterisk_masking", config.keep_asterisk_masking},
                        {"lowercase", config.lowercase},
                        {"enable_stemming", config.enable_stemming},
                        {"stopwords", stopwords}};
}

PreprocessConfig preprocess_from_json(const ordered_json& j) {
    PreprocessConfig config;
    config.keep_asterisk_masking = j.at("keep_asterisk_masking").get<bool>();
    config.lowercase = j.at("lowercase").get<bool>();
    config.enable_stemming = j.at("enable_stemming").get<bool>();
    const auto words = j.at("stopwords").get<std::vector<std::string>>();
    config.stopwords = {words.begin(), words.end()};
    return config;
}

ordered_json linear_config_to_json(const LinearModelConfig& c) {
    return ordered_json{{"loss", c.loss == LinearLoss::kHinge ? "hinge" : "logistic"},
                        {"C", c.C},
                        {"seed", c.seed},
                        {"max_epochs", c.max_epochs},
                        {"learning_rate", c.learning_rate},
                        {"tolerance", c.tolerance}};
}

LinearModelConfig linear_config_from_json(const ordered_json& j) {
    LinearModelConfig c;
    c.loss = j.at("loss").get<std::string>() == "hinge" ? LinearLoss::kHinge
                                                        : LinearLoss::kLogistic;
    c.C = j.at("C").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.tolerance = j.at("tolerance").get<double>();
    return c;
}

ordered_json cnn_config_to_json(const TextCnnConfig& c) {
    return ordered_json{{"sequence_length", c.sequence_length},
                        {"embedding_dim", c.embedding_dim},
                        {"kernel_width", c.kernel_width},
                        {"num_filters", c.num_filters},
                        {"dropout_rate", c.dropout_rate},
                        {"epochs", c.epochs},
                        {"batch_size", c.batch_size},
                        {"learning_rate", c.learning_rate},
                        {"seed", c.seed}};
}

TextCnnConfig cnn_config_from_json(const ordered_json& j) {
    TextCnnConfig c;
    c.sequence_length = j.at("sequence_length").get<std::size_t>();
    c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    c.kernel_width = j.at("kernel_width").get<std::size_t>();
    c.num_filters = j.at("num_filters").get<std::size_t>();
    c.dropout_rate = j.at("dropout_rate").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

ordered_json gru_config_to_json(const GruConfig& c) {
    return ordered_json{{"sequence_length", c.sequence_length},
                        {"embedding_dim", c.embedding_dim},
                        {"hidden_size", c.hidden_size},
                        {"dropout_rate", c.dropout_rate},
                        {"epochs", c.epochs},
                        {"batch_size", c.batch_size},
                        {"learning_rate", c.learning_rate},
                        {"seed", c.seed}};
}

GruConfig gru_config_from_json(const ordered_json& j) {
    GruConfig c;
    c.sequence_length = j.at("sequence_length").get<std::size_t>();
    c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    c.hidden_size = j.at("hidden_size").get<std::size_t>();
    c.dropout_rate = j.at("dropout_rate").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

Vocabulary vocab_from_tokens(const std::vector<std::string>& tokens, std::size_t max_features) {
    Vocabulary vocab;
    vocab.max_features = max_features;
    vocab.index_to_token = tokens;
    vocab.doc_freq.assign(tokens.size(), 0);  // not persisted; unused at inference
    for (std::uint32_t i = 0; i < tokens.size(); ++i) vocab.token_to_index.emplace(tokens[i], i);
    return vocab;
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
    ordered_json header;
    header["kind"] = model_kind_name(model.model_kind);
    header["features"] = feature_kind_name(model.features);
    header["max_features"] = model.max_features;
    header["preprocess"] = preprocess_to_json(model.preprocess);

    std::map<std::string, Tensor> tensors;  // ordered by name for stable output
    if (model.model_kind == ModelKind::kLogReg || model.model_kind == ModelKind::kSvm) {
        header["vocab"] = model.tfidf.vocabulary.index_to_token;
        header["corpus_size"] = model.tfidf.corpus_size;
        header["linear"] = linear_config_to_json(model.linear.config);
        header["trained_on"] = model.linear.trained_on;
        tensors["idf"] = vector_tensor(model.tfidf.idf);
        tensors["weights"] = vector_tensor(model.linear.weights);
        tensors["bias"] = vector_tensor({model.linear.bias});
    } else {
        header["vocab"] = model.vocab.index_to_token;
        tensors["embedding_matrix"] = Tensor::from_matrix(model.embedding_matrix);
        if (model.model_kind == ModelKind::kTextCnn) {
            header["cnn"] = cnn_config_to_json(model.cnn.config);
            tensors["conv_filters"] = model.cnn.conv_filters;
            tensors["conv_bias"] = model.cnn.conv_bias;
            tensors["dense_weights"] = model.cnn.dense_weights;
            tensors["dense_bias"] = model.cnn.dense_bias;
        } else {
            header["gru"] = gru_config_to_json(model.gru.config);
            tensors["w_update"] = model.gru.w_update;
            tensors["w_reset"] = model.gru.w_reset;
            tensors["w_candidate"] = model.gru.w_candidate;
            tensors["u_update"] = model.gru.u_update;
            tensors["u_reset"] = model.gru.u_reset;
            tensors["u_candidate"] = model.gru.u_candidate;
            tensors["b_update"] = model.gru.b_update;
            tensors["b_reset"] = model.gru.b_reset;
            tensors["b_candidate"] = model.gru.b_candidate;
            tensors["dense_weights"] = model.gru.dense_weights;
            tensors["dense_bias"] = model.gru.dense_bias;
        }
    }

    const std::string tmp_path = path + ".tmp";
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write model file: " + tmp_path);
        out.write(kMagic, sizeof(kMagic));
        write_raw<std::uint32_t>(out, kVersion);
        const std::string header_text = header.dump();
        write_raw<std::uint64_t>(out, header_text.size());
        out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
        for (const auto& [name, tensor] : tensors) write_tensor(out, name, tensor);
        if (!out) throw std::runtime_error("write failure on " + tmp_path);
    }
    if (std::rename(tmp_path.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot move model into place: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);

    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error(path + ": not a model file");
    if (read_raw<std::uint32_t>(in) != kVersion)
        throw std::runtime_error(path + ": unsupported model format version");

    const auto header_len = read_raw<std::uint64_t>(in);
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw std::runtime_error(path + ": truncated header");
    const ordered_json header = ordered_json::parse(header_text);

    std::map<std::string, Tensor> tensors;
    const auto tensor_count = read_raw<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < tensor_count; ++i) tensors.insert(read_tensor(in));
    const auto tensor = [&](const char* name) -> Tensor& {
        auto it = tensors.find(name);
        if (it == tensors.end())
            throw std::runtime_error(path + ": missing tensor '" + name + "'");
        return it->second;
    };

    TrainedModel model;
    const std::string kind = header.at("kind").get<std::string>();
    model.features = header.at("features").get<std::string>() == "tfidf"
                         ? FeatureKind::kTfidf
                         : FeatureKind::kEmbeddings;
    model.max_features = header.at("max_features").get<std::size_t>();
    model.preprocess = preprocess_from_json(header.at("preprocess"));
    const auto vocab_tokens = header.at("vocab").get<std::vector<std::string>>();

    if (kind == "logreg" || kind == "svm") {
        model.model_kind = kind == "svm" ? ModelKind::kSvm : ModelKind::kLogReg;
        model.tfidf.vocabulary = vocab_from_tokens(vocab_tokens, model.max_features);
        model.tfidf.corpus_size = header.at("corpus_size").get<std::size_t>();
        model.tfidf.idf = tensor("idf").data;
        model.linear.config = linear_config_from_json(header.at("linear"));
        model.linear.trained_on = header.at("trained_on").get<std::string>();
        model.linear.weights = tensor("weights").data;
        model.linear.bias = tensor("bias").data.at(0);
        if (model.linear.weights.size() != model.tfidf.vocabulary.size())
            throw std::runtime_error(path + ": weight/vocabulary size mismatch");
    } else if (kind == "textcnn" || kind == "gru") {
        model.vocab = vocab_from_tokens(vocab_tokens, model.max_features);
        Tensor& emb = tensor("embedding_matrix");
        if (emb.shape.size() != 2 || emb.shape[0] != model.vocab.size() + 2)
            throw std::runtime_error(path + ": embedding matrix shape mismatch");
        Matrix m(emb.shape[0], emb.shape[1]);
        m.data() = emb.data;
        model.embedding_matrix = std::move(m);
        if (kind == "textcnn") {
            model.model_kind = ModelKind::kTextCnn;
            model.cnn.config = cnn_config_from_json(header.at("cnn"));
            model.cnn.conv_filters = tensor("conv_filters");
            model.cnn.conv_bias = tensor("conv_bias");
            model.cnn.dense_weights = tensor("dense_weights");
            model.cnn.dense_bias = tensor("dense_bias");
        } else {
            model.model_kind = ModelKind::kGru;
            model.gru.config = gru_config_from_json(header.at("gru"));
            model.gru.w_update = tensor("w_update");
            model.gru.w_reset = tensor("w_reset");
            model.gru.w_candidate = tensor("w_candidate");
            model.gru.u_update = tensor("u_update");
            model.gru.u_reset = tensor("u_reset");
            model.gru.u_candidate = tensor("u_candidate");
            model.gru.b_update = tensor("b_update");
            model.gru.b_reset = tensor("b_reset");
            model.gru.b_candidate = tensor("b_candidate");
            model.gru.dense_weights = tensor("dense_weights");
            model.gru.dense_bias = tensor("dense_bias");
        }
    } else {
        throw std::runtime_error(path + ": unknown model kind '" + kind + "'");
    }
    return model;
}

}  // namespace cbd
