#include "cbd/pipeline.hpp"

#include <stdexcept>

namespace cbd {

TrainedModel train_full_corpus(const LabeledCorpus& corpus, const PipelineSpec& spec) {
    TrainedModel trained;
    trained.preprocess = spec.preprocess;
    trained.features = spec.features;
    trained.model_kind = spec.model;
    trained.max_features = spec.max_features;

    std::vector<TokenSequence> docs;
    docs.reserve(corpus.size());
    for (const auto& comment : corpus.comments)
        docs.push_back(preprocess_pipeline(comment.text, spec.preprocess));
    std::vector<int> labels = corpus.labels();

    if (spec.model == ModelKind::kLogReg || spec.model == ModelKind::kSvm) {
        if (spec.features != FeatureKind::kTfidf)
            throw std::invalid_argument("pipeline: linear models require tfidf features");
        trained.tfidf = fit_tfidf(docs, spec.max_features);
        SparseMatrix x = tfidf_transform(docs, trained.tfidf);
        if (spec.smote) append_smote_sparse(x, labels, spec.smote_config);
        LinearModelConfig config = spec.linear;
        config.loss = spec.model == ModelKind::kSvm ? LinearLoss::kHinge : LinearLoss::kLogistic;
        trained.linear = train_linear(x, labels, config);
        trained.linear.trained_on = "tfidf:V=" + std::to_string(trained.tfidf.vocabulary.size());
        return trained;
    }

    if (!spec.embeddings)
        throw std::invalid_argument("pipeline: neural models require an embedding table");
    const std::size_t seq_len = spec.model == ModelKind::kTextCnn ? spec.cnn.sequence_length
                                                                  : spec.gru.sequence_length;
    trained.vocab = build_vocabulary(docs, spec.max_features);
    trained.embedding_matrix = embedding_matrix_for_vocab(trained.vocab, *spec.embeddings);

    NeuralTrainData data;
    data.embedding_matrix = &trained.embedding_matrix;
    data.labels = std::move(labels);
    data.encodings.reserve(docs.size());
    for (const auto& doc : docs)
        data.encodings.push_back(encode_sequence(doc, trained.vocab, seq_len));

    std::optional<SmoteConfig> smote;
    if (spec.smote) smote = spec.smote_config;

    if (spec.model == ModelKind::kTextCnn)
        trained.cnn = train_textcnn(data, spec.cnn, smote);
    else
        trained.gru = train_gru(data, spec.gru, smote);
    return trained;
}

Prediction predict_text(const TrainedModel& model, const std::string& text) {
    Prediction prediction;
    const TokenSequence tokens = preprocess_pipeline(text, model.preprocess);
    prediction.empty_after_preprocess = tokens.empty();

    switch (model.model_kind) {
        case ModelKind::kLogReg:
        case ModelKind::kSvm: {
            const SparseMatrix x = tfidf_transform({tokens}, model.tfidf);
            prediction.score = decision_score(model.linear, x.rows[0]);
            prediction.label = prediction.score >= 0.0 ? 1 : 0;
            break;
        }
        case ModelKind::kTextCnn: {
            const auto encoding =
                encode_sequence(tokens, model.vocab, model.cnn.config.sequence_length);
            prediction.score =
                textcnn_forward(embed_with_matrix(encoding, model.embedding_matrix), model.cnn);
            prediction.label = prediction.score >= 0.5 ? 1 : 0;
            break;
        }
        case ModelKind::kGru: {
            const auto encoding =
                encode_sequence(tokens, model.vocab, model.gru.config.sequence_length);
            prediction.score = gru_forward(embed_with_matrix(encoding, model.embedding_matrix),
                                           encoding.valid_length, model.gru);
            prediction.label = prediction.score >= 0.5 ? 1 : 0;
            break;
        }
    }
    return prediction;
}

}  // namespace cbd
