#pragma once

#include <string>

#include "cbd/evaluate.hpp"

namespace cbd {

// A trained classifier plus everything prediction needs: the preprocessing
// settings, the fitted feature space and the parameters. Persisted as one
// artifact so inference can never run with mismatched settings.
struct TrainedModel {
    PreprocessConfig preprocess;
    FeatureKind features = FeatureKind::kTfidf;
    ModelKind model_kind = ModelKind::kLogReg;
    std::size_t max_features = 13000;

    // linear path
    TfidfModel tfidf;
    LinearModel linear;

    // neural path
    Vocabulary vocab;
    Matrix embedding_matrix;  // (V + 2) x dim, rows 0/1 zero
    TextCnnModel cnn;
    GruModel gru;
};

TrainedModel train_full_corpus(const LabeledCorpus& corpus, const PipelineSpec& spec);

struct Prediction {
    int label = 0;
    double score = 0.0;  // decision score for linear models, probability for neural
    bool empty_after_preprocess = false;
};

Prediction predict_text(const TrainedModel& model, const std::string& text);

}  // namespace cbd
