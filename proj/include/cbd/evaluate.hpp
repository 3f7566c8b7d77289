#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbd/corpus.hpp"
#include "cbd/imbalance.hpp"
#include "cbd/linear.hpp"
#include "cbd/neural.hpp"
#include "cbd/textprep.hpp"
#include "cbd/vectorize.hpp"

namespace cbd {

// Label 1 is the positive class.
struct ConfusionMatrix {
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tp = 0;

    std::size_t total() const { return tn + fp + fn + tp; }
};

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred);

struct EvaluationReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    double precision0 = 0.0, recall0 = 0.0, f1_0 = 0.0;
    double precision1 = 0.0, recall1 = 0.0, f1_1 = 0.0;
    double macro_f1 = 0.0;
};

// Per-class precision/recall/F1 with the 0-on-zero-denominator convention,
// accuracy, and macro F1 = (f1_0 + f1_1) / 2.
EvaluationReport classification_metrics(const ConfusionMatrix& cm);

// Arithmetic means of the per-fold fields, confusion counts included.
struct MetricMeans {
    double tn = 0.0, fp = 0.0, fn = 0.0, tp = 0.0;
    double accuracy = 0.0;
    double precision0 = 0.0, recall0 = 0.0, f1_0 = 0.0;
    double precision1 = 0.0, recall1 = 0.0, f1_1 = 0.0;
    double macro_f1 = 0.0;
};

struct CvResult {
    std::vector<EvaluationReport> per_fold;
    MetricMeans mean;
    std::vector<std::string> warnings;
};

MetricMeans mean_over_folds(const std::vector<EvaluationReport>& per_fold);

enum class FeatureKind { kTfidf, kEmbeddings };
enum class ModelKind { kLogReg, kSvm, kTextCnn, kGru };

std::string model_kind_name(ModelKind kind);
std::string model_kind_display_name(ModelKind kind);

struct PipelineSpec {
    PreprocessConfig preprocess;
    FeatureKind features = FeatureKind::kTfidf;
    ModelKind model = ModelKind::kLogReg;
    std::size_t max_features = 13000;
    LinearModelConfig linear;
    TextCnnConfig cnn;
    GruConfig gru;
    bool smote = false;
    SmoteConfig smote_config;
    const EmbeddingTable* embeddings = nullptr;  // required for neural models
};

// Stratified k-fold driver: vocabulary, TF-IDF weights, SMOTE synthesis and
// model training all happen on each fold's training split only.
CvResult cross_validate(const LabeledCorpus& corpus, const PipelineSpec& spec, int k,
                        std::uint64_t seed);

struct RunMetadata {
    std::string model;
    bool smote = false;
    int k = 0;
    std::uint64_t seed = 0;
};

// Table-IV-style text table (2-decimal percentages, half-up) followed by
// per-fold confusion grids with counts and row-normalized percentages.
std::string render_text_table(const CvResult& result, const RunMetadata& meta);
std::string render_text_table(const EvaluationReport& report, const RunMetadata& meta);

std::string render_confusion_grid(const ConfusionMatrix& cm);

// Machine-readable record: full-precision metrics and raw counts, stable key
// order, byte-identical across reruns with the same inputs.
std::string render_machine_record(const CvResult& result, const RunMetadata& meta);
std::string render_machine_record(const EvaluationReport& report, const RunMetadata& meta);

struct MachineRecord {
    std::string kind;  // "cv_result" or "evaluation"
    RunMetadata meta;
    std::optional<CvResult> cv;
    std::optional<EvaluationReport> evaluation;
};

MachineRecord parse_machine_record(const std::string& json_text);

}  // namespace cbd
