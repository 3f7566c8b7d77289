#include "cbd/evaluate.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cbd/numeric.hpp"

namespace cbd {

using ordered_json = nlohmann::ordered_json;

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("confusion_matrix: length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1)
            ++(y_pred[i] == 1 ? cm.tp : cm.fn);
        else
            ++(y_pred[i] == 1 ? cm.fp : cm.tn);
    }
    return cm;
}

namespace {

double safe_ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1(double precision, double recall) {
    return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

}  // namespace

EvaluationReport classification_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("classification_metrics: empty matrix");
    EvaluationReport report;
    report.confusion = cm;
    report.accuracy = safe_ratio(cm.tp + cm.tn, cm.total());
    report.precision1 = safe_ratio(cm.tp, cm.tp + cm.fp);
    report.recall1 = safe_ratio(cm.tp, cm.tp + cm.fn);
    report.f1_1 = f1(report.precision1, report.recall1);
    report.precision0 = safe_ratio(cm.tn, cm.tn + cm.fn);
    report.recall0 = safe_ratio(cm.tn, cm.tn + cm.fp);
    report.f1_0 = f1(report.precision0, report.recall0);
    report.macro_f1 = 0.5 * (report.f1_0 + report.f1_1);
    return report;
}

MetricMeans mean_over_folds(const std::vector<EvaluationReport>& per_fold) {
    MetricMeans mean;
    if (per_fold.empty()) return mean;
    const double n = static_cast<double>(per_fold.size());
    for (const auto& r : per_fold) {
        mean.tn += static_cast<double>(r.confusion.tn);
        mean.fp += static_cast<double>(r.confusion.fp);
        mean.fn += static_cast<double>(r.confusion.fn);
        mean.tp += static_cast<double>(r.confusion.tp);
        mean.accuracy += r.accuracy;
        mean.precision0 += r.precision0;
        mean.recall0 += r.recall0;
        mean.f1_0 += r.f1_0;
        mean.precision1 += r.precision1;
        mean.recall1 += r.recall1;
        mean.f1_1 += r.f1_1;
        mean.macro_f1 += r.macro_f1;
    }
    for (double* field : {&mean.tn, &mean.fp, &mean.fn, &mean.tp, &mean.accuracy,
                          &mean.precision0, &mean.recall0, &mean.f1_0, &mean.precision1,
                          &mean.recall1, &mean.f1_1, &mean.macro_f1})
        *field /= n;
    return mean;
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::kLogReg: return "logreg";
        case ModelKind::kSvm: return "svm";
        case ModelKind::kTextCnn: return "textcnn";
        case ModelKind::kGru: return "gru";
    }
    return "unknown";
}

std::string model_kind_display_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::kLogReg: return "Logistic Regression";
        case ModelKind::kSvm: return "SVM";
        case ModelKind::kTextCnn: return "Text-CNN";
        case ModelKind::kGru: return "GRU";
    }
    return "unknown";
}

namespace {

bool is_neural(ModelKind kind) {
    return kind == ModelKind::kTextCnn || kind == ModelKind::kGru;
}

void validate_spec(const PipelineSpec& spec) {
    if (is_neural(spec.model)) {
        if (spec.features != FeatureKind::kEmbeddings)
            throw std::invalid_argument("pipeline: neural models require embedding features");
        if (!spec.embeddings)
            throw std::invalid_argument("pipeline: neural models require an embedding table");
        const std::size_t dim = spec.model == ModelKind::kTextCnn ? spec.cnn.embedding_dim
                                                                  : spec.gru.embedding_dim;
        if (spec.embeddings->dim != dim)
            throw std::invalid_argument("pipeline: embedding table dimension mismatch");
    } else {
        if (spec.features != FeatureKind::kTfidf)
            throw std::invalid_argument("pipeline: linear models require tfidf features");
    }
}

std::vector<int> predict_fold_linear(const PipelineSpec& spec,
                                     const std::vector<TokenSequence>& train_docs,
                                     std::vector<int> train_labels,
                                     const std::vector<TokenSequence>& test_docs,
                                     std::uint64_t fold_smote_seed) {
    const TfidfModel tfidf = fit_tfidf(train_docs, spec.max_features);
    SparseMatrix x = tfidf_transform(train_docs, tfidf);
    if (spec.smote) {
        SmoteConfig cfg = spec.smote_config;
        cfg.seed = fold_smote_seed;
        append_smote_sparse(x, train_labels, cfg);
    }
    LinearModelConfig config = spec.linear;
    config.loss = spec.model == ModelKind::kSvm ? LinearLoss::kHinge : LinearLoss::kLogistic;
    const LinearModel model = train_linear(x, train_labels, config);

    const SparseMatrix x_test = tfidf_transform(test_docs, tfidf);
    std::vector<int> pred;
    pred.reserve(x_test.row_count());
    for (const auto& row : x_test.rows) pred.push_back(predict_label(model, row));
    return pred;
}

std::vector<int> predict_fold_neural(const PipelineSpec& spec,
                                     const std::vector<TokenSequence>& train_docs,
                                     std::vector<int> train_labels,
                                     const std::vector<TokenSequence>& test_docs,
                                     std::uint64_t fold_smote_seed) {
    const std::size_t seq_len = spec.model == ModelKind::kTextCnn ? spec.cnn.sequence_length
                                                                  : spec.gru.sequence_length;
    const Vocabulary vocab = build_vocabulary(train_docs, spec.max_features);
    const Matrix embedding = embedding_matrix_for_vocab(vocab, *spec.embeddings);

    NeuralTrainData data;
    data.embedding_matrix = &embedding;
    data.labels = std::move(train_labels);
    data.encodings.reserve(train_docs.size());
    for (const auto& doc : train_docs) data.encodings.push_back(encode_sequence(doc, vocab, seq_len));

    std::optional<SmoteConfig> smote;
    if (spec.smote) {
        smote = spec.smote_config;
        smote->seed = fold_smote_seed;
    }

    std::vector<int> pred;
    pred.reserve(test_docs.size());
    if (spec.model == ModelKind::kTextCnn) {
        const TextCnnModel model = train_textcnn(data, spec.cnn, smote);
        for (const auto& doc : test_docs) {
            const auto encoding = encode_sequence(doc, vocab, seq_len);
            const double p = textcnn_forward(embed_with_matrix(encoding, embedding), model);
            pred.push_back(p >= 0.5 ? 1 : 0);
        }
    } else {
        const GruModel model = train_gru(data, spec.gru, smote);
        for (const auto& doc : test_docs) {
            const auto encoding = encode_sequence(doc, vocab, seq_len);
            const double p =
                gru_forward(embed_with_matrix(encoding, embedding), encoding.valid_length, model);
            pred.push_back(p >= 0.5 ? 1 : 0);
        }
    }
    return pred;
}

}  // namespace

CvResult cross_validate(const LabeledCorpus& corpus, const PipelineSpec& spec, int k,
                        std::uint64_t seed) {
    validate_spec(spec);

    std::vector<TokenSequence> docs;
    docs.reserve(corpus.size());
    for (const auto& comment : corpus.comments)
        docs.push_back(preprocess_pipeline(comment.text, spec.preprocess));
    const std::vector<int> labels = corpus.labels();

    const FoldPlan plan = make_stratified_folds(corpus, k, seed);
    CvResult result;
    result.warnings = plan.warnings;

    for (int fold = 0; fold < k; ++fold) {
        const auto train_idx = plan.train_indices(fold);
        const auto test_idx = plan.test_indices(fold);

        std::vector<TokenSequence> train_docs, test_docs;
        std::vector<int> train_labels, test_labels;
        train_docs.reserve(train_idx.size());
        train_labels.reserve(train_idx.size());
        for (std::size_t i : train_idx) {
            train_docs.push_back(docs[i]);
            train_labels.push_back(labels[i]);
        }
        test_docs.reserve(test_idx.size());
        test_labels.reserve(test_idx.size());
        for (std::size_t i : test_idx) {
            test_docs.push_back(docs[i]);
            test_labels.push_back(labels[i]);
        }

        // Decorrelate the synthesis stream across folds.
        const std::uint64_t fold_smote_seed =
            spec.smote_config.seed + static_cast<std::uint64_t>(fold);
        std::vector<int> pred;
        try {
            pred = is_neural(spec.model)
                       ? predict_fold_neural(spec, train_docs, train_labels, test_docs,
                                             fold_smote_seed)
                       : predict_fold_linear(spec, train_docs, train_labels, test_docs,
                                             fold_smote_seed);
        } catch (const std::exception& e) {
            throw std::runtime_error("fold " + std::to_string(fold) + ": " + e.what());
        }

        result.per_fold.push_back(classification_metrics(confusion_matrix(test_labels, pred)));
    }
    result.mean = mean_over_folds(result.per_fold);
    return result;
}

namespace {

std::string format_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", round_half_up(fraction * 100.0, 2));
    return buf;
}

void append_table_header(std::ostringstream& out) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-22s %-10s %9s %10s\n", "Model", "SMOTE", "Acc(%)",
                  "F1-sc(%)");
    out << buf;
}

void append_table_row(std::ostringstream& out, const RunMetadata& meta, double accuracy,
                      double macro_f1) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-22s %-10s %9s %10s\n", meta.model.c_str(),
                  meta.smote ? "SMOTE" : "NOT-SMOTE", format_pct(accuracy).c_str(),
                  format_pct(macro_f1).c_str());
    out << buf;
}

}  // namespace

std::string render_confusion_grid(const ConfusionMatrix& cm) {
    const auto row = [](std::size_t a, std::size_t b) {
        const std::size_t total = a + b;
        const double pa = total ? 100.0 * static_cast<double>(a) / static_cast<double>(total) : 0.0;
        const double pb = total ? 100.0 * static_cast<double>(b) / static_cast<double>(total) : 0.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%10zu (%6.2f%%) %10zu (%6.2f%%)\n", a,
                      round_half_up(pa, 2), b, round_half_up(pb, 2));
        return std::string(buf);
    };
    std::ostringstream out;
    out << "              pred 0              pred 1\n";
    out << "true 0 " << row(cm.tn, cm.fp);
    out << "true 1 " << row(cm.fn, cm.tp);
    return out.str();
}

std::string render_text_table(const CvResult& result, const RunMetadata& meta) {
    std::ostringstream out;
    append_table_header(out);
    append_table_row(out, meta, result.mean.accuracy, result.mean.macro_f1);
    out << "\nMean of " << result.per_fold.size() << " folds.\n";
    for (std::size_t f = 0; f < result.per_fold.size(); ++f) {
        const auto& r = result.per_fold[f];
        out << "\nFold " << f << ": accuracy " << format_pct(r.accuracy) << "%, macro F1 "
            << format_pct(r.macro_f1) << "%\n";
        out << render_confusion_grid(r.confusion);
    }
    for (const auto& warning : result.warnings) out << "\nwarning: " << warning << "\n";
    return out.str();
}

std::string render_text_table(const EvaluationReport& report, const RunMetadata& meta) {
    std::ostringstream out;
    append_table_header(out);
    append_table_row(out, meta, report.accuracy, report.macro_f1);
    out << "\n" << render_confusion_grid(report.confusion);
    return out.str();
}

namespace {

ordered_json report_to_json(const EvaluationReport& r) {
    return ordered_json{
        {"confusion",
         {{"tn", r.confusion.tn}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn},
          {"tp", r.confusion.tp}}},
        {"accuracy", r.accuracy},
        {"precision0", r.precision0},
        {"recall0", r.recall0},
        {"f1_0", r.f1_0},
        {"precision1", r.precision1},
        {"recall1", r.recall1},
        {"f1_1", r.f1_1},
        {"macro_f1", r.macro_f1},
    };
}

EvaluationReport report_from_json(const ordered_json& j) {
    EvaluationReport r;
    r.confusion.tn = j.at("confusion").at("tn").get<std::size_t>();
    r.confusion.fp = j.at("confusion").at("fp").get<std::size_t>();
    r.confusion.fn = j.at("confusion").at("fn").get<std::size_t>();
    r.confusion.tp = j.at("confusion").at("tp").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.precision0 = j.at("precision0").get<double>();
    r.recall0 = j.at("recall0").get<double>();
    r.f1_0 = j.at("f1_0").get<double>();
    r.precision1 = j.at("precision1").get<double>();
    r.recall1 = j.at("recall1").get<double>();
    r.f1_1 = j.at("f1_1").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    return r;
}

ordered_json means_to_json(const MetricMeans& m) {
    return ordered_json{
        {"tn", m.tn},         {"fp", m.fp},
        {"fn", m.fn},         {"tp", m.tp},
        {"accuracy", m.accuracy},
        {"precision0", m.precision0}, {"recall0", m.recall0}, {"f1_0", m.f1_0},
        {"precision1", m.precision1}, {"recall1", m.recall1}, {"f1_1", m.f1_1},
        {"macro_f1", m.macro_f1},
    };
}

MetricMeans means_from_json(const ordered_json& j) {
    MetricMeans m;
    m.tn = j.at("tn").get<double>();
    m.fp = j.at("fp").get<double>();
    m.fn = j.at("fn").get<double>();
    m.tp = j.at("tp").get<double>();
    m.accuracy = j.at("accuracy").get<double>();
    m.precision0 = j.at("precision0").get<double>();
    m.recall0 = j.at("recall0").get<double>();
    m.f1_0 = j.at("f1_0").get<double>();
    m.precision1 = j.at("precision1").get<double>();
    m.recall1 = j.at("recall1").get<double>();
    m.f1_1 = j.at("f1_1").get<double>();
    m.macro_f1 = j.at("macro_f1").get<double>();
    return m;
}

ordered_json meta_to_json(const RunMetadata& meta) {
    return ordered_json{
        {"model", meta.model}, {"smote", meta.smote}, {"k", meta.k}, {"seed", meta.seed}};
}

RunMetadata meta_from_json(const ordered_json& j) {
    RunMetadata meta;
    meta.model = j.at("model").get<std::string>();
    meta.smote = j.at("smote").get<bool>();
    meta.k = j.at("k").get<int>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    return meta;
}

}  // namespace

std::string render_machine_record(const CvResult& result, const RunMetadata& meta) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "cv_result";
    j["run"] = meta_to_json(meta);
    j["per_fold"] = ordered_json::array();
    for (std::size_t f = 0; f < result.per_fold.size(); ++f) {
        ordered_json fold = report_to_json(result.per_fold[f]);
        ordered_json entry;
        entry["fold"] = f;
        entry.update(fold);
        j["per_fold"].push_back(entry);
    }
    j["mean"] = means_to_json(result.mean);
    j["warnings"] = result.warnings;
    return j.dump(2) + "\n";
}

std::string render_machine_record(const EvaluationReport& report, const RunMetadata& meta) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "evaluation";
    j["run"] = meta_to_json(meta);
    j["result"] = report_to_json(report);
    return j.dump(2) + "\n";
}

MachineRecord parse_machine_record(const std::string& json_text) {
    const ordered_json j = ordered_json::parse(json_text);
    if (j.at("schema_version").get<int>() != 1)
        throw std::runtime_error("machine record: unsupported schema version");
    MachineRecord record;
    record.kind = j.at("kind").get<std::string>();
    record.meta = meta_from_json(j.at("run"));
    if (record.kind == "cv_result") {
        CvResult cv;
        for (const auto& entry : j.at("per_fold")) cv.per_fold.push_back(report_from_json(entry));
        cv.mean = means_from_json(j.at("mean"));
        cv.warnings = j.at("warnings").get<std::vector<std::string>>();
        record.cv = std::move(cv);
    } else if (record.kind == "evaluation") {
        record.evaluation = report_from_json(j.at("result"));
    } else {
        throw std::runtime_error("machine record: unknown kind '" + record.kind + "'");
    }
    return record;
}

}  // namespace cbd
