#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prodlex/desc.hpp"
#include "prodlex/error.hpp"

namespace prodlex::desc {

void DescClassifier::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write model file: " + path);
    out << to_json_string();
    if (!out) throw Error("write failed: " + path);
}

std::unique_ptr<DescClassifier> make_desc_classifier(std::string_view type, std::uint64_t seed) {
    if (type == "nb") return std::make_unique<NaiveBayesClassifier>(seed);
    if (type == "svm") return std::make_unique<LinearSvmClassifier>(seed);
    if (type == "pv") return std::make_unique<ParagraphVectorClassifier>(seed);
    if (type == "rnn" || type == "rnn-desc") return std::make_unique<RnnDescClassifier>(seed);
    throw Error("unknown description classifier type: \"" + std::string(type) + "\"");
}

std::unique_ptr<DescClassifier> desc_classifier_from_json_string(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("model_type")) {
        throw Error("not a model document");
    }
    const std::string type = j.at("model_type").get<std::string>();
    if (type == "nb") {
        return std::make_unique<NaiveBayesClassifier>(NaiveBayesClassifier::from_json_string(json_text));
    }
    if (type == "svm") {
        return std::make_unique<LinearSvmClassifier>(LinearSvmClassifier::from_json_string(json_text));
    }
    if (type == "pv") {
        return std::make_unique<ParagraphVectorClassifier>(
            ParagraphVectorClassifier::from_json_string(json_text));
    }
    if (type == "rnn-desc") {
        return std::make_unique<RnnDescClassifier>(RnnDescClassifier::from_json_string(json_text));
    }
    throw Error("unknown description classifier type: \"" + type + "\"");
}

std::unique_ptr<DescClassifier> load_desc_classifier(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return desc_classifier_from_json_string(buf.str());
}

std::vector<SplitPoint> split_scan(const DescClassifier& classifier, std::string_view raw_text,
                                   int window, int stride, double threshold) {
    if (stride < 1 || window <= stride) {
        throw Error("split_scan: require window > stride >= 1");
    }
    auto tokens = text::tokenize_surfaces(text::normalize(raw_text));
    const int n = static_cast<int>(tokens.size());
    std::vector<SplitPoint> splits;
    if (n < window) return splits;

    auto window_text = [&](int start) {
        std::string joined;
        for (int k = start; k < start + window; ++k) {
            if (k > start) joined.push_back(' ');
            joined += tokens[k];
        }
        return joined;
    };

    std::vector<DescPrediction> preds;
    std::vector<int> starts;
    for (int start = 0; start + window <= n; start += stride) {
        preds.push_back(classifier.predict(window_text(start)));
        starts.push_back(start);
    }

    for (std::size_t i = 0; i + 1 < preds.size(); ++i) {
        const auto& left = preds[i];
        const auto& right = preds[i + 1];
        if (left.label == right.label) continue;
        if (left.confidence < threshold || right.confidence < threshold) continue;
        const int center_left = starts[i] + window / 2;
        const int center_right = starts[i + 1] + window / 2;
        const int midpoint = (center_left + center_right) / 2;
        if (!splits.empty() && midpoint - splits.back().token_index < window) continue;
        splits.push_back(SplitPoint{midpoint, left.label, right.label, left.confidence,
                                    right.confidence});
    }
    return splits;
}

}  // namespace prodlex::desc
