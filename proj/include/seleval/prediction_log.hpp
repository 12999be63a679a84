#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace seleval {

// One logged prediction: the model's confidence (maximum softmax
// probability) and whether the answer was correct. sample_id is opaque
// provenance and never enters any metric.
struct PredictionRecord {
    std::string sample_id;  // empty = absent
    std::string model_id;
    std::string dataset_id;
    double maxprob = 0.0;  // in (0, 1]
    bool correct = false;

    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

// All predictions of one model on one dataset, in input order.
struct PredictionLog {
    std::string model_id;
    std::string dataset_id;
    std::vector<PredictionRecord> records;  // non-empty; ids match the log's
};

enum class LogFormat { csv, jsonl };

// Parses a prediction log stream and groups records into one PredictionLog
// per (model, dataset), in order of first appearance. Input order is kept
// within each group.
//
// CSV: header `model,dataset,maxprob,correct[,sample_id]` required;
// `correct` accepts 0/1/true/false. JSONL: one object per line with keys
// `model`, `dataset`, `maxprob` (number), `correct` (bool), optional
// `sample_id` (string).
//
// Throws ValidationError naming the offending line for malformed rows,
// maxprob outside (0,1], missing columns, or empty input.
std::vector<PredictionLog> parse_log(std::istream& in, LogFormat format);

// File wrapper; format inferred from the extension (.jsonl vs anything
// else) unless given. Throws IoError if the file cannot be opened.
std::vector<PredictionLog> parse_log_file(const std::filesystem::path& path,
                                          std::optional<LogFormat> format = std::nullopt);

// Writes the standard CSV form. maxprob is printed with 17 significant
// digits so parse(write(parse(x))) reproduces records bit-exactly.
void write_log_csv(const PredictionLog& log, std::ostream& out);

// An IID/OOD log pair for one model.
struct ValidatedPair {
    PredictionLog iid;
    PredictionLog ood;
};

// Confirms both logs come from the same model on different datasets.
ValidatedPair validate_pair(PredictionLog iid, PredictionLog ood);

}  // namespace seleval
