#include "seleval/prediction_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

#include <json.hpp>

#include "seleval/errors.hpp"
#include "numfmt.hpp"

namespace seleval {

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& why) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + why);
}

double parse_maxprob(const std::string& text, std::size_t line_no) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        fail_line(line_no, "maxprob is not a number: '" + text + "'");
    }
    if (!std::isfinite(value) || value <= 0.0 || value > 1.0) {
        fail_line(line_no, "maxprob " + text + " outside (0, 1]");
    }
    return value;
}

bool parse_correct(const std::string& text, std::size_t line_no) {
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    fail_line(line_no, "correct must be one of 0/1/true/false, got '" + text + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

// Reads one line, stripping a trailing '\r' so CRLF logs parse too.
bool get_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

void check_ids(const PredictionRecord& rec, std::size_t line_no) {
    if (rec.model_id.empty()) fail_line(line_no, "empty model id");
    if (rec.dataset_id.empty()) fail_line(line_no, "empty dataset id");
}

std::vector<PredictionRecord> parse_csv_records(std::istream& in) {
    std::string line;
    if (!get_line(in, line)) throw ValidationError("empty input: no header line");

    const auto header = split_csv(line);
    bool with_sample_id = false;
    if (header == std::vector<std::string>{"model", "dataset", "maxprob", "correct"}) {
        with_sample_id = false;
    } else if (header ==
               std::vector<std::string>{"model", "dataset", "maxprob", "correct", "sample_id"}) {
        with_sample_id = true;
    } else {
        throw ValidationError(
            "line 1: expected header 'model,dataset,maxprob,correct[,sample_id]', got '" + line +
            "'");
    }
    const std::size_t n_cols = with_sample_id ? 5 : 4;

    std::vector<PredictionRecord> records;
    std::size_t line_no = 1;
    while (get_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != n_cols) {
            fail_line(line_no, "expected " + std::to_string(n_cols) + " fields, got " +
                                   std::to_string(fields.size()));
        }
        PredictionRecord rec;
        rec.model_id = fields[0];
        rec.dataset_id = fields[1];
        rec.maxprob = parse_maxprob(fields[2], line_no);
        rec.correct = parse_correct(fields[3], line_no);
        if (with_sample_id) rec.sample_id = fields[4];
        check_ids(rec, line_no);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PredictionRecord> parse_jsonl_records(std::istream& in) {
    std::vector<PredictionRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (get_line(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail_line(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) fail_line(line_no, "expected a JSON object");
        for (const char* key : {"model", "dataset", "maxprob", "correct"}) {
            if (!obj.contains(key)) fail_line(line_no, std::string("missing key '") + key + "'");
        }
        if (!obj["model"].is_string() || !obj["dataset"].is_string()) {
            fail_line(line_no, "model/dataset must be strings");
        }
        if (!obj["maxprob"].is_number()) fail_line(line_no, "maxprob must be a number");
        if (!obj["correct"].is_boolean()) fail_line(line_no, "correct must be a boolean");

        PredictionRecord rec;
        rec.model_id = obj["model"].get<std::string>();
        rec.dataset_id = obj["dataset"].get<std::string>();
        rec.maxprob = obj["maxprob"].get<double>();
        rec.correct = obj["correct"].get<bool>();
        if (obj.contains("sample_id")) {
            if (!obj["sample_id"].is_string()) fail_line(line_no, "sample_id must be a string");
            rec.sample_id = obj["sample_id"].get<std::string>();
        }
        if (!std::isfinite(rec.maxprob) || rec.maxprob <= 0.0 || rec.maxprob > 1.0) {
            fail_line(line_no, "maxprob " + detail::exact(rec.maxprob) + " outside (0, 1]");
        }
        check_ids(rec, line_no);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

std::vector<PredictionLog> parse_log(std::istream& in, LogFormat format) {
    auto records =
        format == LogFormat::csv ? parse_csv_records(in) : parse_jsonl_records(in);
    if (records.empty()) throw ValidationError("empty input: no prediction records");

    // Group by (model, dataset), logs ordered by first appearance.
    std::vector<PredictionLog> logs;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (auto& rec : records) {
        auto key = std::make_pair(rec.model_id, rec.dataset_id);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(std::move(key), logs.size()).first;
            logs.push_back(PredictionLog{rec.model_id, rec.dataset_id, {}});
        }
        logs[it->second].records.push_back(std::move(rec));
    }
    return logs;
}

std::vector<PredictionLog> parse_log_file(const std::filesystem::path& path,
                                          std::optional<LogFormat> format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const LogFormat fmt =
        format.value_or(path.extension() == ".jsonl" ? LogFormat::jsonl : LogFormat::csv);
    try {
        return parse_log(in, fmt);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_log_csv(const PredictionLog& log, std::ostream& out) {
    const bool with_sample_id =
        std::any_of(log.records.begin(), log.records.end(),
                    [](const PredictionRecord& r) { return !r.sample_id.empty(); });
    out << "model,dataset,maxprob,correct";
    if (with_sample_id) out << ",sample_id";
    out << '\n';
    for (const auto& rec : log.records) {
        out << rec.model_id << ',' << rec.dataset_id << ',' << detail::exact(rec.maxprob) << ','
            << (rec.correct ? '1' : '0');
        if (with_sample_id) out << ',' << rec.sample_id;
        out << '\n';
    }
}

ValidatedPair validate_pair(PredictionLog iid, PredictionLog ood) {
    if (iid.records.empty() || ood.records.empty()) {
        throw ValidationError("pair validation: empty log");
    }
    if (iid.model_id != ood.model_id) {
        throw ValidationError("pair validation: model mismatch ('" + iid.model_id + "' vs '" +
                              ood.model_id + "')");
    }
    if (iid.dataset_id == ood.dataset_id) {
        throw ValidationError("pair validation: IID and OOD logs share dataset '" +
                              iid.dataset_id + "'");
    }
    return ValidatedPair{std::move(iid), std::move(ood)};
}

}  // namespace seleval
