#include "capenc/results_db.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include <nlohmann/json.hpp>

#include "capenc/error.hpp"
#include "capenc/text.hpp"

namespace capenc {

namespace {

const std::vector<std::string>& export_header() {
    static const std::vector<std::string> header = {"method", "backbone", "dataset",
                                                    "fraction", "metric", "value",
                                                    "source", "arch_family", "param_count"};
    return header;
}

[[noreturn]] void fail(const std::string& what, std::size_t row, const std::string& field) {
    throw ParseError(what + ", row " + std::to_string(row) + " (field '" + field + "')", row,
                     field);
}

bool blank(std::string_view s) { return text::trim(s).empty(); }

// Raw field values of one input row, before typing.
struct RawRow {
    std::size_t row = 0;
    std::string method, backbone, dataset, fraction, metric, value, source, arch_family,
        param_count;
};

PerformanceRecord build_record(const RawRow& raw) {
    PerformanceRecord rec;
    rec.row = raw.row;
    rec.model.method = raw.method;
    rec.model.backbone = raw.backbone;
    rec.task.dataset = raw.dataset;
    rec.task.metric = raw.metric;
    rec.source = raw.source;

    if (blank(raw.fraction)) {
        rec.task.fraction = 100.0;
    } else {
        const auto f = text::parse_double(raw.fraction);
        if (!f) fail("non-numeric fraction", raw.row, "fraction");
        rec.task.fraction = *f;
    }

    if (blank(raw.value)) fail("missing value", raw.row, "value");
    const auto v = text::parse_double(raw.value);
    if (!v) fail("non-numeric value", raw.row, "value");
    rec.value = *v;

    if (!blank(raw.arch_family)) {
        rec.arch_family = parse_arch_family(text::trim(raw.arch_family));
        if (!rec.arch_family) fail("unknown architecture family", raw.row, "arch_family");
    }
    if (!blank(raw.param_count)) {
        const auto n = text::parse_unsigned(raw.param_count);
        if (!n) fail("param_count is not a non-negative integer", raw.row, "param_count");
        rec.param_count = *n;
    }
    validate(rec);
    return rec;
}

std::string json_string_field(const nlohmann::json& obj, const char* key, std::size_t row) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number()) {
        if (it->is_number_integer() && it->is_number_unsigned())
            return std::to_string(it->get<unsigned long long>());
        if (it->is_number_integer()) return std::to_string(it->get<long long>());
        return text::format_double(it->get<double>());
    }
    fail("unexpected JSON type", row, key);
}

}  // namespace

std::string ModelKey::label() const {
    return backbone.empty() ? method : method + " " + backbone;
}

std::string TaskKey::label() const {
    return dataset + "@" + text::format_double(fraction) + "%/" + metric;
}

std::string_view to_string(ArchFamily family) {
    switch (family) {
        case ArchFamily::CNN: return "CNN";
        case ArchFamily::ViT: return "ViT";
        case ArchFamily::Swin: return "Swin";
        case ArchFamily::Other: return "other";
    }
    return "other";
}

std::optional<ArchFamily> parse_arch_family(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "cnn") return ArchFamily::CNN;
    if (lower == "vit") return ArchFamily::ViT;
    if (lower == "swin") return ArchFamily::Swin;
    if (lower == "other") return ArchFamily::Other;
    return std::nullopt;
}

MetricRange metric_range(std::string_view metric) {
    static const std::set<std::string, std::less<>> percentage = {
        "OA", "AA", "Acc", "F1", "mF1", "IoU", "mIoU", "AP", "mAP", "mAP50", "mAcc"};
    if (percentage.contains(metric)) return MetricRange::Percentage;
    if (metric == "PSNR") return MetricRange::PositiveOpen;
    return MetricRange::Unchecked;
}

void validate(const PerformanceRecord& r) {
    if (blank(r.model.method)) fail("empty method name", r.row, "method");
    if (blank(r.task.dataset)) fail("empty dataset", r.row, "dataset");
    if (blank(r.task.metric)) fail("missing metric", r.row, "metric");
    if (!std::isfinite(r.task.fraction) || r.task.fraction <= 0.0 || r.task.fraction > 100.0)
        fail("fraction out of range", r.row, "fraction");
    if (!std::isfinite(r.value)) fail("non-finite value", r.row, "value");
    switch (metric_range(r.task.metric)) {
        case MetricRange::Percentage:
            if (r.value < 0.0 || r.value > 100.0)
                fail("value outside [0, 100] for metric " + r.task.metric, r.row, "value");
            break;
        case MetricRange::PositiveOpen:
            if (r.value <= 0.0) fail("value must be positive for metric " + r.task.metric, r.row,
                                     "value");
            break;
        case MetricRange::Unchecked:
            break;
    }
    if (r.param_count && *r.param_count == 0)
        fail("param_count must be positive", r.row, "param_count");
}

std::optional<DbFormat> parse_db_format(std::string_view text) {
    if (text == "csv") return DbFormat::Csv;
    if (text == "json") return DbFormat::Json;
    return std::nullopt;
}

DbFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".json" ? DbFormat::Json : DbFormat::Csv;
}

ResultsDb::ResultsDb(std::vector<PerformanceRecord> records) : records_(std::move(records)) {}

std::vector<ModelKey> ResultsDb::models() const {
    std::vector<ModelKey> out;
    std::set<ModelKey> seen;
    for (const auto& r : records_)
        if (seen.insert(r.model).second) out.push_back(r.model);
    return out;
}

std::vector<TaskKey> ResultsDb::tasks() const {
    std::vector<TaskKey> out;
    std::set<TaskKey> seen;
    for (const auto& r : records_)
        if (seen.insert(r.task).second) out.push_back(r.task);
    return out;
}

std::map<ModelKey, std::size_t> ResultsDb::model_degrees() const {
    std::map<ModelKey, std::size_t> deg;
    for (const auto& r : records_) ++deg[r.model];
    return deg;
}

std::map<TaskKey, std::size_t> ResultsDb::task_degrees() const {
    std::map<TaskKey, std::size_t> deg;
    for (const auto& r : records_) ++deg[r.task];
    return deg;
}

bool ResultsDb::is_aggregated() const {
    std::set<std::pair<ModelKey, TaskKey>> seen;
    for (const auto& r : records_)
        if (!seen.emplace(r.model, r.task).second) return false;
    return true;
}

ResultsDb ingest_csv_text(std::string_view contents) {
    if (text::trim(contents).empty()) throw Error("empty file");
    const auto rows = text::parse_csv(contents);
    if (rows.empty()) throw Error("empty file");

    const auto& header = rows.front();
    std::map<std::string, std::size_t, std::less<>> column;
    for (std::size_t i = 0; i < header.size(); ++i) column[std::string(text::trim(header[i]))] = i;
    for (const char* required : {"method", "dataset", "metric", "value"}) {
        if (!column.contains(required))
            throw ParseError(std::string("header is missing column '") + required + "'", 0,
                             required);
    }
    if (rows.size() == 1) throw Error("empty file: header but no data rows");

    std::vector<PerformanceRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        RawRow raw;
        raw.row = r;
        auto get = [&](const char* name) -> std::string {
            const auto it = column.find(name);
            if (it == column.end()) return {};
            if (it->second >= cells.size()) fail("missing column", r, name);
            return cells[it->second];
        };
        raw.method = get("method");
        raw.backbone = get("backbone");
        raw.dataset = get("dataset");
        raw.fraction = get("fraction");
        raw.metric = get("metric");
        raw.value = get("value");
        raw.source = get("source");
        raw.arch_family = get("arch_family");
        raw.param_count = get("param_count");
        records.push_back(build_record(raw));
    }
    return ResultsDb(std::move(records));
}

ResultsDb ingest_json_text(std::string_view contents) {
    if (text::trim(contents).empty()) throw Error("empty file");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(contents);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw Error("JSON results must be an array of objects");
    if (doc.empty()) throw Error("empty file: no records");

    std::vector<PerformanceRecord> records;
    records.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& obj = doc[i];
        const std::size_t row = i + 1;
        if (!obj.is_object()) fail("row is not an object", row, "*");
        for (const char* required : {"method", "dataset", "metric", "value"})
            if (!obj.contains(required)) fail("missing column", row, required);
        RawRow raw;
        raw.row = row;
        raw.method = json_string_field(obj, "method", row);
        raw.backbone = json_string_field(obj, "backbone", row);
        raw.dataset = json_string_field(obj, "dataset", row);
        raw.fraction = json_string_field(obj, "fraction", row);
        raw.metric = json_string_field(obj, "metric", row);
        raw.value = json_string_field(obj, "value", row);
        raw.source = json_string_field(obj, "source", row);
        raw.arch_family = json_string_field(obj, "arch_family", row);
        raw.param_count = json_string_field(obj, "param_count", row);
        records.push_back(build_record(raw));
    }
    return ResultsDb(std::move(records));
}

ResultsDb ingest(const std::filesystem::path& path, DbFormat format) {
    if (!std::filesystem::exists(path)) throw Error("input file not found: " + path.string());
    const std::string contents = text::read_file(path);
    return format == DbFormat::Csv ? ingest_csv_text(contents) : ingest_json_text(contents);
}

std::string export_csv(const ResultsDb& db) {
    std::string out = text::csv_line(export_header());
    for (const auto& r : db.records()) {
        out += text::csv_line({r.model.method, r.model.backbone, r.task.dataset,
                               text::format_double(r.task.fraction), r.task.metric,
                               text::format_double(r.value), r.source,
                               r.arch_family ? std::string(to_string(*r.arch_family)) : "",
                               r.param_count ? std::to_string(*r.param_count) : ""});
    }
    return out;
}

std::string export_json(const ResultsDb& db) {
    auto doc = nlohmann::json::array();
    for (const auto& r : db.records()) {
        nlohmann::json obj;
        obj["method"] = r.model.method;
        obj["backbone"] = r.model.backbone;
        obj["dataset"] = r.task.dataset;
        obj["fraction"] = r.task.fraction;
        obj["metric"] = r.task.metric;
        obj["value"] = r.value;
        obj["source"] = r.source;
        obj["arch_family"] =
            r.arch_family ? nlohmann::json(std::string(to_string(*r.arch_family))) : nlohmann::json();
        obj["param_count"] = r.param_count ? nlohmann::json(*r.param_count) : nlohmann::json();
        doc.push_back(std::move(obj));
    }
    return doc.dump(2) + "\n";
}

void export_db(const ResultsDb& db, const std::filesystem::path& path, DbFormat format) {
    text::write_file(path, format == DbFormat::Csv ? export_csv(db) : export_json(db));
}

ResultsDb aggregate_max(const ResultsDb& db) {
    std::vector<PerformanceRecord> out;
    std::map<std::pair<ModelKey, TaskKey>, std::size_t> slot;
    for (const auto& r : db.records()) {
        const auto [it, inserted] = slot.try_emplace({r.model, r.task}, out.size());
        if (inserted) {
            out.push_back(r);
        } else if (r.value > out[it->second].value) {
            out[it->second] = r;
        }
    }
    return ResultsDb(std::move(out));
}

FilterResult filter_min_degree(const ResultsDb& db, std::size_t min_model_degree,
                               std::size_t min_task_degree) {
    if (!db.is_aggregated())
        throw Error("filter_min_degree requires an aggregated db (run aggregate_max first)");

    // Bipartite peeling: a vertex whose degree drops below its threshold is
    // removed together with its incident records, which may cascade.
    const auto& recs = db.records();
    std::map<ModelKey, std::size_t> model_id;
    std::map<TaskKey, std::size_t> task_id;
    for (const auto& r : recs) {
        model_id.try_emplace(r.model, model_id.size());
        task_id.try_emplace(r.task, task_id.size());
    }
    const std::size_t n_models = model_id.size();
    std::vector<std::vector<std::size_t>> incident(n_models + task_id.size());
    std::vector<std::size_t> degree(incident.size(), 0);
    std::vector<std::size_t> edge_model(recs.size()), edge_task(recs.size());
    for (std::size_t e = 0; e < recs.size(); ++e) {
        edge_model[e] = model_id.at(recs[e].model);
        edge_task[e] = n_models + task_id.at(recs[e].task);
        incident[edge_model[e]].push_back(e);
        incident[edge_task[e]].push_back(e);
        ++degree[edge_model[e]];
        ++degree[edge_task[e]];
    }
    auto threshold = [&](std::size_t v) {
        return v < n_models ? min_model_degree : min_task_degree;
    };

    std::vector<bool> vertex_dead(incident.size(), false), edge_dead(recs.size(), false);
    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < incident.size(); ++v) {
        if (degree[v] < threshold(v)) {
            vertex_dead[v] = true;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t e : incident[v]) {
            if (edge_dead[e]) continue;
            edge_dead[e] = true;
            const std::size_t other = edge_model[e] == v ? edge_task[e] : edge_model[e];
            --degree[other];
            if (!vertex_dead[other] && degree[other] < threshold(other)) {
                vertex_dead[other] = true;
                queue.push_back(other);
            }
        }
    }

    std::vector<PerformanceRecord> kept;
    for (std::size_t e = 0; e < recs.size(); ++e)
        if (!edge_dead[e]) kept.push_back(recs[e]);
    FilterResult result;
    result.emptied = kept.empty() && !recs.empty();
    result.db = ResultsDb(std::move(kept));
    return result;
}

DbSummary summarize(const ResultsDb& db) {
    return {db.size(), db.models().size(), db.tasks().size()};
}

std::string describe(const DbSummary& s) {
    auto plural = [](std::size_t n, const char* word) {
        return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
    };
    return plural(s.records, "record") + ", " + plural(s.models, "model") + ", " +
           plural(s.tasks, "task");
}

}  // namespace capenc
