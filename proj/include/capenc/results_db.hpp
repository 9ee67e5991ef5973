#pragma once

// Database of literature fine-tuning results: ingestion, duplicate
// aggregation and degree filtering.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace capenc {

/// A model variant: pretraining method plus backbone. Keys compare by exact,
/// case-sensitive strings.
struct ModelKey {
    std::string method;
    std::string backbone;

    /// "method backbone", or just "method" when the backbone is empty.
    std::string label() const;

    auto operator<=>(const ModelKey&) const = default;
    bool operator==(const ModelKey&) const = default;
};

/// A downstream task is the full (dataset, training fraction, metric) triplet.
struct TaskKey {
    std::string dataset;
    double fraction = 100.0;  // percent of the training set, in (0, 100]
    std::string metric;

    /// "dataset@fraction%/metric", e.g. "Potsdam@100%/mF1".
    std::string label() const;

    auto operator<=>(const TaskKey&) const = default;
    bool operator==(const TaskKey&) const = default;
};

enum class ArchFamily { CNN, ViT, Swin, Other };

std::string_view to_string(ArchFamily family);
std::optional<ArchFamily> parse_arch_family(std::string_view text);

/// How a metric's values are range-checked.
enum class MetricRange {
    Percentage,      // [0, 100]
    PositiveOpen,    // > 0, unbounded above (PSNR)
    Unchecked,       // unknown metric name
};

MetricRange metric_range(std::string_view metric);

struct PerformanceRecord {
    ModelKey model;
    TaskKey task;
    double value = 0.0;  // higher is better
    std::string source;
    std::optional<ArchFamily> arch_family;
    std::optional<std::uint64_t> param_count;
    std::size_t row = 0;  // 1-based ingestion row, kept for error reporting
};

/// Throws ParseError if the record violates a field invariant.
void validate(const PerformanceRecord& record);

enum class DbFormat { Csv, Json };

std::optional<DbFormat> parse_db_format(std::string_view text);
/// Guesses the format from the file extension; defaults to CSV.
DbFormat format_from_path(const std::filesystem::path& path);

class ResultsDb {
public:
    ResultsDb() = default;
    explicit ResultsDb(std::vector<PerformanceRecord> records);

    const std::vector<PerformanceRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    /// Distinct models / tasks in first-appearance order.
    std::vector<ModelKey> models() const;
    std::vector<TaskKey> tasks() const;

    /// Record count per model / task.
    std::map<ModelKey, std::size_t> model_degrees() const;
    std::map<TaskKey, std::size_t> task_degrees() const;

    /// True when no (model, task) pair occurs twice.
    bool is_aggregated() const;

private:
    std::vector<PerformanceRecord> records_;
};

/// Reads a results file. Duplicates are kept; every row is validated.
ResultsDb ingest(const std::filesystem::path& path, DbFormat format);
ResultsDb ingest_csv_text(std::string_view text);
ResultsDb ingest_json_text(std::string_view text);

/// Canonical CSV with the ingest header; values printed in shortest
/// round-trip form.
std::string export_csv(const ResultsDb& db);
std::string export_json(const ResultsDb& db);
void export_db(const ResultsDb& db, const std::filesystem::path& path, DbFormat format);

/// Keeps one record per (model, task): the highest value, first-ingested on ties.
ResultsDb aggregate_max(const ResultsDb& db);

struct FilterResult {
    ResultsDb db;
    bool emptied = false;  // nothing survived (caller should warn)
};

/// Drops models with fewer than min_model_degree records and tasks with fewer
/// than min_task_degree records, repeating until nothing changes. Requires an
/// aggregated db.
FilterResult filter_min_degree(const ResultsDb& db, std::size_t min_model_degree = 5,
                               std::size_t min_task_degree = 5);

struct DbSummary {
    std::size_t records = 0;
    std::size_t models = 0;
    std::size_t tasks = 0;
};

DbSummary summarize(const ResultsDb& db);
/// "3 records, 3 models, 1 task"
std::string describe(const DbSummary& summary);

}  // namespace capenc
