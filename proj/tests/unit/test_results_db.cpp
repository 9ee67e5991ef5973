#include <doctest.h>

#include <map>
#include <set>

#include "capenc/results_db.hpp"
#include "fixtures.hpp"

using namespace capenc;
using capenc::testing::random_corpus;

namespace {

const char* kNormCsv =
    "method,backbone,dataset,fraction,metric,value,source\n"
    "ResNet50,IN,Potsdam,100,mF1,89.7,t\n"
    "SkySense,,Potsdam,100,mF1,94.1,t\n"
    "RingMo,,Potsdam,100,mF1,93.2,t\n";

PerformanceRecord rec(std::string method, std::string dataset, double value, std::string source = "") {
    PerformanceRecord r;
    r.model = {std::move(method), ""};
    r.task = {std::move(dataset), 100.0, "OA"};
    r.value = value;
    r.source = std::move(source);
    return r;
}

// Reference filter: recount degrees from scratch and drop offenders until stable.
std::set<std::pair<std::string, std::string>> brute_force_filter(const ResultsDb& db, std::size_t km,
                                                                 std::size_t kt) {
    std::set<std::pair<std::string, std::string>> alive;
    for (const auto& r : db.records()) alive.insert({r.model.label(), r.task.label()});
    for (bool changed = true; changed;) {
        changed = false;
        std::map<std::string, std::size_t> dm, dt;
        for (const auto& [m, t] : alive) ++dm[m], ++dt[t];
        for (auto it = alive.begin(); it != alive.end();) {
            if (dm[it->first] < km || dt[it->second] < kt) {
                it = alive.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    return alive;
}

std::set<std::pair<std::string, std::string>> pairs(const ResultsDb& db) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& r : db.records()) out.insert({r.model.label(), r.task.label()});
    return out;
}

}  // namespace

TEST_CASE("ingest reads the normalization example") {
    const auto db = ingest_csv_text(kNormCsv);
    CHECK(db.size() == 3);
    CHECK(db.models().size() == 3);
    CHECK(db.tasks().size() == 1);
    CHECK(db.tasks()[0].label() == "Potsdam@100%/mF1");
    CHECK(db.models()[0].label() == "ResNet50 IN");
    CHECK(describe(summarize(db)) == "3 records, 3 models, 1 task");
}

TEST_CASE("ingest row errors name the row and field") {
    const std::string header = "method,backbone,dataset,fraction,metric,value\n";
    SUBCASE("fraction zero") {
        try {
            ingest_csv_text(header + "A,,D,100,OA,50\nB,,D,0,OA,50\n");
            FAIL("expected a ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row() == 2);
            CHECK(e.field() == "fraction");
            CHECK(std::string(e.what()).find("fraction out of range, row 2") != std::string::npos);
        }
    }
    SUBCASE("non-numeric value") {
        CHECK_THROWS_AS(ingest_csv_text(header + "A,,D,100,OA,abc\n"), ParseError);
    }
    SUBCASE("missing column") {
        CHECK_THROWS_AS(ingest_csv_text(header + "A,,D,100\n"), ParseError);
    }
    SUBCASE("missing metric") {
        CHECK_THROWS_AS(ingest_csv_text(header + "A,,D,100,,50\n"), ParseError);
    }
    SUBCASE("percentage above 100") {
        CHECK_THROWS_AS(ingest_csv_text(header + "A,,D,100,OA,100.5\n"), ParseError);
    }
    SUBCASE("PSNR may exceed 100 but must be positive") {
        CHECK(ingest_csv_text(header + "A,,D,100,PSNR,130\n").size() == 1);
        CHECK_THROWS_AS(ingest_csv_text(header + "A,,D,100,PSNR,0\n"), ParseError);
    }
    SUBCASE("non-finite value") {
        CHECK_THROWS_AS(ingest_csv_text(header + "A,,D,100,mystery,inf\n"), ParseError);
    }
    SUBCASE("empty method") {
        CHECK_THROWS_AS(ingest_csv_text(header + ",x,D,100,OA,50\n"), ParseError);
    }
    SUBCASE("bad arch family and param count") {
        const std::string h = "method,dataset,metric,value,arch_family,param_count\n";
        CHECK_THROWS_AS(ingest_csv_text(h + "A,D,OA,50,Transformer,\n"), ParseError);
        CHECK_THROWS_AS(ingest_csv_text(h + "A,D,OA,50,,0\n"), ParseError);
        CHECK_THROWS_AS(ingest_csv_text(h + "A,D,OA,50,,1.5\n"), ParseError);
        const auto db = ingest_csv_text(h + "A,D,OA,50,swin,87000000\n");
        CHECK(db.records()[0].arch_family == ArchFamily::Swin);
        CHECK(db.records()[0].param_count == 87000000u);
    }
}

TEST_CASE("ingest rejects empty input") {
    CHECK_THROWS_AS(ingest_csv_text(""), Error);
    CHECK_THROWS_AS(ingest_csv_text("method,backbone,dataset,fraction,metric,value\n"), Error);
    CHECK_THROWS_AS(ingest_json_text("[]"), Error);
    CHECK_THROWS_AS(ingest_csv_text("method,dataset,value\nA,D,1\n"), Error);  // no metric column
}

TEST_CASE("ingest from a missing path names the path") {
    try {
        ingest("/nonexistent/results.csv", DbFormat::Csv);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("/nonexistent/results.csv") != std::string::npos);
    }
}

TEST_CASE("fraction defaults to 100 and keys are case-sensitive") {
    const auto db = ingest_csv_text(
        "method,backbone,dataset,metric,value\n"
        "A,ViT-B,D,OA,50\n"
        "A,vit-b,D,OA,51\n");
    CHECK(db.records()[0].task.fraction == 100.0);
    CHECK(db.models().size() == 2);
    CHECK(db.is_aggregated());
}

TEST_CASE("tasks differing only in fraction are distinct") {
    const auto db = ingest_csv_text(
        "method,dataset,fraction,metric,value\n"
        "A,Potsdam,100,mF1,90\n"
        "A,Potsdam,1,mF1,70\n");
    CHECK(db.tasks().size() == 2);
    CHECK(db.is_aggregated());
}

TEST_CASE("json ingest mirrors csv") {
    const auto csv = ingest_csv_text(kNormCsv);
    const auto json = ingest_json_text(export_json(csv));
    CHECK(export_csv(json) == export_csv(csv));
    CHECK_THROWS_AS(ingest_json_text("{\"method\": 1}"), Error);
    CHECK_THROWS_AS(ingest_json_text("[{\"method\": \"A\", \"dataset\": \"D\", \"metric\": \"OA\"}]"),
                    ParseError);
}

TEST_CASE("export then ingest preserves records bit-exactly") {
    Rng rng(11);
    std::vector<PerformanceRecord> records;
    for (int i = 0; i < 200; ++i) {
        auto r = rec("m" + std::to_string(i % 17), "d" + std::to_string(i % 13), rng.uniform(0.0, 100.0),
                     "src, \"quoted\"");
        r.task.fraction = rng.uniform(0.5, 100.0);
        if (i % 3 == 0) r.arch_family = ArchFamily::ViT;
        if (i % 5 == 0) r.param_count = 1000u + i;
        records.push_back(r);
    }
    const ResultsDb db(records);
    for (auto text : {export_csv(db)}) {
        const auto back = ingest_csv_text(text);
        REQUIRE(back.size() == db.size());
        for (std::size_t i = 0; i < db.size(); ++i) {
            const auto& a = db.records()[i];
            const auto& b = back.records()[i];
            CHECK(a.value == b.value);
            CHECK(a.task.fraction == b.task.fraction);
            CHECK(a.model == b.model);
            CHECK(a.source == b.source);
            CHECK(a.arch_family == b.arch_family);
            CHECK(a.param_count == b.param_count);
        }
    }
    const auto from_json = ingest_json_text(export_json(db));
    for (std::size_t i = 0; i < db.size(); ++i) CHECK(from_json.records()[i].value == db.records()[i].value);
}

TEST_CASE("aggregate_max keeps the highest value") {
    const ResultsDb db({rec("m", "t", 89.7), rec("m", "t", 91.2)});
    const auto agg = aggregate_max(db);
    REQUIRE(agg.size() == 1);
    CHECK(agg.records()[0].value == 91.2);
}

TEST_CASE("aggregate_max tie keeps the first-ingested record") {
    const ResultsDb db({rec("m", "t", 90.0, "srcA"), rec("m", "t", 90.0, "srcB")});
    const auto agg = aggregate_max(db);
    REQUIRE(agg.size() == 1);
    CHECK(agg.records()[0].source == "srcA");
}

TEST_CASE("aggregate_max is the identity on duplicate-free data and idempotent") {
    const auto db = ingest_csv_text(kNormCsv);
    CHECK(export_csv(aggregate_max(db)) == export_csv(db));

    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PerformanceRecord> records;
        for (int i = 0; i < 60; ++i)
            records.push_back(rec("m" + std::to_string(rng.below(6)), "d" + std::to_string(rng.below(6)),
                                  static_cast<double>(rng.below(5)), std::to_string(i)));
        const ResultsDb messy(records);
        const auto once = aggregate_max(messy);
        CHECK(once.is_aggregated());
        CHECK(export_csv(aggregate_max(once)) == export_csv(once));
        // every kept record is the first one holding the maximum of its pair
        for (const auto& kept : once.records()) {
            const PerformanceRecord* best = nullptr;
            for (const auto& r : messy.records())
                if (r.model == kept.model && r.task == kept.task && (!best || r.value > best->value))
                    best = &r;
            CHECK(best->source == kept.source);
        }
    }
}

TEST_CASE("filter_min_degree examples") {
    SUBCASE("dense db survives untouched") {
        std::vector<PerformanceRecord> records;
        for (int m = 0; m < 6; ++m)
            for (int t = 0; t < 6; ++t)
                records.push_back(rec("m" + std::to_string(m), "d" + std::to_string(t), 50.0 + m + t));
        const ResultsDb db(records);
        const auto out = filter_min_degree(db);
        CHECK(!out.emptied);
        CHECK(export_csv(out.db) == export_csv(db));
    }
    SUBCASE("star graph cascades to empty") {
        std::vector<PerformanceRecord> records;
        for (int t = 0; t < 10; ++t) records.push_back(rec("hub", "d" + std::to_string(t), 60.0));
        const auto out = filter_min_degree(ResultsDb(records));
        CHECK(out.emptied);
        CHECK(out.db.empty());
    }
    SUBCASE("requires an aggregated db") {
        CHECK_THROWS_AS(filter_min_degree(ResultsDb({rec("m", "t", 1), rec("m", "t", 2)})), Error);
    }
}

TEST_CASE("filter_min_degree matches the brute-force fixed point") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const auto db = random_corpus(rng, 30, 30, rng.uniform(0.05, 0.5));
        const std::size_t km = 1 + rng.below(6), kt = 1 + rng.below(6);
        const auto out = filter_min_degree(db, km, kt);
        CHECK(pairs(out.db) == brute_force_filter(db, km, kt));
        // constraints hold by direct count
        for (const auto& [m, d] : out.db.model_degrees()) CHECK(d >= km);
        for (const auto& [t, d] : out.db.task_degrees()) CHECK(d >= kt);
        // idempotent, and the output keeps input order
        CHECK(export_csv(filter_min_degree(out.db, km, kt).db) == export_csv(out.db));
        std::size_t cursor = 0;
        for (const auto& r : out.db.records()) {
            while (cursor < db.size() && db.records()[cursor].row != r.row) ++cursor;
            CHECK(cursor < db.size());
        }
    }
}

TEST_CASE("format detection") {
    CHECK(format_from_path("a/b.json") == DbFormat::Json);
    CHECK(format_from_path("a/b.csv") == DbFormat::Csv);
    CHECK(format_from_path("a/b") == DbFormat::Csv);
    CHECK(parse_db_format("json") == DbFormat::Json);
    CHECK(!parse_db_format("xml"));
}

TEST_CASE("metric ranges") {
    CHECK(metric_range("OA") == MetricRange::Percentage);
    CHECK(metric_range("mIoU") == MetricRange::Percentage);
    CHECK(metric_range("PSNR") == MetricRange::PositiveOpen);
    CHECK(metric_range("SSIM") == MetricRange::Unchecked);
}
