#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "capenc/error.hpp"
#include "commands.hpp"

#ifndef CAPENC_VERSION
#define CAPENC_VERSION "0.0.0"
#endif

namespace {

using namespace capenc::cli;

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
    cmd->add_option("--iterations", f.iterations, "maximum optimizer iterations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--lr", f.learning_rate, "learning rate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--optimizer", f.optimizer, "adam or gd")
        ->check(CLI::IsMember({"adam", "gd", "sgd"}))
        ->capture_default_str();
    cmd->add_option("--tol", f.tolerance, "relative loss change that counts as converged")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--init-scale", f.init_scale, "spread of the random initial points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "random seed")->capture_default_str();
}

const std::vector<std::string> kGeometries{"euclidean", "cosine", "poincare"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capenc: embed models and tasks so that distance predicts performance"};
    app.set_version_flag("--version", CAPENC_VERSION);
    app.require_subcommand(1);

    IngestOptions ingest;
    auto* c_ingest = app.add_subcommand("ingest", "load, aggregate and filter a results table");
    c_ingest->add_option("--input", ingest.input, "CSV or JSON results")->required();
    c_ingest->add_option("--format", ingest.format, "csv or json (default: from the extension)")
        ->check(CLI::IsMember({"csv", "json"}));
    c_ingest->add_flag("--aggregate", ingest.aggregate, "keep the best value per (model, task)");
    c_ingest->add_option("--min-degree", ingest.min_degree, "drop models/tasks with fewer results")
        ->capture_default_str();
    c_ingest->add_option("--min-task-degree", ingest.min_task_degree,
                         "task threshold (default: --min-degree)");
    c_ingest->add_option("--out", ingest.out, "output db (.csv or .json)")->required();

    EmbedOptions embed;
    auto* c_embed = app.add_subcommand("embed", "fit an embedding to a results db");
    c_embed->add_option("--db", embed.db)->required();
    c_embed->add_option("--geometry", embed.geometry)->check(CLI::IsMember(kGeometries))->capture_default_str();
    c_embed->add_option("--dim", embed.dim)->check(CLI::PositiveNumber)->capture_default_str();
    c_embed->add_option("--ball-epsilon", embed.ball_epsilon, "Poincare boundary margin")
        ->check(CLI::Range(0.0, 0.1))
        ->capture_default_str();
    add_fit_flags(c_embed, embed.fit);
    c_embed->add_option("--out", embed.out, "embedding JSON")->required();

    PredictOptions predict;
    auto* c_predict = app.add_subcommand("predict", "predict the normalized gap of a model on a task");
    c_predict->add_option("--embedding", predict.embedding)->required();
    c_predict->add_option("--model", predict.model)->required();
    c_predict->add_option("--task", predict.task, "label like EuroSAT@100%/OA")->required();
    c_predict->add_flag("--raw", predict.raw, "also print the value in the metric's units");

    PlaceOptions place;
    auto* c_place = app.add_subcommand("place", "add a new model or task to an embedding");
    c_place->add_option("--embedding", place.embedding)->required();
    c_place->add_option("--kind", place.kind)->required()->check(CLI::IsMember({"model", "task"}));
    c_place->add_option("--name", place.name)->required();
    c_place->add_option("--results", place.results, "results of the new entity")
        ->required();
    c_place->add_option("--restarts", place.restarts)->check(CLI::PositiveNumber)->capture_default_str();
    add_fit_flags(c_place, place.fit);
    c_place->add_option("--out", place.out, "updated embedding JSON")->required();

    EvalOptions eval;
    auto* c_eval = app.add_subcommand("eval", "holdout evaluation across geometries");
    c_eval->add_option("--db", eval.db)->required();
    c_eval->add_option("--splits", eval.splits)->check(CLI::PositiveNumber)->capture_default_str();
    c_eval->add_option("--holdout", eval.holdout)->check(CLI::PositiveNumber)->capture_default_str();
    c_eval->add_option("--geometries", eval.geometries, "all or a comma-separated list")
        ->capture_default_str();
    c_eval->add_option("--dim", eval.dim)->check(CLI::PositiveNumber)->capture_default_str();
    c_eval->add_option("--ball-epsilon", eval.ball_epsilon)
        ->check(CLI::Range(0.0, 0.1))
        ->capture_default_str();
    c_eval->add_option("--split-seed", eval.split_seed, "seed for the holdout draws")
        ->capture_default_str();
    add_fit_flags(c_eval, eval.fit);
    c_eval->add_option("--out", eval.out, "output directory")->required();

    AnalyzeOptions analyze;
    auto* c_analyze = app.add_subcommand("analyze", "dataset quality, centrality and a 2D map");
    c_analyze->add_option("--db", analyze.db)->required();
    c_analyze->add_option("--embedding", analyze.embedding)->required();
    c_analyze->add_option("--method", analyze.method, "stress2d or pca")
        ->check(CLI::IsMember({"stress2d", "pca"}))
        ->capture_default_str();
    c_analyze->add_option("--min-mean", analyze.min_mean, "saturation: minimum mean")
        ->capture_default_str();
    c_analyze->add_option("--max-sigma", analyze.max_sigma, "saturation: maximum sigma")
        ->capture_default_str();
    c_analyze->add_option("--out", analyze.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_ingest) return cmd_ingest(ingest);
        if (*c_embed) return cmd_embed(embed);
        if (*c_predict) return cmd_predict(predict);
        if (*c_place) return cmd_place(place);
        if (*c_eval) return cmd_eval(eval);
        if (*c_analyze) return cmd_analyze(analyze);
    } catch (const std::exception& e) {
        std::cerr << "capenc: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
