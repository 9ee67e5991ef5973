#pragma once

// File formats shared by the CLI and the Python bindings. All JSON is written
// with sorted keys; all tables are CSV with a header row.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "capenc/analysis.hpp"
#include "capenc/embedder.hpp"
#include "capenc/evaluator.hpp"
#include "capenc/normalize.hpp"

namespace capenc::io {

// {geometry:{kind,dim,ball_epsilon}, seed, loss, model_points:{label:[..]},
//  task_points:{label:[..]}}. Coordinates round-trip exactly.
std::string embedding_to_json(const EmbeddingSpace& space);
EmbeddingSpace embedding_from_json(std::string_view json);
void save_embedding(const EmbeddingSpace& space, const std::filesystem::path& path);
EmbeddingSpace load_embedding(const std::filesystem::path& path);

/// The delta matrix with per-task best value and max gap, so predictions can
/// be reported in metric units without the original results.
std::string delta_to_json(const DeltaMatrix& delta);
DeltaMatrix delta_from_json(std::string_view json);
void save_delta(const DeltaMatrix& delta, const std::filesystem::path& path);
DeltaMatrix load_delta(const std::filesystem::path& path);

/// emb.json -> emb.delta.json
std::filesystem::path delta_sidecar_path(const std::filesystem::path& embedding_path);

/// geometry,split,model,task,true_delta,predicted_delta,model_degree
std::string eval_rows_csv(const std::vector<EvalReport>& reports);
/// geometry,true_delta,predicted_delta,model,task,degree
std::string scatter_csv(const std::vector<EvalReport>& reports);
/// geometry,bucket,count,mean_abs_error,error_std
std::string degree_table_csv(const std::vector<EvalReport>& reports,
                             const std::vector<DegreeErrorTable>& tables);
std::string eval_summary_json(const std::vector<EvalReport>& reports, const SplitPlan& plan);

/// dataset,fraction,metric,task,n,mu,sigma,saturated
std::string quality_csv(const std::vector<QualityRow>& rows);
/// rank,model,centrality
std::string centrality_csv(const std::vector<CentralityRow>& rows);
/// label,kind,x,y,class
std::string map_csv(const std::vector<ScatterPoint>& points);

}  // namespace capenc::io
