#pragma once

#include "capenc/analysis.hpp"
#include "capenc/embedder.hpp"
#include "capenc/error.hpp"
#include "capenc/evaluator.hpp"
#include "capenc/geometry.hpp"
#include "capenc/io.hpp"
#include "capenc/normalize.hpp"
#include "capenc/results_db.hpp"
