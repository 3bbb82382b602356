#pragma once

#include "tabgfm/dataset_io.hpp"
#include "tabgfm/ecoc.hpp"
#include "tabgfm/encoders.hpp"
#include "tabgfm/ensemble.hpp"
#include "tabgfm/error.hpp"
#include "tabgfm/external_learner.hpp"
#include "tabgfm/folds.hpp"
#include "tabgfm/graph.hpp"
#include "tabgfm/learners.hpp"
#include "tabgfm/linear_gnn.hpp"
#include "tabgfm/node_table.hpp"
#include "tabgfm/pipeline.hpp"
#include "tabgfm/predictor.hpp"
#include "tabgfm/rng.hpp"
#include "tabgfm/selftest.hpp"
#include "tabgfm/synthetic.hpp"
#include "tabgfm/tfm_predictors.hpp"
