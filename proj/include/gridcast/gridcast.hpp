#pragma once

#include "gridcast/baselines/knn.hpp"
#include "gridcast/baselines/snaive.hpp"
#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/core/rng.hpp"
#include "gridcast/core/time.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/data/calendar.hpp"
#include "gridcast/data/clean.hpp"
#include "gridcast/data/csv.hpp"
#include "gridcast/data/split.hpp"
#include "gridcast/diagnose/attribution.hpp"
#include "gridcast/diagnose/feature_profile.hpp"
#include "gridcast/eval/evaluate.hpp"
#include "gridcast/eval/metrics.hpp"
#include "gridcast/features/decompose.hpp"
#include "gridcast/features/features.hpp"
#include "gridcast/features/kmeans.hpp"
#include "gridcast/io/json.hpp"
#include "gridcast/model/hitsgam.hpp"
#include "gridcast/pipeline.hpp"
#include "gridcast/reconcile/reconcile.hpp"
#include "gridcast/synth/generate.hpp"
#include "gridcast/train/trainer.hpp"
