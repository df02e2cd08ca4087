#pragma once

#include "pidgraph/annotation.hpp"
#include "pidgraph/codes.hpp"
#include "pidgraph/config.hpp"
#include "pidgraph/corpus.hpp"
#include "pidgraph/flow.hpp"
#include "pidgraph/image_io.hpp"
#include "pidgraph/lines.hpp"
#include "pidgraph/metrics.hpp"
#include "pidgraph/overlay.hpp"
#include "pidgraph/pipeline.hpp"
#include "pidgraph/query.hpp"
#include "pidgraph/raster.hpp"
#include "pidgraph/result.hpp"
#include "pidgraph/symbols.hpp"
#include "pidgraph/synth.hpp"
#include "pidgraph/tags.hpp"
