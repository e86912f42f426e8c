#pragma once

#include "flowgen/classifier.hpp"
#include "flowgen/depth_unify.hpp"
#include "flowgen/ego_motion.hpp"
#include "flowgen/flow_io.hpp"
#include "flowgen/gen_config.hpp"
#include "flowgen/generate.hpp"
#include "flowgen/image_io.hpp"
#include "flowgen/lateral_aug.hpp"
#include "flowgen/manifest.hpp"
#include "flowgen/metrics.hpp"
#include "flowgen/sample_tuple.hpp"
#include "flowgen/sampling.hpp"
#include "flowgen/tuple_io.hpp"
#include "flowgen/types.hpp"
#include "flowgen/visualize.hpp"
#include "flowgen/warp.hpp"
