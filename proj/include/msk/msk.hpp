#pragma once

#include "msk/types.hpp"
#include "msk/linalg.hpp"
#include "msk/blaschke.hpp"
#include "msk/function_rep.hpp"
#include "msk/modelspace.hpp"
#include "msk/oracles.hpp"
#include "msk/carleson.hpp"
#include "msk/similarity.hpp"
#include "msk/instances.hpp"
#include "msk/pipeline.hpp"
#include "msk/serialize.hpp"
#include "msk/report.hpp"
#include "msk/acceptance.hpp"
