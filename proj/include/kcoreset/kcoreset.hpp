#pragma once

#include "kcoreset/errors.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/offline.hpp"
#include "kcoreset/validate.hpp"
#include "kcoreset/streaming.hpp"
#include "kcoreset/sketch.hpp"
#include "kcoreset/dynamic.hpp"
#include "kcoreset/mpc.hpp"
#include "kcoreset/lower_bounds.hpp"
#include "kcoreset/io.hpp"
