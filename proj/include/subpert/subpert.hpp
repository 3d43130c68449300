#pragma once

#include "subpert/error.hpp"
#include "subpert/linalg.hpp"
#include "subpert/spectrum.hpp"
#include "subpert/bounds.hpp"
#include "subpert/partition_infimum.hpp"
#include "subpert/harness.hpp"
#include "subpert/io.hpp"
