#pragma once

#include "fairdiv/allocators.hpp"
#include "fairdiv/assignment_dynamics.hpp"
#include "fairdiv/distributions.hpp"
#include "fairdiv/errors.hpp"
#include "fairdiv/harness.hpp"
#include "fairdiv/matching.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/oracle.hpp"
#include "fairdiv/rng.hpp"
#include "fairdiv/serialization.hpp"
#include "fairdiv/stats.hpp"
