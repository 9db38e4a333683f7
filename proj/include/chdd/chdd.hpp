#pragma once

#include "chdd/core.hpp"
#include "chdd/blocktri.hpp"
#include "chdd/discretization.hpp"
#include "chdd/subsolve.hpp"
#include "chdd/iteration.hpp"
#include "chdd/dn.hpp"
#include "chdd/nn.hpp"
#include "chdd/modes.hpp"
#include "chdd/theory.hpp"
#include "chdd/harness/spec.hpp"
#include "chdd/harness/run.hpp"
#include "chdd/harness/presets.hpp"
#include "chdd/harness/output.hpp"
