#pragma once

#include "higgsmorse/errors.hpp"
#include "higgsmorse/algebra.hpp"
#include "higgsmorse/curve.hpp"
#include "higgsmorse/groups.hpp"
#include "higgsmorse/critical.hpp"
#include "higgsmorse/morse.hpp"
#include "higgsmorse/census.hpp"
#include "higgsmorse/flow.hpp"
#include "higgsmorse/io.hpp"
