#pragma once

#include "opra/algebra.hpp"
#include "opra/composition.hpp"
#include "opra/geometry.hpp"
#include "opra/reasoner.hpp"
#include "opra/verify.hpp"
