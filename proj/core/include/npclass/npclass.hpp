#pragma once

#include "npclass/bounds.hpp"
#include "npclass/classifiers.hpp"
#include "npclass/distributions.hpp"
#include "npclass/errors.hpp"
#include "npclass/exponents.hpp"
#include "npclass/random.hpp"
#include "npclass/sequential.hpp"
#include "npclass/simulation.hpp"
#include "npclass/special.hpp"
