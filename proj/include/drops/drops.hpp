#pragma once

#include "drops/error.hpp"
#include "drops/polynomial.hpp"
#include "drops/core.hpp"
#include "drops/quadrature.hpp"
#include "drops/profile.hpp"
#include "drops/stability.hpp"
#include "drops/io.hpp"
