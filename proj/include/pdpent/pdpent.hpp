#pragma once

#include "pdpent/compensated.hpp"
#include "pdpent/entropy.hpp"
#include "pdpent/functionals.hpp"
#include "pdpent/general_entropy.hpp"
#include "pdpent/pdp_sampler.hpp"
#include "pdpent/random.hpp"
#include "pdpent/records.hpp"
#include "pdpent/special_fn.hpp"
#include "pdpent/verification.hpp"
