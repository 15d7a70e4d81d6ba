#pragma once

#include "cyclicity/circulant.hpp"
#include "cyclicity/coom.hpp"
#include "cyclicity/cyclic_lead.hpp"
#include "cyclicity/experiments.hpp"
#include "cyclicity/ou.hpp"
#include "cyclicity/simulate.hpp"
#include "cyclicity/spectral.hpp"
#include "cyclicity/types.hpp"
