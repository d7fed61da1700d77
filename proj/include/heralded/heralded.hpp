#ifndef HERALDED_HERALDED_HPP
#define HERALDED_HERALDED_HPP

#include "heralded/config.hpp"
#include "heralded/herald.hpp"
#include "heralded/jsa.hpp"
#include "heralded/numerics.hpp"
#include "heralded/povm.hpp"
#include "heralded/presets.hpp"
#include "heralded/report.hpp"
#include "heralded/scenario.hpp"
#include "heralded/units.hpp"

#endif
