#pragma once

#include "signatlas/errors.hpp"
#include "signatlas/numeric.hpp"
#include "signatlas/interval.hpp"
#include "signatlas/box.hpp"
#include "signatlas/poly.hpp"
#include "signatlas/slp.hpp"
#include "signatlas/fn.hpp"
#include "signatlas/region.hpp"
#include "signatlas/atlas.hpp"
#include "signatlas/engine.hpp"
#include "signatlas/appkit.hpp"
