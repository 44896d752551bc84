#pragma once

#include "usp/rational.hpp"
#include "usp/core.hpp"
#include "usp/exactlp.hpp"
#include "usp/graphalg.hpp"
#include "usp/normalize.hpp"
#include "usp/rigidity.hpp"
#include "usp/witness.hpp"
#include "usp/topology.hpp"
#include "usp/hom.hpp"
#include "usp/metrizability.hpp"
#include "usp/gallery.hpp"
#include "usp/io.hpp"
