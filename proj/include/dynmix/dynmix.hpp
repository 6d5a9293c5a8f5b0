#pragma once

#include "dynmix/banded.hpp"
#include "dynmix/diagnostics.hpp"
#include "dynmix/errors.hpp"
#include "dynmix/gibbs.hpp"
#include "dynmix/io.hpp"
#include "dynmix/link.hpp"
#include "dynmix/link_samplers.hpp"
#include "dynmix/mathfn.hpp"
#include "dynmix/mixture.hpp"
#include "dynmix/poly_dlm.hpp"
#include "dynmix/rng.hpp"
#include "dynmix/synthdata.hpp"
#include "dynmix/version.hpp"
