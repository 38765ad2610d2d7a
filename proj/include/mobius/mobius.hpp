#pragma once

// Umbrella header for the whole library.

#include "errors.hpp"
#include "field.hpp"
#include "extension.hpp"
#include "plane.hpp"
#include "rng.hpp"
#include "serialize.hpp"
#include "cipher.hpp"
#include "stream.hpp"
#include "rational.hpp"
#include "proj_auth.hpp"
#include "analysis.hpp"
