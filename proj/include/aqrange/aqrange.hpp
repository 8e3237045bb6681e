#pragma once

#include "aqrange/exact.hpp"
#include "aqrange/io.hpp"
#include "aqrange/laws.hpp"
#include "aqrange/pairset.hpp"
#include "aqrange/radius.hpp"
#include "aqrange/semispace.hpp"
#include "aqrange/sequences.hpp"
