#pragma once

#include <sidontail/dyadic.hpp>
#include <sidontail/error.hpp>
#include <sidontail/interval.hpp>
#include <sidontail/polynomial.hpp>
#include <sidontail/roots.hpp>
#include <sidontail/sublevel.hpp>
