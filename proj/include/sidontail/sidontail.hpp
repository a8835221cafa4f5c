#pragma once

#include <sidontail/certreal.hpp>
#include <sidontail/algnum.hpp>
#include <sidontail/floorpow.hpp>
#include <sidontail/sidon.hpp>
#include <sidontail/measure.hpp>
#include <sidontail/aphit.hpp>
