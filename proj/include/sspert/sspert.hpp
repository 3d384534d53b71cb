#pragma once

#include "config.hpp"
#include "epsseries.hpp"
#include "errors.hpp"
#include "expseries.hpp"
#include "oracle.hpp"
#include "params.hpp"
#include "perturbation.hpp"
#include "report.hpp"
