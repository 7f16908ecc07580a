#pragma once

#include "spinclone/analytic.hpp"
#include "spinclone/dynamics.hpp"
#include "spinclone/errors.hpp"
#include "spinclone/hamiltonian.hpp"
#include "spinclone/noise.hpp"
#include "spinclone/parallel.hpp"
#include "spinclone/report.hpp"
#include "spinclone/search.hpp"
#include "spinclone/sector.hpp"
#include "spinclone/topology.hpp"
