#pragma once

#include "dadic/ancilla.hpp"
#include "dadic/classical.hpp"
#include "dadic/ensemble.hpp"
#include "dadic/equivalence.hpp"
#include "dadic/mincut.hpp"
#include "dadic/oracle.hpp"
#include "dadic/rng.hpp"
#include "dadic/scaling.hpp"
#include "dadic/trajectory.hpp"
