#pragma once

#include "nvortex/errors.hpp"
#include "nvortex/linalg.hpp"
#include "nvortex/domain.hpp"
#include "nvortex/system.hpp"
#include "nvortex/hamiltonian.hpp"
#include "nvortex/robin.hpp"
#include "nvortex/dynamics.hpp"
#include "nvortex/symmetry.hpp"
#include "nvortex/loop.hpp"
#include "nvortex/equilibria.hpp"
#include "nvortex/periodic.hpp"
#include "nvortex/continuation.hpp"
#include "nvortex/degree.hpp"
