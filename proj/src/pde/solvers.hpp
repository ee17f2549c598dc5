#pragma once

#include "pinnproj/pde.hpp"

namespace pinnproj::solvers {

Field advection(const PdeSpec& spec, const Grid& grid, const SolverOptions& opt);
Field wave(const PdeSpec& spec, const Grid& grid, const SolverOptions& opt);
Field kdv(const PdeSpec& spec, const Grid& grid, const SolverOptions& opt);
Field reaction_diffusion(const PdeSpec& spec, const Grid& grid, const SolverOptions& opt);

}  // namespace pinnproj::solvers
