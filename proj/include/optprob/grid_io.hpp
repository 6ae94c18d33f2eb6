#pragma once

#include <iosfwd>
#include <string>

#include "optprob/grid.hpp"

namespace optprob {

/// Wigner grid file, CSV:
///   line 1:  q_min,q_max,n_q,p_min,p_max,n_p,purity
///   then n_q lines of n_p comma-separated values (row = fixed q, ascending q;
///   columns ascending p).
/// Parse failures throw std::runtime_error with a "line N:" prefix; NaN/Inf
/// values and dimension mismatches are rejected.
PhaseSpaceGrid read_grid_csv(std::istream& in);
PhaseSpaceGrid read_grid_csv_file(const std::string& path);

void write_grid_csv(std::ostream& out, const PhaseSpaceGrid& g);
void write_grid_csv_file(const std::string& path, const PhaseSpaceGrid& g);

}  // namespace optprob
