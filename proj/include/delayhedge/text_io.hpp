#pragma once

// Text formats: shortest round-trip float formatting, the matrix output
// blocks used by the CLI, and small parsing helpers.

#include <iosfwd>
#include <string>
#include <vector>

#include "delayhedge/matrix_core.hpp"

namespace delayhedge {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Writes `# name rows cols` followed by the rows of m, entries separated by
/// single spaces.
void write_matrix_block(std::ostream& out, const std::string& name,
                        const Matrix<double>& m);

/// Writes a 1 x 1 block holding a scalar.
void write_scalar_block(std::ostream& out, const std::string& name,
                        double value);

/// Parses whitespace-separated reals from a file; throws ParseError.
std::vector<double> parse_reals_file(const std::string& path);

}  // namespace delayhedge
