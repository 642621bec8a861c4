#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

namespace invlift {

/* Plain text matrix format used by every serialized artifact:
 *
 *     n_rows n_cols
 *     a_11 a_12 ... a_1c
 *     ...
 *
 * Entries are written with enough digits to round-trip doubles exactly.
 * Polytopes store the augmented matrix [H | h] in this format, so n_cols
 * is the state dimension plus one. */

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& is);

std::string matrix_to_string(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_string(const std::string& text);

/* CSV helpers for point sets; header is "x1,x2,...".  Used by the vertex
 * and raster outputs. */
void write_points_csv(std::ostream& os, const Eigen::MatrixXd& rows_as_points);
Eigen::MatrixXd read_points_csv(std::istream& is);

}  // namespace invlift
