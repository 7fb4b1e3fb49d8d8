#pragma once

#include <string>

#include <Eigen/Dense>

#include "sparselab/problem.hpp"
#include "sparselab/solver.hpp"

namespace sparselab {

// Matrix CSV: one header line "# rows,cols,seed", then one comma-separated
// line per row. Entries printed with 17 significant digits so a round trip
// is value-exact.
void write_matrix_csv(const std::string& path, const SensingMatrix& A);
SensingMatrix read_matrix_csv(const std::string& path);

// Vector CSV: plain, one value per line.
void write_vector_csv(const std::string& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector_csv(const std::string& path);

// Solution CSV: metadata header line
// "# lambda=..,n=..,iterations=..,duality_gap=..,atr_inf=..,pairing_defect=..,s_lambda=.."
// followed by one "index,value" row per nonzero.
void write_solution_csv(const std::string& path, const LassoSolution& sol);
LassoSolution read_solution_csv(const std::string& path);

// Format helpers shared by every CSV writer (fixed 12-significant-digit
// output keeps reruns byte-identical).
std::string fmt12(double v);
std::string fmt17(double v);

} // namespace sparselab
