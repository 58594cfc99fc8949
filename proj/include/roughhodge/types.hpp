#ifndef ROUGHHODGE_TYPES_HPP
#define ROUGHHODGE_TYPES_HPP

#include <complex>
#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rhodge {

using Index = Eigen::Index;
using Scalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Scalar>;

}  // namespace rhodge

#endif
