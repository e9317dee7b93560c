#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cq::testing {

using cd = std::complex<double>;
using DenseMatrix = std::vector<std::vector<cd>>;

/// Independent dense-matrix model of the classifier circuit: every gate is
/// expanded to a full 2^n x 2^n unitary via Kronecker products, and the
/// pairwise data phase is built the textbook way as CNOT . P(phi) . CNOT.
DenseMatrix identity(std::size_t dim);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix single_qubit(int n, int q, const DenseMatrix& u);
DenseMatrix cnot(int n, int control, int target);
std::vector<cd> apply(const DenseMatrix& m, const std::vector<cd>& v);

std::vector<cd> dense_encode(std::span<const double> x);
std::vector<cd> dense_pqc_state(std::span<const double> x, std::span<const double> theta);
/// (sum_b (-1)^popcount(b) |psi_b|^2 + 1) / 2
double dense_pqc_probability(std::span<const double> x, std::span<const double> theta);

}  // namespace cq::testing
