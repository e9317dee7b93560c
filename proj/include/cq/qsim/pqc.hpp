#pragma once

#include <span>
#include <vector>

#include "cq/qsim/statevector.hpp"

namespace cq::qsim {

enum class GateKind { H, P, CZ, Ry, ZZPhase };

struct Gate {
    GateKind kind;
    int q0;
    int q1 = -1;
    double angle = 0.0;

    bool parameterized() const noexcept { return kind == GateKind::P || kind == GateKind::Ry || kind == GateKind::ZZPhase; }
};

using Circuit = std::vector<Gate>;

StateVector& apply(StateVector& s, const Gate& g);
StateVector run(int n_qubits, const Circuit& circuit);

/// Single-repetition ZZ feature map: H on every qubit, P(2 x_i) on each
/// qubit, then for every pair i<j a ZZ phase of 2 (pi - x_i)(pi - x_j).
Circuit zz_feature_map(std::span<const double> x);
/// Ry(theta_i) on qubit i, in index order.
Circuit ry_ansatz(std::span<const double> theta);
/// Feature map followed by the ansatz.
Circuit pqc_circuit(std::span<const double> x, std::span<const double> theta);

StateVector encode_zz(std::span<const double> x);
StateVector& apply_ansatz(StateVector& s, std::span<const double> theta);

/// p_q = (<Z...Z> + 1) / 2 after encoding x and applying the ansatz.
double pqc_forward(std::span<const double> x, std::span<const double> theta);

struct PqcGradients {
    std::vector<double> grad_x;
    std::vector<double> grad_theta;
};

/// Gradients of upstream * p_q via the two-term shift rule
/// d<M>/d(lambda) = [f(lambda + pi/2) - f(lambda - pi/2)] / 2, applied to
/// every parameterized gate occurrence and chained back to x and theta.
PqcGradients pqc_backward(std::span<const double> x, std::span<const double> theta, double upstream);

/// Derivative of <M> w.r.t. each gate angle of `circuit`, in gate order
/// (0 for unparameterized gates).
std::vector<double> shift_rule_angle_gradients(int n_qubits, const Circuit& circuit);

}  // namespace cq::qsim
