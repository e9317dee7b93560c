#include "cq/qsim/pqc.hpp"

#include <numbers>
#include <string>

namespace cq::qsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kShift = kPi / 2.0;

int qubit_count(std::span<const double> x, std::span<const double> theta)
{
    if (x.size() != theta.size()) {
        throw Error(Errc::BadLength, "feature length " + std::to_string(x.size()) + " != parameter length " +
                                         std::to_string(theta.size()));
    }
    if (x.empty() || x.size() > static_cast<std::size_t>(kMaxQubits)) {
        throw Error(Errc::BadLength, "need 1..12 features, got " + std::to_string(x.size()));
    }
    return static_cast<int>(x.size());
}

double expectation(int n, const Circuit& circuit)
{
    return run(n, circuit).expectation_parity();
}

}  // namespace

StateVector& apply(StateVector& s, const Gate& g)
{
    switch (g.kind) {
    case GateKind::H: return s.h(g.q0);
    case GateKind::P: return s.p(g.q0, g.angle);
    case GateKind::CZ: return s.cz(g.q0, g.q1);
    case GateKind::Ry: return s.ry(g.q0, g.angle);
    case GateKind::ZZPhase: return s.zz_phase(g.q0, g.q1, g.angle);
    }
    return s;
}

StateVector run(int n_qubits, const Circuit& circuit)
{
    StateVector s(n_qubits);
    for (const auto& g : circuit) apply(s, g);
    return s;
}

Circuit zz_feature_map(std::span<const double> x)
{
    const int n = static_cast<int>(x.size());
    Circuit c;
    for (int q = 0; q < n; ++q) c.push_back({GateKind::H, q});
    for (int q = 0; q < n; ++q) c.push_back({GateKind::P, q, -1, 2.0 * x[q]});
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            c.push_back({GateKind::ZZPhase, i, j, 2.0 * (kPi - x[i]) * (kPi - x[j])});
        }
    }
    return c;
}

Circuit ry_ansatz(std::span<const double> theta)
{
    Circuit c;
    for (int q = 0; q < static_cast<int>(theta.size()); ++q) c.push_back({GateKind::Ry, q, -1, theta[q]});
    return c;
}

Circuit pqc_circuit(std::span<const double> x, std::span<const double> theta)
{
    qubit_count(x, theta);
    Circuit c = zz_feature_map(x);
    const Circuit a = ry_ansatz(theta);
    c.insert(c.end(), a.begin(), a.end());
    return c;
}

StateVector encode_zz(std::span<const double> x)
{
    if (x.empty() || x.size() > static_cast<std::size_t>(kMaxQubits)) {
        throw Error(Errc::BadLength, "need 1..12 features, got " + std::to_string(x.size()));
    }
    return run(static_cast<int>(x.size()), zz_feature_map(x));
}

StateVector& apply_ansatz(StateVector& s, std::span<const double> theta)
{
    if (theta.size() != static_cast<std::size_t>(s.n_qubits())) {
        throw Error(Errc::BadLength, "ansatz needs one angle per qubit");
    }
    for (const auto& g : ry_ansatz(theta)) apply(s, g);
    return s;
}

double pqc_forward(std::span<const double> x, std::span<const double> theta)
{
    const int n = qubit_count(x, theta);
    return (expectation(n, pqc_circuit(x, theta)) + 1.0) / 2.0;
}

std::vector<double> shift_rule_angle_gradients(int n_qubits, const Circuit& circuit)
{
    std::vector<double> grads(circuit.size(), 0.0);
    Circuit shifted = circuit;
    for (std::size_t g = 0; g < circuit.size(); ++g) {
        if (!circuit[g].parameterized()) continue;
        shifted[g].angle = circuit[g].angle + kShift;
        const double plus = expectation(n_qubits, shifted);
        shifted[g].angle = circuit[g].angle - kShift;
        const double minus = expectation(n_qubits, shifted);
        shifted[g].angle = circuit[g].angle;
        grads[g] = (plus - minus) / 2.0;
    }
    return grads;
}

PqcGradients pqc_backward(std::span<const double> x, std::span<const double> theta, double upstream)
{
    const int n = qubit_count(x, theta);
    const Circuit circuit = pqc_circuit(x, theta);
    const std::vector<double> dangle = shift_rule_angle_gradients(n, circuit);

    PqcGradients out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t g = 0; g < circuit.size(); ++g) {
        const Gate& gate = circuit[g];
        switch (gate.kind) {
        case GateKind::P:
            out.grad_x[gate.q0] += 2.0 * dangle[g];
            break;
        case GateKind::ZZPhase:
            out.grad_x[gate.q0] += -2.0 * (kPi - x[gate.q1]) * dangle[g];
            out.grad_x[gate.q1] += -2.0 * (kPi - x[gate.q0]) * dangle[g];
            break;
        case GateKind::Ry:
            out.grad_theta[gate.q0] += dangle[g];
            break;
        default:
            break;
        }
    }
    // p_q = (<M> + 1) / 2
    const double scale = upstream * 0.5;
    for (auto& v : out.grad_x) v *= scale;
    for (auto& v : out.grad_theta) v *= scale;
    return out;
}

}  // namespace cq::qsim
