#include "cq/qsim/statevector.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace cq::qsim {

StateVector::StateVector(int n_qubits) : n_(n_qubits)
{
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw Error(Errc::BadLength, "qubit count " + std::to_string(n_qubits) + " outside [1, 12]");
    }
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<Amplitude> amps) : StateVector(n_qubits)
{
    if (amps.size() != amps_.size()) {
        throw Error(Errc::BadLength, "expected " + std::to_string(amps_.size()) + " amplitudes");
    }
    amps_ = std::move(amps);
}

void StateVector::check_qubit(int q) const
{
    if (q < 0 || q >= n_) throw Error(Errc::BadQubit, "qubit " + std::to_string(q) + " of " + std::to_string(n_));
}

void StateVector::check_pair(int a, int b) const
{
    check_qubit(a);
    check_qubit(b);
    if (a == b) throw Error(Errc::BadQubit, "two-qubit gate on identical qubits " + std::to_string(a));
}

StateVector& StateVector::h(int q)
{
    check_qubit(q);
    const std::size_t bit = std::size_t{1} << q;
    const double s = std::numbers::sqrt2 / 2.0;
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if (b & bit) continue;
        const Amplitude a0 = amps_[b];
        const Amplitude a1 = amps_[b | bit];
        amps_[b] = s * (a0 + a1);
        amps_[b | bit] = s * (a0 - a1);
    }
    return *this;
}

StateVector& StateVector::p(int q, double lambda)
{
    check_qubit(q);
    const std::size_t bit = std::size_t{1} << q;
    const Amplitude phase = std::polar(1.0, lambda);
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if (b & bit) amps_[b] *= phase;
    }
    return *this;
}

StateVector& StateVector::cz(int a, int b)
{
    check_pair(a, b);
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) == mask) amps_[i] = -amps_[i];
    }
    return *this;
}

StateVector& StateVector::ry(int q, double theta)
{
    check_qubit(q);
    const std::size_t bit = std::size_t{1} << q;
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        if (b & bit) continue;
        const Amplitude a0 = amps_[b];
        const Amplitude a1 = amps_[b | bit];
        amps_[b] = c * a0 - s * a1;
        amps_[b | bit] = s * a0 + c * a1;
    }
    return *this;
}

StateVector& StateVector::zz_phase(int a, int b, double phi)
{
    check_pair(a, b);
    const Amplitude phase = std::polar(1.0, phi);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const bool qa = (i >> a) & 1u;
        const bool qb = (i >> b) & 1u;
        if (qa != qb) amps_[i] *= phase;
    }
    return *this;
}

double StateVector::norm_squared() const
{
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

double StateVector::expectation_parity() const
{
    double e = 0.0;
    for (std::size_t b = 0; b < amps_.size(); ++b) {
        const double prob = std::norm(amps_[b]);
        e += (std::popcount(b) % 2 == 0) ? prob : -prob;
    }
    return e;
}

}  // namespace cq::qsim
