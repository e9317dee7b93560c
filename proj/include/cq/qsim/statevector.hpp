#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cq::qsim {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 12;

enum class Errc { BadQubit, BadLength };

class Error : public std::invalid_argument {
public:
    Error(Errc code, const std::string& detail)
        : std::invalid_argument((code == Errc::BadQubit ? "BadQubit: " : "BadLength: ") + detail), code_(code)
    {
    }
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Pure state of n qubits. Basis index b has qubit 0 as its least
/// significant bit. Gates act in place and return *this for chaining.
class StateVector {
public:
    /// |0...0>
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, std::vector<Amplitude> amps);

    int n_qubits() const noexcept { return n_; }
    std::size_t dim() const noexcept { return amps_.size(); }
    const std::vector<Amplitude>& amps() const noexcept { return amps_; }
    Amplitude amp(std::size_t basis) const { return amps_[basis]; }

    StateVector& h(int q);
    /// Phase gate diag(1, e^{i lambda}).
    StateVector& p(int q, double lambda);
    StateVector& cz(int a, int b);
    /// [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
    StateVector& ry(int q, double theta);
    /// Multiplies amplitudes whose bits a and b differ by e^{i phi}.
    StateVector& zz_phase(int a, int b, double phi);

    double norm_squared() const;
    /// <Z x ... x Z>: sum_b (-1)^popcount(b) |amp_b|^2.
    double expectation_parity() const;

private:
    void check_qubit(int q) const;
    void check_pair(int a, int b) const;

    int n_;
    std::vector<Amplitude> amps_;
};

}  // namespace cq::qsim
