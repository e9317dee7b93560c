#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cq/nk/rng.hpp"
#include "cq/qsim/pqc.hpp"
#include "cq/qsim/statevector.hpp"
#include "support/dense_circuit.hpp"

using namespace cq::qsim;
using cq::nk::Rng;
using std::numbers::pi;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void expect_state(const StateVector& s, const std::vector<Amplitude>& expected, double tol = 1e-12)
{
    ASSERT_EQ(s.dim(), expected.size());
    for (std::size_t b = 0; b < expected.size(); ++b) {
        EXPECT_NEAR(s.amp(b).real(), expected[b].real(), tol) << "basis " << b;
        EXPECT_NEAR(s.amp(b).imag(), expected[b].imag(), tol) << "basis " << b;
    }
}

double max_diff(const StateVector& a, const StateVector& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a.amp(i) - b.amp(i)));
    return d;
}

StateVector random_state(int n, Rng& rng)
{
    std::vector<Amplitude> a(std::size_t{1} << n);
    double norm = 0.0;
    for (auto& z : a) {
        z = {rng.normal(), rng.normal()};
        norm += std::norm(z);
    }
    for (auto& z : a) z /= std::sqrt(norm);
    return StateVector(n, a);
}

StateVector basis(int n, std::size_t b)
{
    std::vector<Amplitude> a(std::size_t{1} << n, 0.0);
    a[b] = 1.0;
    return StateVector(n, a);
}

std::vector<double> random_angles(int n, Rng& rng)
{
    std::vector<double> v(n);
    for (auto& a : v) a = rng.uniform(-pi, pi);
    return v;
}

}  // namespace

TEST(StateVector, Construction)
{
    StateVector s(3);
    EXPECT_EQ(s.dim(), 8u);
    EXPECT_EQ(s.amp(0), Amplitude(1.0));
    EXPECT_THROW(StateVector(0), Error);
    EXPECT_THROW(StateVector(kMaxQubits + 1), Error);
    EXPECT_THROW(StateVector(2, std::vector<Amplitude>(3)), Error);
    EXPECT_THROW(s.h(3), Error);
    EXPECT_THROW(s.cz(1, 1), Error);
    EXPECT_THROW(s.zz_phase(0, 0, 1.0), Error);
}

TEST(Gates, Hadamard)
{
    StateVector s(1);
    s.h(0);
    expect_state(s, {kInvSqrt2, kInvSqrt2});
    StateVector one = basis(1, 1);
    one.h(0);
    expect_state(one, {kInvSqrt2, -kInvSqrt2});
}

TEST(Gates, Phase)
{
    StateVector s(1);
    s.h(0).p(0, pi);
    expect_state(s, {kInvSqrt2, -kInvSqrt2});
    Rng rng(2);
    StateVector r = random_state(2, rng);
    StateVector r0 = r;
    r.p(1, 0.0);
    EXPECT_LE(max_diff(r, r0), 1e-15);
    r.p(0, 1.234);
    for (std::size_t b = 0; b < r.dim(); ++b) EXPECT_NEAR(std::abs(r.amp(b)), std::abs(r0.amp(b)), 1e-15);
}

TEST(Gates, ControlledZ)
{
    StateVector s = basis(2, 3);
    s.cz(0, 1);
    expect_state(s, {0, 0, 0, -1.0});
    for (std::size_t b : {0u, 1u, 2u}) {
        StateVector t = basis(2, b);
        t.cz(0, 1);
        EXPECT_EQ(t.amp(b), Amplitude(1.0));
    }
    Rng rng(3);
    StateVector a = random_state(3, rng);
    StateVector b = a;
    a.cz(0, 2);
    b.cz(2, 0);
    EXPECT_LE(max_diff(a, b), 0.0);
}

TEST(Gates, RotationY)
{
    StateVector s(1);
    s.ry(0, pi);
    expect_state(s, {0.0, 1.0});
    Rng rng(4);
    StateVector r = random_state(2, rng);
    StateVector r0 = r;
    r.ry(1, 0.0);
    EXPECT_LE(max_diff(r, r0), 0.0);
    StateVector real(2, {0.5, -0.5, 0.5, 0.5});
    real.ry(0, 0.77).ry(1, -2.1);
    for (const auto& a : real.amps()) EXPECT_EQ(a.imag(), 0.0);
}

TEST(Gates, ZZPhase)
{
    Rng rng(5);
    StateVector r = random_state(2, rng);
    StateVector r0 = r;
    r.zz_phase(0, 1, 0.0);
    EXPECT_LE(max_diff(r, r0), 0.0);
    const double phi = 0.9;
    StateVector s(2, {0.5, 0.5, 0.5, 0.5});
    s.zz_phase(0, 1, phi);
    const Amplitude e = std::polar(0.5, phi);
    expect_state(s, {0.5, e, e, 0.5});
}

TEST(Gates, InversesRestoreState)
{
    Rng rng(6);
    for (int k = 0; k < 200; ++k) {
        const int n = 1 + static_cast<int>(rng.below(3));
        const StateVector s0 = random_state(n, rng);
        const int q = static_cast<int>(rng.below(n));
        const double a = rng.uniform(-10, 10);
        StateVector s = s0;
        s.h(q).h(q);
        EXPECT_LE(max_diff(s, s0), 1e-12);
        s.p(q, a).p(q, -a);
        EXPECT_LE(max_diff(s, s0), 1e-12);
        s.ry(q, a).ry(q, -a);
        EXPECT_LE(max_diff(s, s0), 1e-12);
        if (n > 1) {
            const int r = (q + 1 + static_cast<int>(rng.below(n - 1))) % n;
            s.cz(q, r).cz(q, r);
            EXPECT_LE(max_diff(s, s0), 1e-12);
            s.zz_phase(q, r, a).zz_phase(q, r, -a);
            EXPECT_LE(max_diff(s, s0), 1e-12);
        }
    }
}

TEST(Gates, NormPreservedOverLongSequences)
{
    Rng rng(7);
    StateVector s(3);
    for (int k = 0; k < 1000; ++k) {
        const int q = static_cast<int>(rng.below(3));
        const int r = (q + 1 + static_cast<int>(rng.below(2))) % 3;
        const double a = rng.uniform(-2 * pi, 2 * pi);
        switch (rng.below(5)) {
        case 0: s.h(q); break;
        case 1: s.p(q, a); break;
        case 2: s.cz(q, r); break;
        case 3: s.ry(q, a); break;
        default: s.zz_phase(q, r, a); break;
        }
    }
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
}

TEST(Gates, MatchDenseMatrices)
{
    using namespace cq::testing;
    Rng rng(8);
    for (int k = 0; k < 50; ++k) {
        const int n = 3;
        const StateVector s0 = random_state(n, rng);
        const double a = rng.uniform(-pi, pi);
        const int q = static_cast<int>(rng.below(3));
        const int r = (q + 1) % 3;
        StateVector s = s0;
        s.zz_phase(q, r, a);
        const DenseMatrix zz = multiply(cnot(n, q, r), multiply(single_qubit(n, r, {{1.0, 0.0}, {0.0, std::polar(1.0, a)}}), cnot(n, q, r)));
        const auto ref = apply(zz, s0.amps());
        expect_state(s, ref, 1e-12);
    }
}

TEST(Parity, Fixtures)
{
    EXPECT_EQ(basis(2, 0).expectation_parity(), 1.0);
    EXPECT_EQ(basis(2, 1).expectation_parity(), -1.0);
    StateVector bell(2, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});
    EXPECT_NEAR(bell.expectation_parity(), 1.0, 1e-15);
    Rng rng(9);
    for (int k = 0; k < 100; ++k) {
        const double e = random_state(3, rng).expectation_parity();
        EXPECT_LE(std::abs(e), 1.0 + 1e-12);
    }
}

TEST(Encode, SingleQubit)
{
    const std::vector<double> x{pi / 2};
    expect_state(encode_zz(x), {kInvSqrt2, -kInvSqrt2});
}

TEST(Encode, TwoQubitsAtOrigin)
{
    const std::vector<double> x{0.0, 0.0};
    const Amplitude e = std::polar(0.5, 2 * pi * pi);
    expect_state(encode_zz(x), {0.5, e, e, 0.5});
    expect_state(encode_zz(x), cq::testing::dense_encode(x));
}

TEST(Encode, MatchesDenseOracleAndFlatMagnitudes)
{
    Rng rng(10);
    for (int n = 1; n <= 4; ++n) {
        for (int k = 0; k < 10; ++k) {
            const auto x = random_angles(n, rng);
            const StateVector s = encode_zz(x);
            expect_state(s, cq::testing::dense_encode(x), 1e-12);
            EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
            for (const auto& a : s.amps()) EXPECT_NEAR(std::abs(a), std::pow(2.0, -n / 2.0), 1e-12);
        }
    }
    EXPECT_THROW(encode_zz(std::vector<double>{}), Error);
}

TEST(Ansatz, Fixtures)
{
    Rng rng(11);
    StateVector s = random_state(2, rng);
    const StateVector s0 = s;
    apply_ansatz(s, std::vector<double>{0.0, 0.0});
    EXPECT_LE(max_diff(s, s0), 0.0);

    StateVector z(1);
    apply_ansatz(z, std::vector<double>{pi / 2});
    expect_state(z, {kInvSqrt2, kInvSqrt2});

    StateVector a = s0, b = s0;
    a.ry(0, 0.3).ry(1, 1.1);
    b.ry(1, 1.1).ry(0, 0.3);
    EXPECT_LE(max_diff(a, b), 1e-15);
    EXPECT_THROW(apply_ansatz(s, std::vector<double>{0.0}), Error);
}

TEST(Pqc, Fixtures)
{
    EXPECT_NEAR(pqc_forward(std::vector<double>{0.0}, std::vector<double>{0.0}), 0.5, 1e-15);
    const double p = pqc_forward(std::vector<double>{0.0}, std::vector<double>{pi / 2});
    EXPECT_NEAR(p, cq::testing::dense_pqc_probability(std::vector<double>{0.0}, std::vector<double>{pi / 2}), 1e-14);
    EXPECT_NEAR(p, 0.0, 1e-14);
    EXPECT_THROW(pqc_forward(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0}), Error);
}

TEST(Pqc, MatchesDenseOracleAndIsBounded)
{
    Rng rng(12);
    for (int k = 0; k < 1000; ++k) {
        const int n = 1 + static_cast<int>(rng.below(3));
        const auto x = random_angles(n, rng), t = random_angles(n, rng);
        const double p = pqc_forward(x, t);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        if (k < 100) {
            EXPECT_NEAR(p, cq::testing::dense_pqc_probability(x, t), 1e-12);
        }
    }
}

TEST(Pqc, PeriodicInTheta)
{
    Rng rng(13);
    for (int k = 0; k < 50; ++k) {
        const auto x = random_angles(3, rng);
        auto t = random_angles(3, rng);
        const double p = pqc_forward(x, t);
        t[k % 3] += 2 * pi;
        EXPECT_NEAR(pqc_forward(x, t), p, 1e-12);
    }
}

TEST(Pqc, CircuitStructure)
{
    const std::vector<double> x{0.1, 0.2, 0.3}, t{1, 2, 3};
    const Circuit c = pqc_circuit(x, t);
    // 3 H + 3 P + 3 pairs + 3 Ry
    ASSERT_EQ(c.size(), 12u);
    EXPECT_EQ(c[6].kind, GateKind::ZZPhase);
    EXPECT_EQ(c[6].q0, 0);
    EXPECT_EQ(c[6].q1, 1);
    EXPECT_EQ(c[8].q0, 1);
    EXPECT_EQ(c[8].q1, 2);
    EXPECT_NEAR(c[7].angle, 2 * (pi - 0.1) * (pi - 0.3), 1e-15);
    StateVector s = run(3, c);
    EXPECT_NEAR((s.expectation_parity() + 1) / 2, pqc_forward(x, t), 1e-15);
}

TEST(ShiftRule, CosineResponse)
{
    // n=1, x=0: <M> = cos(theta + pi/2) = -sin(theta), so dp/dtheta = -cos(theta)/2.
    for (double th : {-1.0, 0.0, 0.4, 2.5}) {
        const auto g = pqc_backward(std::vector<double>{0.0}, std::vector<double>{th}, 3.0);
        EXPECT_NEAR(g.grad_theta[0], -std::cos(th) / 2 * 3.0, 1e-12);
    }
    const auto flat = pqc_backward(std::vector<double>{0.0}, std::vector<double>{pi / 2}, 1.0);
    EXPECT_LE(std::abs(flat.grad_theta[0]), 1e-8);
}

TEST(ShiftRule, MatchesFiniteDifferences)
{
    Rng rng(14);
    const double h = 1e-5;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const int n = 1 + k % 3;
        auto x = random_angles(n, rng), t = random_angles(n, rng);
        const auto g = pqc_backward(x, t, 1.0);
        ASSERT_EQ(g.grad_x.size(), static_cast<std::size_t>(n));
        ASSERT_EQ(g.grad_theta.size(), static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double xi = x[i];
            x[i] = xi + h;
            const double xp = pqc_forward(x, t);
            x[i] = xi - h;
            const double xm = pqc_forward(x, t);
            x[i] = xi;
            worst = std::max(worst, std::abs(g.grad_x[i] - (xp - xm) / (2 * h)));
            const double ti = t[i];
            t[i] = ti + h;
            const double tp = pqc_forward(x, t);
            t[i] = ti - h;
            const double tm = pqc_forward(x, t);
            t[i] = ti;
            worst = std::max(worst, std::abs(g.grad_theta[i] - (tp - tm) / (2 * h)));
        }
    }
    EXPECT_LE(worst, 1e-6);
}

TEST(ShiftRule, UpstreamScales)
{
    const std::vector<double> x{0.3, -1.2}, t{0.7, 2.0};
    const auto g1 = pqc_backward(x, t, 1.0);
    const auto g2 = pqc_backward(x, t, -2.5);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(g2.grad_x[i], -2.5 * g1.grad_x[i], 1e-14);
        EXPECT_NEAR(g2.grad_theta[i], -2.5 * g1.grad_theta[i], 1e-14);
    }
}
