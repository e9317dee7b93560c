#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cq/nk/layers.hpp"
#include "cq/nk/losses.hpp"
#include "cq/nk/metrics.hpp"
#include "cq/nk/optim.hpp"
#include "cq/nk/rng.hpp"
#include "cq/nk/tensor.hpp"
#include "support/gradcheck.hpp"

using namespace cq::nk;
using cq::testing::numeric_gradient;
using cq::testing::project;
using cq::testing::random_tensor;
using cq::testing::relative_error;

namespace {

constexpr int kSeeds = 20;
constexpr double kLayerTol = 1e-3;

// Values spaced 0.01 apart in random order, so no finite-difference probe
// crosses a max or a relu kink.
Tensor separated_tensor(const Shape& shape, Rng& rng)
{
    Tensor t(shape);
    std::vector<std::size_t> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    const float offset = -0.005f * static_cast<float>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[order[i]] = offset + 0.01f * static_cast<float>(i) + 0.005f;
    return t;
}

Tensor naive_conv(const Tensor& x, const Tensor& w, const Tensor& b, int stride)
{
    const std::size_t cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
    const std::size_t cout = w.dim(0), k = w.dim(2);
    const std::size_t ho = (h - k) / stride + 1, wo = (wd - k) / stride + 1;
    Tensor y({cout, ho, wo});
    for (std::size_t o = 0; o < cout; ++o)
        for (std::size_t i = 0; i < ho; ++i)
            for (std::size_t j = 0; j < wo; ++j) {
                double s = b[o];
                for (std::size_t c = 0; c < cin; ++c)
                    for (std::size_t u = 0; u < k; ++u)
                        for (std::size_t v = 0; v < k; ++v)
                            s += static_cast<double>(x.at(c, i * stride + u, j * stride + v)) *
                                 w[((o * cin + c) * k + u) * k + v];
                y.at(o, i, j) = static_cast<float>(s);
            }
    return y;
}

}  // namespace

TEST(Tensor, ShapeAndFill)
{
    Tensor t({2, 3, 4}, 1.5f);
    EXPECT_EQ(t.size(), 24u);
    EXPECT_EQ(t.rank(), 3u);
    EXPECT_EQ(t.at(1, 2, 3), 1.5f);
    EXPECT_THROW(Tensor({2, 2}, std::vector<float>(3)), ShapeError);
    EXPECT_THROW(t.reshaped({5, 5}), ShapeError);
    EXPECT_EQ(t.reshaped({24}).shape(), Shape{24});
}

TEST(Rng, DeterministicAndLabelled)
{
    Rng a = Rng::derive(7, "dropout");
    Rng b = Rng::derive(7, "dropout");
    Rng c = Rng::derive(7, "shuffle");
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        EXPECT_EQ(va, b.next_u64());
        EXPECT_NE(va, c.next_u64());
    }
}

TEST(Rng, UniformAndNormalMoments)
{
    Rng r(123);
    double su = 0, sn = 0, sn2 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = r.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 0.01);
    EXPECT_NEAR(sn / n, 0.0, 0.02);
    EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

TEST(Rng, BelowCoversRange)
{
    Rng r(5);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) ++hits[r.below(7)];
    for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Conv2d, AllOnesFixture)
{
    Tensor x({1, 3, 3}, 1.0f), w({1, 1, 2, 2}, 1.0f), b({1}, 0.0f);
    const Tensor y = conv2d(x, w, b);
    ASSERT_EQ(y.shape(), (Shape{1, 2, 2}));
    for (float v : y.data()) EXPECT_EQ(v, 4.0f);
}

TEST(Conv2d, TrunkShape)
{
    Tensor x({1, 128, 128}, 0.5f), w({2, 1, 5, 5}, 0.1f), b({2});
    EXPECT_EQ(conv2d(x, w, b).shape(), (Shape{2, 124, 124}));
    EXPECT_EQ(conv2d_output_shape({2, 62, 62}, {4, 2, 5, 5}, 1, Padding::Valid), (Shape{4, 58, 58}));
}

TEST(Conv2d, ZeroWeightsGiveBias)
{
    Tensor x({2, 5, 5}, 3.0f), w({3, 2, 3, 3}, 0.0f), b({3}, std::vector<float>{0.5f, -1.0f, 2.0f});
    const Tensor y = conv2d(x, w, b);
    for (std::size_t o = 0; o < 3; ++o)
        for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(y[o * 9 + i], b[o]);
}

TEST(Conv2d, MatchesNaiveLoop)
{
    for (int seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        for (int stride : {1, 2}) {
            Tensor x = random_tensor({2, 7, 7}, rng), w = random_tensor({3, 2, 3, 3}, rng), b = random_tensor({3}, rng);
            const Tensor y = conv2d(x, w, b, stride);
            const Tensor ref = naive_conv(x, w, b, stride);
            ASSERT_EQ(y.shape(), ref.shape());
            for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-5);
        }
    }
}

TEST(Conv2d, SamePaddingKeepsSize)
{
    Rng rng(3);
    Tensor x = random_tensor({2, 6, 5}, rng), w = random_tensor({4, 2, 3, 3}, rng), b({4});
    const Tensor y = conv2d(x, w, b, 1, Padding::Same);
    EXPECT_EQ(y.shape(), (Shape{4, 6, 5}));
    // Equivalent to valid conv on an explicitly zero-padded input.
    Tensor xp({2, 8, 7});
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 5; ++j) xp.at(c, i + 1, j + 1) = x.at(c, i, j);
    const Tensor ref = naive_conv(xp, w, b, 1);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-5);
}

TEST(Conv2d, RejectsBadShapes)
{
    Tensor x({1, 6, 6}), w({1, 2, 3, 3}), b({1});
    EXPECT_THROW(conv2d(x, w, b), ShapeError);
    Tensor w2({1, 1, 3, 3});
    EXPECT_THROW(conv2d(x, w2, b, 2), ShapeError);  // (6-3) not divisible by 2
    EXPECT_THROW(conv2d(x, Tensor({1, 1, 2, 2}), b, 1, Padding::Same), ShapeError);
}

TEST(Conv2d, Linearity)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(seed);
        Tensor x = random_tensor({2, 6, 6}, rng), y = random_tensor({2, 6, 6}, rng);
        Tensor w = random_tensor({3, 2, 3, 3}, rng), zero_b({3});
        const float a = static_cast<float>(rng.uniform(-2, 2)), c = static_cast<float>(rng.uniform(-2, 2));
        Tensor mix({2, 6, 6});
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * x[i] + c * y[i];
        const Tensor lhs = conv2d(mix, w, zero_b);
        const Tensor cx = conv2d(x, w, zero_b), cy = conv2d(y, w, zero_b);
        for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], a * cx[i] + c * cy[i], 1e-5);
    }
}

TEST(GradCheck, Conv2dValidAndStrided)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        for (int stride : {1, 2}) {
            Rng rng(1000 + seed);
            Tensor x = random_tensor({2, 7, 7}, rng), w = random_tensor({3, 2, 3, 3}, rng), b = random_tensor({3}, rng);
            const Tensor r = random_tensor(conv2d_output_shape(x.shape(), w.shape(), stride, Padding::Valid), rng);
            auto loss = [&] { return project(conv2d(x, w, b, stride), r); };
            const Conv2dGrads g = conv2d_backward(x, w, r, stride);
            EXPECT_LE(relative_error(g.dx.data(), numeric_gradient(loss, x)), kLayerTol) << seed;
            EXPECT_LE(relative_error(g.dw.data(), numeric_gradient(loss, w)), kLayerTol) << seed;
            EXPECT_LE(relative_error(g.db.data(), numeric_gradient(loss, b)), kLayerTol) << seed;
        }
    }
}

TEST(GradCheck, Conv2dSame)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(2000 + seed);
        Tensor x = random_tensor({2, 5, 6}, rng), w = random_tensor({2, 2, 3, 3}, rng), b = random_tensor({2}, rng);
        const Tensor r = random_tensor({2, 5, 6}, rng);
        auto loss = [&] { return project(conv2d(x, w, b, 1, Padding::Same), r); };
        const Conv2dGrads g = conv2d_backward(x, w, r, 1, Padding::Same);
        EXPECT_LE(relative_error(g.dx.data(), numeric_gradient(loss, x)), kLayerTol);
        EXPECT_LE(relative_error(g.dw.data(), numeric_gradient(loss, w)), kLayerTol);
        EXPECT_LE(relative_error(g.db.data(), numeric_gradient(loss, b)), kLayerTol);
    }
}

TEST(MaxPool, Fixtures)
{
    const Tensor x({1, 2, 2}, std::vector<float>{1, 2, 3, 4});
    const Tensor y = maxpool2x2(x);
    ASSERT_EQ(y.size(), 1u);
    EXPECT_EQ(y[0], 4.0f);
    EXPECT_EQ(maxpool2x2(Tensor({2, 124, 124})).shape(), (Shape{2, 62, 62}));
    EXPECT_EQ(maxpool2x2(Tensor({4, 58, 58})).shape(), (Shape{4, 29, 29}));
    EXPECT_EQ(maxpool2x2(Tensor({1, 5, 7})).shape(), (Shape{1, 2, 3}));
}

TEST(MaxPool, TieRoutesToTopLeft)
{
    const Tensor x({1, 2, 2}, 3.0f);
    std::vector<std::uint32_t> arg;
    maxpool2x2(x, &arg);
    const Tensor dx = maxpool2x2_backward(x.shape(), arg, Tensor({1, 1, 1}, 1.0f));
    EXPECT_EQ(dx.storage(), (std::vector<float>{1, 0, 0, 0}));
}

TEST(GradCheck, MaxPool)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(3000 + seed);
        Tensor x = separated_tensor({2, 6, 7}, rng);
        std::vector<std::uint32_t> arg;
        const Tensor y = maxpool2x2(x, &arg);
        const Tensor r = random_tensor(y.shape(), rng);
        auto loss = [&] { return project(maxpool2x2(x), r); };
        const Tensor dx = maxpool2x2_backward(x.shape(), arg, r);
        EXPECT_LE(relative_error(dx.data(), numeric_gradient(loss, x)), kLayerTol);
    }
}

TEST(Relu, FixturesAndGradient)
{
    const Tensor y = relu(Tensor({2}, std::vector<float>{-1, 2}));
    EXPECT_EQ(y.storage(), (std::vector<float>{0, 2}));
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(4000 + seed);
        Tensor x = separated_tensor({3, 4}, rng);
        const Tensor r = random_tensor(x.shape(), rng);
        auto loss = [&] { return project(relu(x), r); };
        EXPECT_LE(relative_error(relu_backward(x, r).data(), numeric_gradient(loss, x)), kLayerTol);
    }
}

TEST(Dense, IdentityAndGradient)
{
    Tensor eye({3, 3});
    for (std::size_t i = 0; i < 3; ++i) eye[i * 4] = 1.0f;
    const Tensor x({3}, std::vector<float>{0.25f, -2.0f, 7.0f});
    EXPECT_EQ(dense(x, eye, Tensor({3})), x);
    EXPECT_THROW(dense(Tensor({4}), eye, Tensor({3})), ShapeError);

    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(5000 + seed);
        Tensor xin = random_tensor({2, 3, 2}, rng), w = random_tensor({4, 12}, rng), b = random_tensor({4}, rng);
        const Tensor r = random_tensor({4}, rng);
        auto loss = [&] { return project(dense(xin, w, b), r); };
        const DenseGrads g = dense_backward(xin, w, r);
        EXPECT_EQ(g.dx.shape(), xin.shape());
        EXPECT_LE(relative_error(g.dx.data(), numeric_gradient(loss, xin)), kLayerTol);
        EXPECT_LE(relative_error(g.dw.data(), numeric_gradient(loss, w)), kLayerTol);
        EXPECT_LE(relative_error(g.db.data(), numeric_gradient(loss, b)), kLayerTol);
    }
}

TEST(Dropout, RateZeroAndEvalAreIdentity)
{
    Rng rng(9);
    Rng untouched(9);
    const Tensor x = random_tensor({10}, rng);
    Rng d(1);
    EXPECT_EQ(dropout(x, 0.0f, Mode::Train, d), x);
    EXPECT_EQ(dropout(x, 0.0f, Mode::Eval, d), x);
    EXPECT_EQ(dropout(x, 0.5f, Mode::Eval, d), x);
    EXPECT_THROW(dropout(x, 1.0f, Mode::Train, d), std::invalid_argument);
}

TEST(Dropout, ExpectationMatchesInput)
{
    const std::size_t n = 10000;
    const float rate = 0.5f;
    Rng rng = Rng::derive(11, "dropout");
    const Tensor x({4}, std::vector<float>{1.0f, -2.0f, 0.5f, 3.0f});
    std::vector<double> sum(4, 0.0), sum2(4, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const Tensor y = dropout(x, rate, Mode::Train, rng);
        for (std::size_t i = 0; i < 4; ++i) {
            sum[i] += y[i];
            sum2[i] += static_cast<double>(y[i]) * y[i];
        }
    }
    for (std::size_t i = 0; i < 4; ++i) {
        const double mean = sum[i] / n;
        const double var = sum2[i] / n - mean * mean;
        const double se = std::sqrt(var / n);
        EXPECT_LE(std::abs(mean - x[i]), 3.0 * se) << i;
    }
}

TEST(GradCheck, Dropout)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(6000 + seed);
        Tensor x = random_tensor({3, 4}, rng);
        Tensor mask;
        Rng drop = Rng::derive(seed, "dropout");
        dropout(x, 0.3f, Mode::Train, drop, &mask);
        const Tensor r = random_tensor(x.shape(), rng);
        auto loss = [&] {
            Tensor y = x;
            for (std::size_t i = 0; i < y.size(); ++i) y[i] *= mask[i];
            return project(y, r);
        };
        EXPECT_LE(relative_error(dropout_backward(mask, r).data(), numeric_gradient(loss, x)), kLayerTol);
    }
}

TEST(GradCheck, ConvTranspose)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(7000 + seed);
        Tensor x = random_tensor({3, 3, 4}, rng), w = random_tensor({3, 2, 2, 2}, rng), b = random_tensor({2}, rng);
        const Tensor y = conv_transpose2x2(x, w, b);
        ASSERT_EQ(y.shape(), (Shape{2, 6, 8}));
        const Tensor r = random_tensor(y.shape(), rng);
        auto loss = [&] { return project(conv_transpose2x2(x, w, b), r); };
        const ConvTransposeGrads g = conv_transpose2x2_backward(x, w, r);
        EXPECT_LE(relative_error(g.dx.data(), numeric_gradient(loss, x)), kLayerTol);
        EXPECT_LE(relative_error(g.dw.data(), numeric_gradient(loss, w)), kLayerTol);
        EXPECT_LE(relative_error(g.db.data(), numeric_gradient(loss, b)), kLayerTol);
    }
}

TEST(ConvTranspose, ScattersKernel)
{
    const Tensor x({1, 1, 1}, 2.0f);
    const Tensor w({1, 1, 2, 2}, std::vector<float>{1, 2, 3, 4});
    const Tensor y = conv_transpose2x2(x, w, Tensor({1}, 0.5f));
    EXPECT_EQ(y.storage(), (std::vector<float>{2.5f, 4.5f, 6.5f, 8.5f}));
}

TEST(Concat, SplitInverts)
{
    Rng rng(8);
    const Tensor a = random_tensor({2, 3, 3}, rng), b = random_tensor({1, 3, 3}, rng);
    const Tensor c = concat_channels(a, b);
    EXPECT_EQ(c.shape(), (Shape{3, 3, 3}));
    auto [da, db] = split_channels(c, 2);
    EXPECT_EQ(da, a);
    EXPECT_EQ(db, b);
    EXPECT_THROW(concat_channels(a, Tensor({1, 2, 3})), ShapeError);
}

TEST(GradCheck, Softmax)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(8000 + seed);
        Tensor z = random_tensor({4}, rng, -2.0f, 2.0f);
        const Tensor r = random_tensor({4}, rng);
        const Tensor p = softmax(z);
        double s = 0;
        for (float v : p.data()) s += v;
        EXPECT_NEAR(s, 1.0, 1e-6);
        auto loss = [&] { return project(softmax(z), r); };
        EXPECT_LE(relative_error(softmax_backward(p, r).data(), numeric_gradient(loss, z)), kLayerTol);
    }
}

TEST(Sigmoid, StableAtExtremes)
{
    EXPECT_FLOAT_EQ(sigmoid(0.0f), 0.5f);
    EXPECT_EQ(sigmoid(-1000.0f), 0.0f);
    EXPECT_EQ(sigmoid(1000.0f), 1.0f);
    EXPECT_NEAR(sigmoid(2.0f), 1.0 / (1.0 + std::exp(-2.0)), 1e-7);
}

TEST(Glorot, WithinBound)
{
    Rng rng(4);
    Tensor t({10, 20});
    glorot_uniform(t, 20, 10, rng);
    const float bound = std::sqrt(6.0f / 30.0f);
    float lo = 1, hi = -1;
    for (float v : t.data()) {
        EXPECT_LE(std::abs(v), bound);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    EXPECT_LT(lo, -0.5f * bound);
    EXPECT_GT(hi, 0.5f * bound);
}

TEST(CrossEntropy, Fixtures)
{
    const Tensor y = one_hot(0, 2);
    EXPECT_EQ(y.storage(), (std::vector<float>{1, 0}));
    EXPECT_NEAR(cross_entropy(Tensor({2}, std::vector<float>{1, 0}), y).loss, 0.0, 1e-6);
    EXPECT_NEAR(cross_entropy(Tensor({2}, std::vector<float>{0.5f, 0.5f}), y).loss, std::log(2.0), 1e-6);
    // Clamp keeps an exact zero probability finite.
    const auto hard = cross_entropy(Tensor({2}, std::vector<float>{0, 1}), y);
    EXPECT_NEAR(hard.loss, -std::log(1e-7), 1e-3);
    EXPECT_TRUE(hard.grad.all_finite());

    const Tensor g({2}, std::vector<float>{0.3f, 0.7f});
    const std::vector<Tensor> gs{g, g}, ys{y, y};
    EXPECT_NEAR(cross_entropy_mean(gs, ys), cross_entropy(g, y).loss, 1e-12);
}

TEST(GradCheck, CrossEntropy)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(9000 + seed);
        Tensor g = random_tensor({3}, rng, 0.1f, 0.9f);
        const Tensor y = one_hot(rng.below(3), 3);
        auto loss = [&] { return cross_entropy(g, y).loss; };
        EXPECT_LE(relative_error(cross_entropy(g, y).grad.data(), numeric_gradient(loss, g, 1e-4)), kLayerTol);
    }
}

TEST(GradCheck, BceAndDice)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(10000 + seed);
        Tensor z = random_tensor({1, 4, 4}, rng, -3.0f, 3.0f);
        Tensor m({1, 4, 4});
        for (auto& v : m.data()) v = rng.uniform() < 0.4 ? 1.0f : 0.0f;
        auto bce = [&] { return bce_with_logits(z, m).loss; };
        auto dice = [&] { return soft_dice_loss(z, m).loss; };
        EXPECT_LE(relative_error(bce_with_logits(z, m).grad.data(), numeric_gradient(bce, z)), kLayerTol);
        EXPECT_LE(relative_error(soft_dice_loss(z, m).grad.data(), numeric_gradient(dice, z)), kLayerTol);
    }
}

TEST(Losses, BceAndDiceValues)
{
    const Tensor z({2}, std::vector<float>{0.0f, 0.0f});
    const Tensor m({2}, std::vector<float>{1.0f, 0.0f});
    EXPECT_NEAR(bce_with_logits(z, m).loss, std::log(2.0), 1e-6);
    // p = 0.5 each: 1 - (2*0.5 + 1) / (1 + 1 + 1)
    EXPECT_NEAR(soft_dice_loss(z, m).loss, 1.0 - 2.0 / 3.0, 1e-6);
    const auto d = soft_dice_loss(Tensor({2}, std::vector<float>{50, -50}), m);
    EXPECT_NEAR(d.loss, 0.0, 1e-6);
    EXPECT_GE(d.loss, 0.0);
}

TEST(GradCheck, SquaredError)
{
    for (int seed = 0; seed < kSeeds; ++seed) {
        Rng rng(11000 + seed);
        Tensor p = random_tensor({5}, rng);
        const Tensor t = random_tensor({5}, rng);
        auto loss = [&] { return squared_error(p, t).loss; };
        EXPECT_LE(relative_error(squared_error(p, t).grad.data(), numeric_gradient(loss, p)), kLayerTol);
    }
    EXPECT_DOUBLE_EQ(squared_error(Tensor({2}, std::vector<float>{1, 2}), Tensor({2}, std::vector<float>{0, 0})).loss,
                     5.0);
}

TEST(Adam, FirstStepIsLearningRate)
{
    Tensor p({3}, std::vector<float>{1.0f, 1.0f, 1.0f});
    const Tensor g({3}, std::vector<float>{0.5f, -3.0f, 1e-3f});
    AdamState s;
    adam_step(p, g, s);
    EXPECT_EQ(s.t, 1);
    EXPECT_NEAR(p[0], 1.0f - 1e-3f, 1e-7);
    EXPECT_NEAR(p[1], 1.0f + 1e-3f, 1e-7);
    EXPECT_NEAR(p[2], 1.0f - 1e-3f, 1e-6);
    EXPECT_EQ(s.m.shape(), p.shape());
    EXPECT_EQ(s.v.shape(), p.shape());
}

TEST(Adam, ZeroGradientLeavesParam)
{
    Tensor p({2}, std::vector<float>{0.3f, -0.7f});
    const Tensor before = p;
    AdamState s;
    adam_step(p, Tensor({2}), s);
    EXPECT_EQ(p, before);
}

TEST(Adam, MatchesScalarRecurrence)
{
    Tensor p({1}, 2.0f);
    AdamState s;
    double pd = 2.0, m = 0.0, v = 0.0;
    const double grads[] = {0.4, 0.4, -0.1, 2.0, 0.0};
    double prev_step = 1e9;
    for (int t = 1; t <= 5; ++t) {
        const double g = grads[t - 1];
        adam_step(p, Tensor({1}, static_cast<float>(g)), s);
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double step = 1e-3 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
        pd -= step;
        EXPECT_NEAR(p[0], pd, 1e-6);
        if (t == 2) {
            EXPECT_LE(std::abs(step), prev_step + 1e-9);
        }
        prev_step = std::abs(step);
    }
    EXPECT_EQ(s.t, 5);
}

TEST(Sgd, Step)
{
    Tensor p({1}, 1.0f);
    sgd_step(p, Tensor({1}, 1.0f), SgdState{0.1f});
    EXPECT_FLOAT_EQ(p[0], 0.9f);
}

TEST(RmsProp, ConstantGradientApproachesLr)
{
    Tensor p({1}, 0.0f);
    RmspropState s;
    s.lr = 0.01f;
    float last = 0.0f;
    for (int k = 0; k < 200; ++k) {
        const float before = p[0];
        rmsprop_step(p, Tensor({1}, 2.0f), s);
        last = before - p[0];
    }
    EXPECT_NEAR(last, 0.01f, 1e-5);
}

TEST(Adagrad, StepsShrink)
{
    Tensor p({1}, 0.0f);
    AdagradState s;
    float prev = 1e9f;
    for (int k = 0; k < 10; ++k) {
        const float before = p[0];
        adagrad_step(p, Tensor({1}, 0.5f), s);
        const float step = before - p[0];
        EXPECT_GT(step, 0.0f);
        EXPECT_LT(step, prev);
        prev = step;
    }
}

TEST(Optimizer, AllKindsKeepShapesAndFinite)
{
    for (auto kind : {OptimizerKind::Adam, OptimizerKind::Sgd, OptimizerKind::RmsProp, OptimizerKind::Adagrad}) {
        EXPECT_EQ(parse_optimizer_kind(to_string(kind)), kind);
        Rng rng(1);
        Tensor a = random_tensor({2, 3}, rng), ga = random_tensor({2, 3}, rng);
        Tensor b = random_tensor({4}, rng), gb = random_tensor({4}, rng);
        std::vector<ParamRef> params{{"a", &a, &ga}, {"b", &b, &gb}};
        EXPECT_EQ(count_scalars(params), 10u);
        Optimizer opt(kind, 0.01f);
        const Tensor a0 = a;
        for (int k = 0; k < 5; ++k) opt.step(params);
        EXPECT_EQ(a.shape(), (Shape{2, 3}));
        EXPECT_TRUE(a.all_finite());
        EXPECT_TRUE(b.all_finite());
        EXPECT_NE(a, a0);
        zero_grads(params);
        for (float v : ga.data()) EXPECT_EQ(v, 0.0f);
    }
    EXPECT_THROW(parse_optimizer_kind("lbfgs"), std::invalid_argument);
}

TEST(Metrics, Fixtures)
{
    auto m = classify_metrics({1, 0, 9, 0});
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.specificity, 1.0);
    EXPECT_EQ(m.accuracy, 1.0);

    m = classify_metrics({8, 2, 6, 4});
    EXPECT_DOUBLE_EQ(m.precision, 0.8);
    EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
    EXPECT_NEAR(m.f1, 8.0 / 11.0, 1e-15);
    EXPECT_DOUBLE_EQ(m.specificity, 0.75);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.7);

    m = classify_metrics({0, 0, 5, 5});
    EXPECT_EQ(m.precision, 0.0);
    EXPECT_EQ(m.recall, 0.0);
    EXPECT_EQ(m.f1, 0.0);
    EXPECT_EQ(classify_metrics({}).accuracy, 0.0);
}

TEST(Metrics, TenSampleFixture)
{
    // pred / actual pairs counted by hand: tp=3, fp=1, tn=4, fn=2.
    const int pred[] = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
    const int act[] = {1, 1, 1, 0, 1, 1, 0, 0, 0, 0};
    ConfusionCounts c;
    for (int i = 0; i < 10; ++i) c.add(pred[i], act[i]);
    EXPECT_EQ(c, (ConfusionCounts{3, 1, 4, 2}));
    EXPECT_EQ(c.total(), 10u);
    const auto m = classify_metrics(c);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.7);
    EXPECT_DOUBLE_EQ(m.precision, 0.75);
    EXPECT_DOUBLE_EQ(m.recall, 0.6);
    EXPECT_DOUBLE_EQ(m.specificity, 0.8);
    EXPECT_NEAR(m.f1, 2 * 0.75 * 0.6 / 1.35, 1e-15);
}

TEST(Metrics, F1IsHarmonicMean)
{
    Rng rng(2);
    for (int k = 0; k < 200; ++k) {
        ConfusionCounts c{rng.below(20), rng.below(20), rng.below(20), rng.below(20)};
        const auto m = classify_metrics(c);
        if (m.precision + m.recall > 0) {
            EXPECT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 1e-12);
        }
    }
}

TEST(DiceIou, Fixtures)
{
    const std::vector<float> a{1, 1, 0, 0}, b{0, 0, 1, 1};
    auto o = dice_iou(a, a);
    EXPECT_EQ(o.dice, 1.0);
    EXPECT_EQ(o.iou, 1.0);
    o = dice_iou(a, b);
    EXPECT_EQ(o.dice, 0.0);
    EXPECT_EQ(o.iou, 0.0);
    const std::vector<float> e(4, 0.0f);
    o = dice_iou(e, e);
    EXPECT_EQ(o.dice, 1.0);
    EXPECT_EQ(o.iou, 1.0);

    const std::vector<float> p{1, 1, 1, 1, 0, 0}, t{0, 0, 1, 1, 1, 1};
    o = dice_iou(p, t);
    EXPECT_DOUBLE_EQ(o.dice, 0.5);
    EXPECT_DOUBLE_EQ(o.iou, 1.0 / 3.0);
    EXPECT_THROW(dice_iou(p, a), ShapeError);
}

TEST(DiceIou, IouDiceIdentity)
{
    Rng rng(77);
    for (int k = 0; k < 500; ++k) {
        std::vector<float> p(30), t(30);
        for (auto& v : p) v = static_cast<float>(rng.uniform());
        for (auto& v : t) v = static_cast<float>(rng.uniform());
        const auto o = dice_iou(p, t);
        EXPECT_DOUBLE_EQ(o.iou, o.dice / (2.0 - o.dice));
    }
}
