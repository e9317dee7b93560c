#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cq/cqcnn/model.hpp"
#include "cq/cqcnn/train.hpp"
#include "cq/nk/losses.hpp"
#include "support/gradcheck.hpp"

using namespace cq::cqcnn;
using cq::nk::Mode;
using cq::nk::Rng;
using cq::nk::Tensor;
using cq::volio::Image2D;

namespace {

CqcnnConfig reduced(int n_qubits = 2, Head head = Head::Quantum)
{
    CqcnnConfig c;
    c.image_size = 16;
    c.n_qubits = n_qubits;
    c.fc_width = static_cast<std::size_t>(n_qubits);
    c.head = head;
    c.dropout_rate = 0.25f;
    return c;
}

Image2D random_image(std::size_t size, Rng& rng)
{
    Image2D img(size, size);
    for (auto& p : img.pixels) p = static_cast<float>(rng.uniform());
    return img;
}

std::vector<Sample> constant_set(std::size_t size, std::size_t per_class)
{
    std::vector<Sample> data;
    for (std::size_t i = 0; i < per_class; ++i) {
        data.push_back({Image2D(size, size, 0.0f), 0});
        data.push_back({Image2D(size, size, 1.0f), 1});
    }
    return data;
}

}  // namespace

TEST(Config, TrunkShapes)
{
    const CqcnnConfig c = CqcnnConfig::paper_match(3);
    EXPECT_EQ(c.trunk_sizes(), (std::vector<std::size_t>{124, 62, 58, 29}));
    EXPECT_EQ(c.flat_features(), 3364u);
    CqcnnConfig bad = reduced();
    bad.image_size = 10;
    EXPECT_THROW(bad.validate(), Error);
    bad = reduced();
    bad.fc_width = 1;
    EXPECT_THROW(bad.validate(), Error);
}

TEST(ParamCount, MatchPreset)
{
    const CqcnnConfig c = CqcnnConfig::paper_match(3);
    EXPECT_EQ(param_count(c), 13721u);
    CqcnnConfig narrow = c;
    narrow.fc_width = 3;
    EXPECT_EQ(param_count(narrow), 10356u);
    EXPECT_EQ(CqcnnModel(c).param_count(), 13721u);
    auto model = CqcnnModel(c);
    EXPECT_EQ(cq::nk::count_scalars(model.params()), 13721u);
}

TEST(ParamCount, ConvContributionIsLinear)
{
    CqcnnConfig a = CqcnnConfig::paper_match(2);
    CqcnnConfig b = a;
    b.conv1_out = 4;
    // conv1 contributes 26 per output channel; conv2 also grows through its input channels.
    const std::size_t conv1_a = a.conv1_out * 26, conv1_b = b.conv1_out * 26;
    EXPECT_EQ(conv1_b, 2 * conv1_a);
    EXPECT_EQ(param_count(b) - param_count(a), conv1_b - conv1_a + a.conv2_out * 25 * 2);
}

TEST(ParamCount, BaselineWithinOnePercent)
{
    for (int n : {2, 3}) {
        CqcnnConfig q = CqcnnConfig::paper_match(n);
        CqcnnConfig c = q;
        c.head = Head::ClassicalSoftmax;
        const double pq = static_cast<double>(param_count(q)), pc = static_cast<double>(param_count(c));
        EXPECT_LE(std::abs(pq - pc) / pq, 0.01);
    }
    CqcnnConfig c = CqcnnConfig::paper_match(3);
    c.head = Head::ClassicalSoftmax;
    EXPECT_EQ(param_count(c), 13726u);
}

TEST(Forward, GammaIsDistribution)
{
    for (Head head : {Head::Quantum, Head::ClassicalSoftmax}) {
        CqcnnConfig c = reduced(2, head);
        CqcnnModel m(c);
        Rng rng(1);
        for (int k = 0; k < 100; ++k) {
            const Tensor g = m.predict(random_image(16, rng));
            EXPECT_GE(g[0], 0.0f);
            EXPECT_LE(g[0], 1.0f);
            EXPECT_GE(g[1], 0.0f);
            EXPECT_EQ(g[0] + g[1], 1.0f) << "head " << to_string(head);
        }
    }
}

TEST(Forward, PaperSizeShapeTrace)
{
    CqcnnModel m(CqcnnConfig::paper_match(2));
    Rng rng(2);
    ForwardCache k;
    Rng drop(3);
    m.forward(random_image(128, rng), Mode::Train, drop, &k);
    EXPECT_EQ(k.a1.shape(), (cq::nk::Shape{2, 124, 124}));
    EXPECT_EQ(k.p1.shape(), (cq::nk::Shape{2, 62, 62}));
    EXPECT_EQ(k.a2.shape(), (cq::nk::Shape{4, 58, 58}));
    EXPECT_EQ(k.p2.shape(), (cq::nk::Shape{4, 29, 29}));
    EXPECT_EQ(k.flat.size(), 3364u);
    EXPECT_EQ(k.fc.size(), 4u);
    EXPECT_THROW(m.predict(Image2D(64, 64)), Error);
}

TEST(Forward, QuantumHeadOutputMap)
{
    CqcnnModel m(reduced());
    Rng rng(4);
    ForwardCache k;
    Rng drop(0);
    const Tensor g = m.forward(random_image(16, rng), Mode::Eval, drop, &k);
    EXPECT_FLOAT_EQ(k.o1, 1.0f / (1.0f + std::exp(-static_cast<float>(k.pq))));
    EXPECT_EQ(g[0], k.o1);
    EXPECT_EQ(g[1], 1.0f - k.o1);
}

TEST(Forward, ThetaPeriodicity)
{
    CqcnnModel m(reduced(3));
    m.fc_w *= 0.2f;
    Rng rng(5);
    const Image2D img = random_image(16, rng);
    const Tensor g = m.predict(img);
    m.theta[1] += 2.0f * std::numbers::pi_v<float>;
    const Tensor g2 = m.predict(img);
    EXPECT_NEAR(g[0], g2[0], 1e-5);
}

TEST(Forward, BaselineSharesTrunk)
{
    CqcnnConfig qc = reduced(2, Head::Quantum), cc = reduced(2, Head::ClassicalSoftmax);
    CqcnnModel q(qc), c(cc);
    EXPECT_EQ(q.conv1_w, c.conv1_w);
    EXPECT_EQ(q.fc_w, c.fc_w);
    Rng rng(6);
    const Image2D img = random_image(16, rng);
    EXPECT_EQ(q.features(img), c.features(img));
}

std::uint64_t regime_of(const ForwardCache& k)
{
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) { h = (h ^ v) * 1099511628211ull; };
    // Only pooling winners reach the output, so only their relu signs matter.
    for (auto i : k.arg1) mix(i * 2 + (k.a1[i] > 0.0f));
    for (auto i : k.arg2) mix(i * 2 + (k.a2[i] > 0.0f));
    return h;
}

TEST(GradCheck, FullModel)
{
    using cq::testing::numeric_gradient;
    using cq::testing::relative_error;
    std::size_t checked = 0, skipped = 0;
    for (Head head : {Head::Quantum, Head::ClassicalSoftmax}) {
        for (int seed = 0; seed < 20; ++seed) {
            CqcnnConfig c = reduced(2, head);
            c.seed = static_cast<std::uint64_t>(seed);
            CqcnnModel m(c);
            Rng rng(500 + seed);
            const Image2D img = random_image(16, rng);
            const Tensor y = cq::nk::one_hot(static_cast<std::size_t>(seed % 2), 2);
            auto probe = [&] {
                Rng drop(seed);
                ForwardCache k;
                const double l = cq::nk::cross_entropy(m.forward(img, Mode::Train, drop, &k), y).loss;
                return cq::testing::RegimeProbe{l, regime_of(k)};
            };
            Rng drop(seed);
            ForwardCache k;
            const Tensor g = m.forward(img, Mode::Train, drop, &k);
            m.zero_grad();
            m.backward(k, cq::nk::cross_entropy(g, y).grad);
            for (auto& p : m.params()) {
                std::vector<bool> crossed;
                const auto num = numeric_gradient(probe, *p.value, crossed, 1e-2);
                EXPECT_LE(relative_error(p.grad->data(), num, crossed), 1e-2)
                    << to_string(head) << " seed " << seed << " " << p.name;
                for (bool c : crossed) ++(c ? skipped : checked);
            }
        }
    }
    // Most probes stay inside one relu/pooling regime.
    EXPECT_LT(static_cast<double>(skipped), 0.2 * static_cast<double>(checked + skipped));
}

TEST(Backward, StationaryUpstreamGivesZeroThetaGrad)
{
    CqcnnModel m(reduced());
    Rng rng(7), drop(0);
    ForwardCache k;
    m.forward(random_image(16, rng), Mode::Eval, drop, &k);
    m.zero_grad();
    m.backward(k, Tensor({2}, std::vector<float>{0.3f, 0.3f}));
    for (float v : m.params()[8].grad->data()) EXPECT_EQ(v, 0.0f);
}

TEST(Backward, EvalModeDeterministic)
{
    CqcnnModel m(reduced());
    Rng rng(8);
    const Image2D img = random_image(16, rng);
    std::vector<Tensor> first;
    for (int rep = 0; rep < 2; ++rep) {
        Rng drop(rep + 100);
        ForwardCache k;
        const Tensor g = m.forward(img, Mode::Eval, drop, &k);
        m.zero_grad();
        m.backward(k, cq::nk::cross_entropy(g, cq::nk::one_hot(1, 2)).grad);
        for (std::size_t i = 0; auto& p : m.params()) {
            if (rep == 0) first.push_back(*p.grad);
            else EXPECT_EQ(*p.grad, first[i]);
            ++i;
        }
    }
}

TEST(Train, ZeroLearningRateLeavesParams)
{
    CqcnnConfig c = reduced();
    c.lr = 0.0f;
    c.dropout_rate = 0.0f;
    CqcnnModel m(c);
    const CqcnnModel before = m;
    auto data = constant_set(16, 3);
    Rng rng(9);
    for (auto& s : data)
        for (auto& p : s.image.pixels) p = static_cast<float>(rng.uniform());
    cq::nk::Optimizer opt(cq::nk::OptimizerKind::Sgd, 0.0f);
    const EpochReport r = train_epoch(m, data, opt, 1, 0);
    EXPECT_EQ(m.conv1_w, before.conv1_w);
    EXPECT_EQ(m.theta, before.theta);
    EXPECT_NEAR(r.loss, evaluate(m, data).loss, 1e-12);
}

TEST(Train, Deterministic)
{
    CqcnnConfig c = reduced();
    auto data = constant_set(16, 4);
    auto run = [&] {
        CqcnnModel m(c);
        cq::nk::Optimizer opt(cq::nk::OptimizerKind::Adam, 0.01f);
        EpochReport last;
        for (std::size_t e = 0; e < 3; ++e) last = train_epoch(m, data, opt, 42, e);
        return std::make_pair(m, last);
    };
    const auto [m1, r1] = run();
    const auto [m2, r2] = run();
    EXPECT_EQ(r1.loss, r2.loss);
    EXPECT_EQ(r1.train_acc, r2.train_acc);
    EXPECT_EQ(m1.conv1_w, m2.conv1_w);
    EXPECT_EQ(m1.fc_w, m2.fc_w);
    EXPECT_EQ(m1.theta, m2.theta);
}

TEST(Train, ThetaMoves)
{
    CqcnnConfig c = reduced();
    CqcnnModel m(c);
    const Tensor theta0 = m.theta;
    auto data = constant_set(16, 2);
    cq::nk::Optimizer opt(cq::nk::OptimizerKind::Adam, 0.01f);
    train_epoch(m, data, opt, 3, 0);
    double moved = 0;
    for (std::size_t i = 0; i < theta0.size(); ++i) moved += std::abs(m.theta[i] - theta0[i]);
    EXPECT_GT(moved, 0.0);
}

TEST(Train, SeparableConstantClasses)
{
    // A constant image reaches the head only through channels whose kernel
    // sum is positive; seeds whose initial trunk maps both classes to the
    // same features cannot learn and are excluded.
    const auto data = constant_set(16, 50);
    for (Head head : {Head::Quantum, Head::ClassicalSoftmax}) {
        int live = 0, solved = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            CqcnnConfig c = reduced(2, head);
            c.seed = seed;
            c.dropout_rate = 0.0f;
            CqcnnModel m(c);
            if (m.features(data[0].image) == m.features(data[1].image)) continue;
            ++live;
            cq::nk::Optimizer opt(cq::nk::OptimizerKind::Adam, 3e-3f);
            double acc = 0;
            for (std::size_t e = 0; e < 5 && acc < 1.0; ++e) acc = train_epoch(m, data, opt, seed, e).train_acc;
            if (acc == 1.0) ++solved;
        }
        EXPECT_GE(live, 5) << to_string(head);
        EXPECT_GE(2 * solved, live) << to_string(head) << " solved " << solved << " of " << live;
    }
}

TEST(Train, EmptyDataset)
{
    CqcnnModel m(reduced());
    cq::nk::Optimizer opt(cq::nk::OptimizerKind::Adam, 0.01f);
    EXPECT_THROW(train_epoch(m, {}, opt, 0, 0), Error);
    EXPECT_THROW(evaluate(m, {}), Error);
}

TEST(Evaluate, Fixtures)
{
    CqcnnConfig c = reduced();
    CqcnnModel m(c);
    // Force class 0 everywhere: o1 = sigmoid(large) = gamma[0].
    m.out_w[0] = 0.0f;
    m.out_b[0] = 20.0f;
    const auto data = constant_set(16, 5);
    const Evaluation ev = evaluate(m, data);
    EXPECT_EQ(ev.counts, (cq::nk::ConfusionCounts{0, 0, 5, 5}));
    EXPECT_EQ(ev.metrics.accuracy, 0.5);
    EXPECT_EQ(ev.metrics.recall, 0.0);
    EXPECT_EQ(ev.metrics.specificity, 1.0);

    const std::vector<Sample> one{{Image2D(16, 16, 0.3f), 0}};
    EXPECT_EQ(evaluate(m, one).metrics.accuracy, 1.0);
}
