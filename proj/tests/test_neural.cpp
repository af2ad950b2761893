#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "weldcrack/neural.hpp"

using namespace weldcrack;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Network tiny_chain() {
    // 1-1-1 chain with dropout off; closed form checked by hand.
    Network net = zero_network({1, 1, 1});
    net.dropout1 = net.dropout2 = 0.0;
    net.W1 = {2.0};
    net.b1 = {0.5};
    net.W2 = {1.5};
    net.b2 = {-0.25};
    net.W3 = {0.8};
    net.b3 = {0.1};
    return net;
}

Dataset separable_dataset(int n, std::uint64_t seed) {
    Rng rng(seed);
    AdmissibleRanges r;
    Dataset out;
    for (int i = 0; i < n; ++i) {
        LabeledSample s;
        std::array<double, WeldParameters::kDim> a{};
        for (int j = 0; j < WeldParameters::kDim; ++j) a[j] = rng.uniform(r.lo[j], r.hi[j]);
        if (a[3] > a[2]) a[3] = a[2];
        s.params = WeldParameters::from_array(a);
        s.label = s.params.I > 75.0 ? Label::cracked : Label::not_cracked;
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("init_network shapes, zero biases, and per-seed determinism") {
    const Network a = init_network(12);
    CHECK(a.W1.size() == 64u * 9u);
    CHECK(a.W2.size() == 32u * 64u);
    CHECK(a.W3.size() == 32u);
    CHECK(a.parameter_count() == 64u * 9u + 64u + 32u * 64u + 32u + 32u + 1u);
    for (double b : a.b1) CHECK(b == 0.0);
    for (double b : a.b2) CHECK(b == 0.0);
    CHECK(a.b3[0] == 0.0);

    const Network b = init_network(12);
    const Network c = init_network(13);
    CHECK(a.flatten() == b.flatten());
    CHECK(a.flatten() != c.flatten());
}

TEST_CASE("He initialization scale on the first layer") {
    // Aggregate over seeds: empirical stddev of W1 should sit near sqrt(2/9).
    double sum = 0.0, sq = 0.0;
    long n = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Network net = init_network(seed);
        for (double w : net.W1) {
            sum += w;
            sq += w * w;
            ++n;
        }
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    const double target = std::sqrt(2.0 / 9.0);
    CHECK(std::abs(mean) < 0.05);
    CHECK(sd == doctest::Approx(target).epsilon(0.20));
}

TEST_CASE("zero network outputs one half everywhere") {
    const Network net = zero_network();
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> x(9);
        for (auto& v : x) v = rng.uniform(-3.0, 3.0);
        CHECK(forward(net, x, ForwardMode::eval) == 0.5);
    }
}

TEST_CASE("hand-built chain matches the closed form") {
    const Network net = tiny_chain();
    // positive path: both ReLUs active
    const double z1 = 2.0 * 0.7 + 0.5;
    const double z2 = 1.5 * z1 - 0.25;
    const double z3 = 0.8 * z2 + 0.1;
    CHECK(forward(net, {0.7}, ForwardMode::eval) == doctest::Approx(sigmoid(z3)).epsilon(1e-14));
    // first ReLU clamps, second clamps too (b2 negative)
    CHECK(forward(net, {-1.0}, ForwardMode::eval) ==
          doctest::Approx(sigmoid(0.1)).epsilon(1e-14));
}

TEST_CASE("forward input validation") {
    const Network net = zero_network();
    CHECK_THROWS_AS(forward(net, {1.0, 2.0}, ForwardMode::eval), UsageError);
    CHECK_THROWS_AS(forward(net, std::vector<double>(9, 0.0), ForwardMode::train), UsageError);
    std::vector<double> x(9, 0.0);
    x[4] = std::nan("");
    CHECK_THROWS_AS(forward(net, x, ForwardMode::eval), DomainError);
}

TEST_CASE("analytic gradients match finite differences") {
    Network net = init_network(21, {9, 4, 3});
    net.dropout1 = net.dropout2 = 0.0;

    Rng rng(22);
    // keep every pre-activation away from the ReLU kink
    for (auto& b : net.b1) b = rng.uniform(0.1, 0.5);
    for (auto& b : net.b2) b = rng.uniform(0.1, 0.5);
    Batch batch;
    for (int i = 0; i < 8; ++i) {
        std::vector<double> x(9);
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        batch.x.push_back(x);
        batch.y.push_back(rng.uniform() < 0.5 ? 0.0 : 1.0);
        batch.weight.push_back(rng.uniform(0.5, 3.0));
    }

    const double l2 = 1e-4;
    std::vector<double> grad;
    loss_and_gradients(net, batch, l2, grad);

    std::vector<double> params = net.flatten();
    REQUIRE(grad.size() == params.size());
    auto loss_at = [&](const std::vector<double>& p) {
        Network n2 = net;
        n2.unflatten(p);
        std::vector<double> g;
        return loss_and_gradients(n2, batch, l2, g);
    };
    const double step = 1e-6;
    for (size_t j = 0; j < params.size(); ++j) {
        std::vector<double> p = params;
        p[j] = params[j] + step;
        const double fp = loss_at(p);
        p[j] = params[j] - step;
        const double fm = loss_at(p);
        const double fd = (fp - fm) / (2.0 * step);
        CAPTURE(j);
        CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("loss is invariant to uniform weight rescaling") {
    Network net = init_network(31, {9, 4, 3});
    net.dropout1 = net.dropout2 = 0.0;
    Rng rng(32);
    Batch batch;
    for (int i = 0; i < 6; ++i) {
        std::vector<double> x(9);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        batch.x.push_back(x);
        batch.y.push_back(i % 2 == 0 ? 1.0 : 0.0);
        batch.weight.push_back(rng.uniform(0.5, 2.0));
    }
    std::vector<double> g1, g2;
    const double l1 = loss_and_gradients(net, batch, 1e-4, g1);
    for (auto& w : batch.weight) w *= 2.0;
    const double l2v = loss_and_gradients(net, batch, 1e-4, g2);
    CHECK(l1 == doctest::Approx(l2v).epsilon(1e-14));
    for (size_t j = 0; j < g1.size(); ++j) CHECK(g1[j] == doctest::Approx(g2[j]).epsilon(1e-12));
}

TEST_CASE("inverted dropout keeps the expected pre-activation") {
    // Single active unit: in train mode logit(p) is the dropout-scaled a1, so
    // its average over many masks should recover the eval-mode value.
    Network net = tiny_chain();
    net.dropout1 = 0.3;
    net.W2 = {1.0};
    net.b2 = {0.0};
    net.W3 = {1.0};
    net.b3 = {0.0};
    const double a1 = 2.0 * 0.7 + 0.5;  // eval-mode activation
    Rng rng(41);
    double sum = 0.0;
    int zeros = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double p = forward(net, {0.7}, ForwardMode::train, &rng);
        const double z = std::log(p / (1.0 - p));
        sum += z;
        if (z == 0.0) ++zeros;
    }
    CHECK(sum / n == doctest::Approx(a1).epsilon(0.01));
    CHECK(static_cast<double>(zeros) / n == doctest::Approx(0.3).epsilon(0.06));
}

TEST_CASE("training separates a linearly separable dataset") {
    const Dataset data = separable_dataset(600, 51);
    TrainConfig cfg;
    cfg.max_epochs = 100;
    cfg.batch_size = 32;
    cfg.lr0 = 0.005;
    cfg.patience = 30;
    cfg.seed = 1;
    Network net = init_network(52, {9, 16, 8});
    const TrainResult r = train(net, data, cfg);
    const Metrics m = evaluate(r.net, data);
    CHECK(m.accuracy >= 0.99);
}

TEST_CASE("training history and result are deterministic per seed") {
    const Dataset data = separable_dataset(200, 61);
    TrainConfig cfg;
    cfg.max_epochs = 10;
    cfg.seed = 4;
    const TrainResult a = train(init_network(62, {9, 8, 4}), data, cfg);
    const TrainResult b = train(init_network(62, {9, 8, 4}), data, cfg);
    CHECK(a.net.flatten() == b.net.flatten());
    REQUIRE(a.history.size() == b.history.size());
    for (size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].train_loss == b.history[i].train_loss);
        CHECK(a.history[i].val_loss == b.history[i].val_loss);
    }
    CHECK(a.best_epoch == b.best_epoch);
}

TEST_CASE("learning-rate schedule is recorded and decays") {
    const Dataset data = separable_dataset(120, 71);
    TrainConfig cfg;
    cfg.max_epochs = 5;
    cfg.patience = 10;
    const TrainResult r = train(init_network(72, {9, 8, 4}), data, cfg);
    REQUIRE(r.history.size() == 5);
    for (int e = 0; e < 5; ++e)
        CHECK(r.history[e].lr == doctest::Approx(0.001 * std::pow(0.96, e)).epsilon(1e-12));
}

TEST_CASE("zero learning rate triggers the patience stop") {
    const Dataset data = separable_dataset(150, 81);
    TrainConfig cfg;
    cfg.lr0 = 0.0;
    cfg.max_epochs = 200;
    cfg.patience = 7;
    const TrainResult r = train(init_network(82, {9, 8, 4}), data, cfg);
    // epoch 0 sets the best; 7 stalls then stop
    CHECK(r.history.size() == 8);
    CHECK(r.best_epoch == 0);
}

TEST_CASE("best checkpoint is restored") {
    const Dataset data = separable_dataset(250, 91);
    TrainConfig cfg;
    cfg.max_epochs = 30;
    cfg.seed = 6;
    const TrainResult r = train(init_network(92, {9, 8, 4}), data, cfg);
    double best = r.history.front().val_loss;
    int best_epoch = 0;
    for (const auto& h : r.history) {
        if (h.val_loss < best) {
            best = h.val_loss;
            best_epoch = h.epoch;
        }
    }
    CHECK(r.best_epoch == best_epoch);
}

TEST_CASE("training rejects a single-class dataset") {
    Dataset data = separable_dataset(100, 95);
    for (auto& s : data) s.label = Label::cracked;
    TrainConfig cfg;
    CHECK_THROWS_AS(train(init_network(1), data, cfg), UsageError);
    CHECK_THROWS_AS(train(init_network(1), Dataset{}, cfg), UsageError);
}

TEST_CASE("evaluate fixture: confusion matrix of the zero network") {
    // p = 0.5 is not > 0.5, so everything is predicted not-cracked.
    Dataset data = separable_dataset(40, 97);
    int cracked = 0;
    for (const auto& s : data) cracked += s.label == Label::cracked ? 1 : 0;
    const Metrics m = evaluate(zero_network(), data);
    CHECK(m.confusion[1][0] == cracked);
    CHECK(m.confusion[0][0] == 40 - cracked);
    CHECK(m.confusion[0][1] == 0);
    CHECK(m.confusion[1][1] == 0);
    CHECK(m.accuracy == doctest::Approx((40.0 - cracked) / 40.0));
}

TEST_CASE("weighted accuracy uses the sample weights") {
    Dataset data;
    LabeledSample a;  // correctly classified by the zero network
    a.params = {60.0, 30.0, 10.0, 5.0, 100.0, 300.0, 200.0, 8.0, 2.0};
    a.label = Label::not_cracked;
    a.weight = 3.0;
    LabeledSample b = a;  // misclassified
    b.label = Label::cracked;
    b.weight = 1.0;
    data.push_back(a);
    data.push_back(b);
    const Metrics m = evaluate(zero_network(), data);
    CHECK(m.accuracy == doctest::Approx(0.5));
    CHECK(m.weighted_accuracy == doctest::Approx(0.75));
}

TEST_CASE("save and load round-trip bitwise") {
    const Dataset data = separable_dataset(150, 98);
    TrainConfig cfg;
    cfg.max_epochs = 5;
    const TrainResult r = train(init_network(99, {9, 8, 4}), data, cfg);

    const std::string path = "test_network_roundtrip.txt";
    save_network(path, r.net);
    const Network back = load_network(path);
    std::remove(path.c_str());

    CHECK(back.flatten() == r.net.flatten());
    CHECK(back.mean == r.net.mean);
    CHECK(back.stddev == r.net.stddev);
    CHECK(back.dropout1 == r.net.dropout1);
    const WeldParameters p = {80.0, 30.0, 10.0, 5.0, 100.0, 300.0, 200.0, 8.0, 2.0};
    CHECK(predict(back, p) == predict(r.net, p));
}

TEST_CASE("network file errors") {
    CHECK_THROWS_AS(load_network("no_such_network_file.txt"), UsageError);
    const std::string path = "test_network_bad.txt";
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("not a network\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_network(path), UsageError);
    std::remove(path.c_str());
}
