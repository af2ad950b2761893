#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "weldcrack/ecosystem.hpp"
#include "weldcrack/rng.hpp"

using namespace weldcrack;

namespace {

WeldParameters random_validated(Rng& rng) {
    AdmissibleRanges r;
    std::array<double, WeldParameters::kDim> a{};
    for (int i = 0; i < WeldParameters::kDim; ++i) a[i] = rng.uniform(r.lo[i], r.hi[i]);
    if (a[3] > a[2]) a[3] = a[2];
    return WeldParameters::from_array(a);
}

Dataset random_reference(int n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset out;
    const ModelParameters theta = default_refined_params();
    for (int i = 0; i < n; ++i) {
        LabeledSample s;
        s.params = random_validated(rng);
        s.label = classify(crack_probability(cpi_canonical(s.params, theta)));
        s.source = Source::original;
        out.push_back(s);
    }
    return out;
}

// Textbook k-th nearest neighbor in z-scored space (population stddev),
// written independently of the library routine.
std::vector<double> naive_scores(const std::vector<WeldParameters>& candidates,
                                 const Dataset& reference, int k) {
    constexpr int dim = WeldParameters::kDim;
    std::array<double, dim> mean{}, sd{};
    for (const auto& s : reference) {
        const auto a = s.params.as_array();
        for (int i = 0; i < dim; ++i) mean[i] += a[i];
    }
    for (int i = 0; i < dim; ++i) mean[i] /= static_cast<double>(reference.size());
    for (const auto& s : reference) {
        const auto a = s.params.as_array();
        for (int i = 0; i < dim; ++i) sd[i] += (a[i] - mean[i]) * (a[i] - mean[i]);
    }
    for (int i = 0; i < dim; ++i) sd[i] = std::sqrt(sd[i] / static_cast<double>(reference.size()));

    auto zdist = [&](const WeldParameters& a, const WeldParameters& b) {
        const auto x = a.as_array(), y = b.as_array();
        double s = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double scale = sd[i] > 0.0 ? sd[i] : 1.0;
            const double t = (x[i] - y[i]) / scale;
            s += t * t;
        }
        return std::sqrt(s);
    };

    const int kk = std::min<int>(k, static_cast<int>(reference.size()));
    std::vector<double> out;
    for (const auto& c : candidates) {
        std::vector<double> d;
        for (const auto& r : reference) d.push_back(zdist(c, r.params));
        std::sort(d.begin(), d.end());
        out.push_back(d[kk - 1]);
    }
    return out;
}

}  // namespace

TEST_CASE("kth neighbor scores match a naive oracle") {
    const Dataset reference = random_reference(120, 600);
    Rng rng(601);
    std::vector<WeldParameters> candidates;
    for (int i = 0; i < 300; ++i) candidates.push_back(random_validated(rng));

    for (int k : {1, 5, 120, 500}) {
        CAPTURE(k);
        const auto got = kth_neighbor_scores(candidates, reference, k);
        const auto want = naive_scores(candidates, reference, k);
        REQUIRE(got.size() == want.size());
        for (size_t i = 0; i < got.size(); ++i) {
            CAPTURE(i);
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("kth neighbor scores input validation") {
    const Dataset reference = random_reference(5, 610);
    Rng rng(611);
    std::vector<WeldParameters> candidates = {random_validated(rng)};
    CHECK_THROWS_AS(kth_neighbor_scores(candidates, Dataset{}, 5), UsageError);
    CHECK_THROWS_AS(kth_neighbor_scores(candidates, reference, 0), UsageError);
}

TEST_CASE("candidates on a reference point score zero") {
    const Dataset reference = random_reference(30, 620);
    std::vector<WeldParameters> candidates = {reference[3].params};
    const auto scores = kth_neighbor_scores(candidates, reference, 1);
    CHECK(scores[0] == doctest::Approx(0.0));
}

TEST_CASE("generate_virtual hits the target count with valid virtual samples") {
    const Dataset reference = random_reference(48, 630);
    FittedModel model;
    SparsityConfig cfg;
    cfg.target = 500;
    cfg.seed = 9;
    const Dataset out = generate_virtual(model, reference, cfg);
    REQUIRE(out.size() == 500);
    for (const auto& s : out) {
        CHECK(s.source == Source::virtual_);
        CHECK(is_validated(s.params));
        CHECK(s.label == classify(model.predict(s.params)));
    }
}

TEST_CASE("generate_virtual prefers sparse regions") {
    // Reference mass concentrated at the low-current corner; the selected
    // virtual samples should lean away from it compared to the uniform pool.
    Dataset reference;
    Rng rng(640);
    for (int i = 0; i < 60; ++i) {
        LabeledSample s;
        s.params = random_validated(rng);
        s.params.I = 50.0 + rng.uniform(0.0, 2.0);
        s.params.T_i = 20.0 + rng.uniform(0.0, 10.0);
        reference.push_back(s);
    }
    FittedModel model;
    SparsityConfig cfg;
    cfg.target = 400;
    cfg.seed = 11;
    const Dataset sparse = generate_virtual(model, reference, cfg);
    cfg.uniform_fallback = true;
    const Dataset uniform = generate_virtual(model, reference, cfg);
    auto mean_I = [](const Dataset& d) {
        double s = 0.0;
        for (const auto& x : d) s += x.params.I;
        return s / static_cast<double>(d.size());
    };
    CHECK(mean_I(sparse) > mean_I(uniform));
}

TEST_CASE("generate_virtual is deterministic per seed") {
    const Dataset reference = random_reference(32, 650);
    FittedModel model;
    SparsityConfig cfg;
    cfg.target = 200;
    cfg.seed = 21;
    const Dataset a = generate_virtual(model, reference, cfg);
    const Dataset b = generate_virtual(model, reference, cfg);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].params == b[i].params);
        CHECK(a[i].label == b[i].label);
    }
}

TEST_CASE("a never-cracking model yields only not-cracked virtual labels") {
    const Dataset reference = random_reference(32, 660);
    FittedModel model;
    model.theta.K = 0.0;  // CPI identically zero, p = 0.23 < 0.5
    SparsityConfig cfg;
    cfg.target = 100;
    const Dataset out = generate_virtual(model, reference, cfg);
    for (const auto& s : out) CHECK(s.label == Label::not_cracked);
}

TEST_CASE("generate_virtual configuration validation") {
    const Dataset reference = random_reference(8, 670);
    FittedModel model;
    SparsityConfig cfg;
    cfg.target = 0;
    CHECK_THROWS_AS(generate_virtual(model, reference, cfg), UsageError);
    cfg = {};
    cfg.pool_multiplier = 0;
    CHECK_THROWS_AS(generate_virtual(model, reference, cfg), UsageError);
    cfg = {};
    CHECK_THROWS_AS(generate_virtual(model, Dataset{}, cfg), UsageError);
}

TEST_CASE("assemble concatenates in order and assigns source weights") {
    const Dataset original = random_reference(32, 680);
    Dataset augmented = random_reference(64, 681);
    Dataset virt = random_reference(16, 682);
    const Dataset out = assemble(original, augmented, virt);
    REQUIRE(out.size() == 32 + 64 + 16);
    for (size_t i = 0; i < out.size(); ++i) {
        const auto& s = out[i];
        if (i < 32) {
            CHECK(s.source == Source::original);
            CHECK(s.weight == 5.0);
            CHECK(s.params == original[i].params);
        } else if (i < 96) {
            CHECK(s.source == Source::augmented);
            CHECK(s.weight == 1.0);
            CHECK(s.params == augmented[i - 32].params);
        } else {
            CHECK(s.source == Source::virtual_);
            CHECK(s.weight == 1.0);
            CHECK(s.params == virt[i - 96].params);
        }
    }
}

TEST_CASE("assemble honors custom weights and rejects bad input") {
    const Dataset original = random_reference(4, 690);
    EcosystemWeights w;
    w.w_original = 2.5;
    const Dataset out = assemble(original, {}, {}, w);
    for (const auto& s : out) CHECK(s.weight == 2.5);

    w.w_augmented = 0.0;
    CHECK_THROWS_AS(assemble(original, {}, {}, w), UsageError);
    CHECK_THROWS_AS(assemble({}, {}, {}), UsageError);
}
