#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "prcnn/training.hpp"

using namespace prcnn;

namespace {

ModelConfig tiny_config() {
    ModelConfig c;
    c.t = 4;
    c.b = 3;
    c.u = 5;
    c.d_out = 4;
    c.n1 = 3;
    c.f1 = 2;
    c.n2 = 4;
    c.f2 = 3;
    c.k = 3;
    c.dropout_p = 0.1;
    return c;
}

PixelDataset tiny_synth(std::size_t per_class, double sigma,
                        std::uint64_t seed) {
    SynthSpec spec;
    spec.t = 4;
    spec.bands = 3;
    spec.counts = {per_class, per_class, per_class};
    spec.sigma = sigma;
    spec.seed = seed;
    return synth_generate(spec);
}

// Label-only dataset; feature content is irrelevant to the splitter.
PixelDataset labels_only(const std::vector<std::pair<std::string, std::size_t>>&
                             classes) {
    PixelDataset ds;
    ds.t = 1;
    ds.b = 1;
    std::size_t total = 0;
    for (const auto& [name, n] : classes) {
        ds.class_names.push_back(name);
        total += n;
    }
    ds.x = Tensor<float>({total, 1, 1});
    ds.labels.reserve(total);
    for (std::size_t c = 0; c < classes.size(); ++c)
        ds.labels.insert(ds.labels.end(), classes[c].second,
                         static_cast<std::uint16_t>(c));
    ds.provenance = "labels only";
    return ds;
}

}  // namespace

TEST_CASE("cross entropy reference values", "[training]") {
    Tensor<float> perfect({1, 3}, {0.0f, 1.0f, 0.0f});
    REQUIRE(cross_entropy(perfect, {1}) == Catch::Approx(0.0).margin(1e-12));

    Tensor<float> uniform({1, 4}, {0.25f, 0.25f, 0.25f, 0.25f});
    REQUIRE(cross_entropy(uniform, {2}) ==
            Catch::Approx(std::log(4.0)).epsilon(1e-6));

    Tensor<float> two({2, 2}, {0.5f, 0.5f, 0.75f, 0.25f});
    REQUIRE(cross_entropy(two, {0, 1}) ==
            Catch::Approx(1.0397207708399179).epsilon(1e-6));

    // the clamp keeps impossible labels finite
    REQUIRE(cross_entropy(perfect, {0}) ==
            Catch::Approx(-std::log(1e-12)).epsilon(1e-9));

    REQUIRE_THROWS_AS(cross_entropy(perfect, {0, 1}), data_error);
}

TEST_CASE("amsgrad matches a hand trace for 20 steps", "[training]") {
    Tensor<double> theta({1}, {0.5});
    Tensor<double> grad({1}, {0.0});
    std::vector<ParamRef<double>> params{{"theta", &theta}};
    std::vector<ParamRef<double>> grads{{"g", &grad}};
    const double b1 = 0.86, b2 = 0.98, eps = 1e-9, lr = 0.01;
    auto state = make_amsgrad_state<double>(params, b1, b2, eps);

    double ref_theta = 0.5, m = 0.0, v = 0.0, vhat = 0.0;
    double prev_vhat = 0.0;
    for (int s = 0; s < 20; ++s) {
        const double g = std::sin(0.7 * s + 0.3) + 0.2;
        grad[0] = g;
        amsgrad_step(params, grads, state, lr);

        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        vhat = std::max(vhat, v);
        ref_theta -= lr * m / std::sqrt(vhat + eps);

        REQUIRE(std::abs(theta[0] - ref_theta) < 1e-12);
        REQUIRE(state.vhat[0][0] >= prev_vhat);
        prev_vhat = state.vhat[0][0];
    }
}

TEST_CASE("amsgrad first step from zero state", "[training]") {
    Tensor<double> theta({1}, {2.0});
    Tensor<double> grad({1}, {0.4});
    std::vector<ParamRef<double>> params{{"theta", &theta}};
    std::vector<ParamRef<double>> grads{{"g", &grad}};
    const double b1 = 0.86, b2 = 0.98, eps = 1e-9, lr = 0.05;
    auto state = make_amsgrad_state<double>(params, b1, b2, eps);
    amsgrad_step(params, grads, state, lr);
    const double expect =
        2.0 - lr * (1.0 - b1) * 0.4 / std::sqrt((1.0 - b2) * 0.4 * 0.4 + eps);
    REQUIRE(theta[0] == Catch::Approx(expect).epsilon(1e-15));
}

TEST_CASE("amsgrad never forgets a gradient spike", "[training]") {
    Tensor<double> theta({1}, {0.0});
    Tensor<double> grad({1}, {10.0});
    std::vector<ParamRef<double>> params{{"theta", &theta}};
    std::vector<ParamRef<double>> grads{{"g", &grad}};
    auto state = make_amsgrad_state<double>(params, 0.86, 0.98, 1e-9);
    amsgrad_step(params, grads, state, 0.01);
    const double vhat_after_spike = state.vhat[0][0];
    grad[0] = 0.0;
    for (int s = 0; s < 50; ++s) {
        amsgrad_step(params, grads, state, 0.01);
        REQUIRE(state.vhat[0][0] >= vhat_after_spike);
        REQUIRE(state.v[0][0] <= state.vhat[0][0]);
    }
    // the raw second moment has decayed well below the ratchet by now
    REQUIRE(state.v[0][0] < 0.5 * vhat_after_spike);
    REQUIRE(state.vhat[0][0] == vhat_after_spike);
}

TEST_CASE("amsgrad zero gradient is a fixpoint from rest", "[training]") {
    Tensor<double> theta({2}, {1.5, -2.5});
    Tensor<double> grad({2}, {0.0, 0.0});
    std::vector<ParamRef<double>> params{{"theta", &theta}};
    std::vector<ParamRef<double>> grads{{"g", &grad}};
    auto state = make_amsgrad_state<double>(params, 0.86, 0.98, 1e-9);
    for (int s = 0; s < 5; ++s) amsgrad_step(params, grads, state, 0.1);
    REQUIRE(theta[0] == 1.5);
    REQUIRE(theta[1] == -2.5);

    grad[0] = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(amsgrad_step(params, grads, state, 0.1), numeric_error);
    REQUIRE_THROWS_AS(amsgrad_step(params, grads, state, -1.0), parameter_error);
}

TEST_CASE("cosine schedule endpoints and cycling", "[training]") {
    CosineSchedule s;
    s.eta_min = 0.001;
    s.eta_max = 0.101;
    s.period = 100;
    s.cyclic = true;
    REQUIRE(cosine_lr(s, 0) == Catch::Approx(0.101).epsilon(1e-12));
    REQUIRE(cosine_lr(s, 50) == Catch::Approx(0.051).epsilon(1e-12));
    REQUIRE(cosine_lr(s, 100) == Catch::Approx(0.101).epsilon(1e-12));
    REQUIRE(cosine_lr(s, 250) == Catch::Approx(0.051).epsilon(1e-12));

    s.cyclic = false;
    REQUIRE(cosine_lr(s, 100) == Catch::Approx(0.001).epsilon(1e-12));
    REQUIRE(cosine_lr(s, 100000) == Catch::Approx(0.001).epsilon(1e-12));

    for (std::size_t step = 0; step < 300; step += 7) {
        const double lr = cosine_lr(s, step);
        REQUIRE(lr >= s.eta_min - 1e-15);
        REQUIRE(lr <= s.eta_max + 1e-15);
    }

    CosineSchedule bad;
    bad.period = 0;
    REQUIRE_THROWS_AS(cosine_lr(bad, 0), parameter_error);
    bad.period = 10;
    bad.eta_min = 0.5;
    bad.eta_max = 0.1;
    REQUIRE_THROWS_AS(cosine_lr(bad, 0), parameter_error);
}

TEST_CASE("lr range driver sweeps linearly and finds the steep region",
          "[training]") {
    // gradient descent on f(x) = x^2; diverges once lr > 1
    double x = 5.0;
    auto step = [&](double lr) {
        const double loss = x * x;
        x -= lr * 2.0 * x;
        return loss;
    };
    const auto r = lr_range_core(step, 0.005, 1.2, 60);
    REQUIRE(r.points.size() == 60);
    REQUIRE(r.points.front().lr == Catch::Approx(0.005));
    REQUIRE(r.points.back().lr == Catch::Approx(1.2));
    REQUIRE(r.suggestion > 0.005);
    REQUIRE(r.suggestion < 1.2);

    // non-finite losses truncate the sweep but still yield a suggestion
    auto blowup = [&](double lr) {
        return lr > 0.8 ? std::numeric_limits<double>::infinity() : 1.0 / lr;
    };
    const auto t = lr_range_core(blowup, 0.1, 1.0, 50);
    REQUIRE(t.truncated);
    REQUIRE(t.points.size() < 50);
    REQUIRE(t.points.size() > 2);
    REQUIRE(std::isfinite(t.suggestion));

    // degenerate sweep where lo == hi holds every rate constant
    double y = 3.0;
    auto step_y = [&](double lr) {
        const double loss = y * y;
        y -= lr * 2.0 * y;
        return loss;
    };
    const auto c = lr_range_core(step_y, 0.1, 0.1, 10);
    REQUIRE(c.points.size() == 10);
    for (const auto& p : c.points) REQUIRE(p.lr == 0.1);
    REQUIRE(c.suggestion == 0.1);

    REQUIRE_THROWS_AS(lr_range_core(step, 0.1, 1.0, 1), parameter_error);
    REQUIRE_THROWS_AS(lr_range_core(step, 0.5, 0.1, 10), parameter_error);
}

TEST_CASE("lr range test leaves the model untouched and is repeatable",
          "[training]") {
    auto data = tiny_synth(20, 0.1, 5);
    auto model = make_model<float>(tiny_config());
    RngState rng(2);
    init_params(model, rng);
    const Tensor<float> before = model.head.w;

    TrainConfig cfg;
    cfg.batch_size = 16;
    cfg.seed = 12;
    const auto r1 = lr_range_test(model, data, 1e-4, 0.5, 15, cfg);
    REQUIRE(model.head.w == before);
    const auto r2 = lr_range_test(model, data, 1e-4, 0.5, 15, cfg);
    REQUIRE(r1.suggestion == r2.suggestion);
    REQUIRE(r1.points.size() == r2.points.size());
    for (std::size_t i = 0; i < r1.points.size(); ++i)
        REQUIRE(r1.points[i].loss == r2.points[i].loss);
}

TEST_CASE("auto schedule derives its bounds from the range test", "[training]") {
    auto data = tiny_synth(20, 0.1, 8);
    auto model = make_model<float>(tiny_config());
    RngState rng(3);
    init_params(model, rng);
    TrainConfig cfg;
    cfg.batch_size = 16;
    cfg.seed = 4;
    const CosineSchedule s = auto_schedule(model, data, cfg, 1e-5, 0.5, 20);
    REQUIRE(s.eta_max > 0.0);
    REQUIRE(s.eta_min == Catch::Approx(s.eta_max / 100.0));
    REQUIRE(s.period == ((data.size() + cfg.batch_size - 1) / cfg.batch_size) * 10);
    REQUIRE(s.cyclic);
}

TEST_CASE("stratified split keeps per-class proportions", "[training]") {
    auto ds = labels_only({{"a", 10}, {"b", 10}});
    auto [train, test] = stratified_split(ds, 0.6, 7);
    REQUIRE(train.size() == 12);
    REQUIRE(test.size() == 8);
    std::size_t a_train = 0;
    for (auto l : train.labels)
        if (l == 0) ++a_train;
    REQUIRE(a_train == 6);

    // disjoint and exhaustive: sizes add up and both carry the class catalog
    REQUIRE(train.size() + test.size() == ds.size());
    REQUIRE(train.class_names == ds.class_names);
    REQUIRE(test.class_names == ds.class_names);

    auto [train2, test2] = stratified_split(ds, 0.6, 7);
    REQUIRE(train2.labels == train.labels);
    REQUIRE(train2.x == train.x);

    REQUIRE_THROWS_AS(stratified_split(ds, 0.0, 1), parameter_error);
    REQUIRE_THROWS_AS(stratified_split(ds, 1.0, 1), parameter_error);
}

TEST_CASE("stratified split reproduces the reference allocation", "[training]") {
    const auto classes = reference_class_counts();
    auto ds = labels_only(classes);
    REQUIRE(ds.size() == 92116);
    auto [train, test] = stratified_split(ds, 0.6, 42);
    REQUIRE(train.size() == 55270);
    REQUIRE(test.size() == 36846);

    const std::size_t expect[] = {1812, 5606, 4431, 2629, 7696,  3502, 509, 297,
                                  1046, 1471, 10765, 713, 3666, 1529, 9598};
    std::vector<std::size_t> got(classes.size(), 0);
    for (auto l : train.labels) ++got[l];
    for (std::size_t c = 0; c < classes.size(); ++c) {
        INFO("class " << classes[c].first);
        REQUIRE(got[c] == expect[c]);
    }

    // per-class counts never drift further than one sample from the target
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const double ideal = 0.6 * static_cast<double>(classes[c].second);
        REQUIRE(std::abs(static_cast<double>(got[c]) - ideal) <= 1.0);
    }
}

TEST_CASE("feature scaler standardizes and survives degenerate columns",
          "[training]") {
    PixelDataset ds;
    ds.t = 1;
    ds.b = 2;
    ds.class_names = {"x"};
    ds.x = Tensor<float>({2, 1, 2}, {1.0f, 7.0f, 3.0f, 7.0f});
    ds.labels = {0, 0};
    const ScalerParams sp = scaler_fit(ds);
    REQUIRE(sp.mu[0] == Catch::Approx(2.0));
    REQUIRE(sp.sigma[0] == Catch::Approx(1.0));  // population std of {1,3}
    REQUIRE(sp.mu[1] == Catch::Approx(7.0));
    REQUIRE(sp.sigma[1] == Catch::Approx(1.0));  // constant column guard

    const PixelDataset out = scaler_apply(sp, ds);
    REQUIRE(out.x[0] == Catch::Approx(-1.0));
    REQUIRE(out.x[2] == Catch::Approx(1.0));
    REQUIRE(out.x[1] == Catch::Approx(0.0));
    REQUIRE(out.x[3] == Catch::Approx(0.0));
}

TEST_CASE("feature scaler whitens random data", "[training]") {
    auto ds = tiny_synth(200, 0.2, 21);
    const ScalerParams sp = scaler_fit(ds);
    const PixelDataset out = scaler_apply(sp, ds);
    const std::size_t d = ds.t * ds.b, n = ds.size();
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = out.x[i * d + j];
            mean += v;
            sq += v * v;
        }
        mean /= static_cast<double>(n);
        const double var = sq / static_cast<double>(n) - mean * mean;
        REQUIRE(std::abs(mean) < 1e-5);
        REQUIRE(std::abs(std::sqrt(var) - 1.0) < 1e-4);
    }
}

TEST_CASE("training run is deterministic for a fixed seed", "[training]") {
    auto data = tiny_synth(25, 0.1, 33);
    auto [train, test] = stratified_split(data, 0.8, 1);

    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 16;
    cfg.seed = 9;
    cfg.schedule = {1e-4, 5e-3, 20, true};

    auto run = [&](PixelRcnnModel<float>& model) {
        RngState rng(6);
        init_params(model, rng);
        return fit(model, train, &test, cfg);
    };
    auto m1 = make_model<float>(tiny_config());
    auto m2 = make_model<float>(tiny_config());
    const TrainingReport r1 = run(m1);
    const TrainingReport r2 = run(m2);

    REQUIRE(r1.history.size() == 3);
    REQUIRE(r1.steps == 3 * ((train.size() + 15) / 16));
    for (std::size_t e = 0; e < 3; ++e) {
        REQUIRE(r1.history[e].train_loss == r2.history[e].train_loss);
        REQUIRE(r1.history[e].train_oa == r2.history[e].train_oa);
        REQUIRE(r1.history[e].test_oa == r2.history[e].test_oa);
        REQUIRE(r1.history[e].has_test);
    }
    REQUIRE(m1.head.w == m2.head.w);
    REQUIRE(m1.lstm.w_xi == m2.lstm.w_xi);
    REQUIRE(r1.history.front().lr ==
            Catch::Approx(cosine_lr(cfg.schedule, 0)).epsilon(1e-15));
}

TEST_CASE("training reduces the loss on an easy problem", "[training]") {
    auto data = tiny_synth(30, 0.08, 14);
    auto model = make_model<float>(tiny_config());
    RngState rng(10);
    init_params(model, rng);

    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.batch_size = 16;
    cfg.seed = 2;
    cfg.schedule = {2e-4, 2e-2, 60, true};
    const TrainingReport r = fit(model, data, nullptr, cfg);
    REQUIRE(r.final_train_loss < r.history.front().train_loss);
    REQUIRE(r.final_train_oa > 0.8);
    REQUIRE_FALSE(r.has_test);
}

TEST_CASE("training surfaces non-finite values as numeric errors", "[training]") {
    auto data = tiny_synth(10, 0.1, 3);
    auto model = make_model<float>(tiny_config());
    RngState rng(1);
    init_params(model, rng);
    model.head.b[0] = std::numeric_limits<float>::quiet_NaN();
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    cfg.seed = 1;
    cfg.schedule = {1e-4, 1e-3, 10, true};
    REQUIRE_THROWS_AS(fit(model, data, nullptr, cfg), numeric_error);
}

TEST_CASE("training history csv layout", "[training]") {
    TrainingReport r;
    r.history.push_back({1, 0.5, 2.0, 0.25, 0.5, true});
    r.history.push_back({2, 0.25, 1.0, 0.5, 0.0, false});
    const std::string path = "history_layout.csv";
    write_training_csv(path, r);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "epoch,lr,train_loss,train_OA,test_OA");
    std::getline(in, line);
    REQUIRE(line == "1,0.5,2,0.25,0.5");
    std::getline(in, line);
    REQUIRE(line == "2,0.25,1,0.5,");
    std::remove(path.c_str());
}

TEST_CASE("logistic baseline solves a linearly separable toy", "[training]") {
    PixelDataset ds;
    ds.t = 1;
    ds.b = 2;
    ds.class_names = {"lo", "hi"};
    const std::size_t n = 60;
    ds.x = Tensor<float>({n, 1, 2});
    RngState rng(44);
    for (std::size_t i = 0; i < n; ++i) {
        const bool hi = i % 2 == 1;
        ds.labels.push_back(hi ? 1 : 0);
        const double base = hi ? 2.0 : -2.0;
        ds.x[i * 2 + 0] = static_cast<float>(base + rng.uniform(-0.3, 0.3));
        ds.x[i * 2 + 1] = static_cast<float>(-base + rng.uniform(-0.3, 0.3));
    }
    const LogisticBaseline m = logistic_baseline_fit(ds, 40, 16, 0.05, 5);
    REQUIRE(logistic_oa(m, ds) == Catch::Approx(1.0));
}
