#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "prcnn/checkpoint.hpp"
#include "prcnn/data.hpp"
#include "prcnn/error.hpp"
#include "prcnn/model.hpp"
#include "prcnn/optimizer.hpp"
#include "prcnn/rng.hpp"

namespace prcnn {

// Mean negative log-likelihood over a batch; the log argument is clamped
// at 1e-12 so a confidently wrong prediction yields a large finite loss.
template <typename T>
double cross_entropy(const Tensor<T>& probs_batch,
                     const std::vector<std::size_t>& labels) {
    if (probs_batch.rank() != 2)
        throw shape_error("cross_entropy: rank-2 probabilities required");
    const std::size_t n = probs_batch.dim(0), k = probs_batch.dim(1);
    if (labels.size() != n || n == 0)
        throw data_error("cross_entropy: batch/label count mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] >= k) throw data_error("cross_entropy: label out of range");
        const double p = static_cast<double>(probs_batch(i, labels[i]));
        total -= std::log(std::max(p, 1e-12));
    }
    return total / static_cast<double>(n);
}

inline double sample_nll(const float* probs, std::size_t k, std::size_t label) {
    (void)k;
    return -std::log(std::max(static_cast<double>(probs[label]), 1e-12));
}

// Per-feature standardization fitted on the training split only.
struct ScalerParams {
    std::vector<double> mu, sigma;
};

inline ScalerParams scaler_fit(const PixelDataset& train) {
    check_dataset(train);
    const std::size_t n = train.size(), d = train.t * train.b;
    ScalerParams sp;
    sp.mu.assign(d, 0.0);
    sp.sigma.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const float* row = train.sample(0) + i * d;
        for (std::size_t f = 0; f < d; ++f) sp.mu[f] += row[f];
    }
    for (std::size_t f = 0; f < d; ++f) sp.mu[f] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const float* row = train.sample(0) + i * d;
        for (std::size_t f = 0; f < d; ++f) {
            const double dev = row[f] - sp.mu[f];
            sp.sigma[f] += dev * dev;
        }
    }
    for (std::size_t f = 0; f < d; ++f) {
        sp.sigma[f] = std::sqrt(sp.sigma[f] / static_cast<double>(n));
        if (sp.sigma[f] == 0.0) sp.sigma[f] = 1.0;  // constant feature
    }
    return sp;
}

inline PixelDataset scaler_apply(const ScalerParams& sp, const PixelDataset& ds) {
    check_dataset(ds);
    const std::size_t d = ds.t * ds.b;
    if (sp.mu.size() != d || sp.sigma.size() != d)
        throw data_error("scaler: feature count mismatch");
    PixelDataset out = ds;
    for (std::size_t i = 0; i < out.size(); ++i) {
        float* row = out.x.data() + i * d;
        for (std::size_t f = 0; f < d; ++f)
            row[f] = static_cast<float>((row[f] - sp.mu[f]) / sp.sigma[f]);
    }
    return out;
}

// The scaler travels beside the checkpoint as a small CSV so prediction on
// raw data can reuse the training-split statistics.
inline void write_scaler_csv(const std::string& path, const ScalerParams& sp) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os << "feature,mu,sigma\n";
    char buf[80];
    for (std::size_t f = 0; f < sp.mu.size(); ++f) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g", f, sp.mu[f],
                      sp.sigma[f]);
        os << buf << '\n';
    }
    if (!os) throw data_error("write failed: " + path);
}

inline ScalerParams load_scaler_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line) ||
        (line != "feature,mu,sigma" && line != "feature,mu,sigma\r"))
        throw format_error("scaler csv: bad header");
    ScalerParams sp;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        std::size_t f = 0;
        double mu = 0.0, sigma = 0.0;
        if (std::sscanf(line.c_str(), "%zu,%lf,%lf", &f, &mu, &sigma) != 3 ||
            f != sp.mu.size())
            throw format_error("scaler csv: malformed row");
        sp.mu.push_back(mu);
        sp.sigma.push_back(sigma);
    }
    if (sp.mu.empty()) throw format_error("scaler csv: no rows");
    return sp;
}

// Seeded stratified split. Per-class train counts come from largest-
// remainder allocation computed in exact integer arithmetic: the fraction
// is quantized to parts-per-million, quotas and remainders are integers,
// and ties break by larger remainder, then larger class, then class index.
inline std::pair<PixelDataset, PixelDataset> stratified_split(
    const PixelDataset& ds, double train_fraction, std::uint64_t seed) {
    check_dataset(ds);
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw parameter_error("split: fraction must be in (0, 1)");
    const std::uint64_t ppm =
        static_cast<std::uint64_t>(std::llround(train_fraction * 1e6));
    if (ppm == 0 || ppm >= 1000000)
        throw parameter_error("split: fraction too extreme");

    const std::size_t k = ds.classes();
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < ds.size(); ++i)
        by_class[ds.labels[i]].push_back(i);
    for (std::size_t c = 0; c < k; ++c)
        if (by_class[c].empty())
            throw data_error("split: class without samples: " + ds.class_names[c]);

    const std::uint64_t n_total = ds.size();
    const std::uint64_t target = (n_total * ppm + 500000) / 1000000;
    std::vector<std::uint64_t> take(k), rem(k);
    std::uint64_t base = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const std::uint64_t quota = by_class[c].size() * ppm;
        take[c] = quota / 1000000;
        rem[c] = quota % 1000000;
        base += take[c];
    }
    std::uint64_t leftover = target - base;
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rem[a] != rem[b]) return rem[a] > rem[b];
        if (by_class[a].size() != by_class[b].size())
            return by_class[a].size() > by_class[b].size();
        return a < b;
    });
    for (std::size_t pos = 0; leftover > 0 && pos < k; ++pos) {
        const std::size_t c = order[pos];
        if (take[c] < by_class[c].size()) {
            ++take[c];
            --leftover;
        }
    }
    if (leftover != 0) throw data_error("split: allocation failed");

    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t c = 0; c < k; ++c) {
        RngState rng(derive_seed(seed, c));
        std::vector<std::size_t> pool = by_class[c];
        rng.shuffle(pool);
        std::vector<std::size_t> head(pool.begin(), pool.begin() + take[c]);
        std::vector<std::size_t> tail(pool.begin() + take[c], pool.end());
        train_idx.insert(train_idx.end(), head.begin(), head.end());
        test_idx.insert(test_idx.end(), tail.begin(), tail.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto gather = [&](const std::vector<std::size_t>& idx, const char* tag) {
        PixelDataset out;
        out.t = ds.t;
        out.b = ds.b;
        out.class_names = ds.class_names;
        out.x = Tensor<float>({idx.size(), ds.t, ds.b});
        out.labels.reserve(idx.size());
        const std::size_t row_len = ds.t * ds.b;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const float* src = ds.sample(idx[i]);
            std::copy(src, src + row_len, out.x.data() + i * row_len);
            out.labels.push_back(ds.labels[idx[i]]);
        }
        out.provenance = ds.provenance + " (" + tag + " split)";
        return out;
    };
    return {gather(train_idx, "train"), gather(test_idx, "test")};
}

struct TrainConfig {
    std::size_t epochs = 150;
    std::size_t batch_size = 128;
    double beta1 = 0.86;
    double beta2 = 0.98;
    double eps = 1e-9;
    CosineSchedule schedule;
    std::uint64_t seed = 0;
    std::string checkpoint_path;  // empty = no checkpoint written
    bool verbose = false;
};

inline void validate_train_config(const TrainConfig& cfg) {
    if (cfg.epochs == 0 || cfg.batch_size == 0)
        throw parameter_error("train config: epochs and batch size must be positive");
    if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0) ||
        !(cfg.beta2 > 0.0 && cfg.beta2 < 1.0))
        throw parameter_error("train config: decay rates must be in (0, 1)");
    if (!(cfg.eps > 0.0)) throw parameter_error("train config: eps must be positive");
    cosine_lr(cfg.schedule, 0);  // validates the schedule
}

struct EpochRow {
    std::size_t epoch = 0;  // 1-based
    double lr = 0.0;        // rate at the epoch's first step
    double train_loss = 0.0;
    double train_oa = 0.0;
    double test_oa = 0.0;
    bool has_test = false;
};

struct TrainingReport {
    std::vector<EpochRow> history;
    double final_train_loss = 0.0;
    double final_train_oa = 0.0;
    double final_test_oa = 0.0;
    bool has_test = false;
    std::size_t steps = 0;
};

inline void write_training_csv(const std::string& path,
                               const TrainingReport& report) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os << "epoch,lr,train_loss,train_OA,test_OA\n";
    char buf[160];
    for (const EpochRow& r : report.history) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g", r.epoch, r.lr,
                      r.train_loss, r.train_oa);
        os << buf << ',';
        if (r.has_test) {
            std::snprintf(buf, sizeof buf, "%.17g", r.test_oa);
            os << buf;
        }
        os << '\n';
    }
    if (!os) throw data_error("write failed: " + path);
}

inline void write_training_json(const std::string& path,
                                const TrainingReport& report) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    char buf[96];
    os << "{\n";
    os << "  \"epochs\": " << report.history.size() << ",\n";
    os << "  \"steps\": " << report.steps << ",\n";
    std::snprintf(buf, sizeof buf, "%.17g", report.final_train_loss);
    os << "  \"final_train_loss\": " << buf << ",\n";
    std::snprintf(buf, sizeof buf, "%.17g", report.final_train_oa);
    os << "  \"final_train_OA\": " << buf << ",\n";
    if (report.has_test) {
        std::snprintf(buf, sizeof buf, "%.17g", report.final_test_oa);
        os << "  \"final_test_OA\": " << buf << "\n";
    } else {
        os << "  \"final_test_OA\": null\n";
    }
    os << "}\n";
    if (!os) throw data_error("write failed: " + path);
}

namespace detail {

inline std::size_t argmax(const float* v, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline void check_data_for_model(const PixelRcnnModel<float>& model,
                                 const PixelDataset& ds) {
    check_dataset(ds);
    if (ds.t != model.config.t || ds.b != model.config.b)
        throw data_error("training: dataset t or b does not match the model");
    for (std::uint16_t y : ds.labels)
        if (y >= model.config.k)
            throw data_error("training: label exceeds model class count");
}

inline void scale_gradients(ModelGradients<float>& grads, float s) {
    for (auto& p : grads.params())
        for (std::size_t i = 0; i < p.tensor->numel(); ++i) (*p.tensor)[i] *= s;
}

}  // namespace detail

// Mini-batch training loop: seeded shuffle each epoch, dropout in train
// mode, cosine-annealed rate, mean-reduced gradients, final partial batch
// kept. Deterministic for a fixed seed. Throws numeric_error if the loss
// leaves the finite range.
inline TrainingReport fit(PixelRcnnModel<float>& model, const PixelDataset& train,
                          const PixelDataset* test, const TrainConfig& cfg) {
    validate_train_config(cfg);
    detail::check_data_for_model(model, train);
    if (test) detail::check_data_for_model(model, *test);

    const std::size_t n = train.size(), k = model.config.k;
    auto params = model_params(model);
    auto state = make_amsgrad_state<float>(params, cfg.beta1, cfg.beta2, cfg.eps);
    ModelGradients<float> grads = make_gradients<float>(model.config);
    auto grad_refs = grads.params();
    ForwardCache<float> cache = make_cache<float>(model.config);
    Tensor<float> xbuf({model.config.t, model.config.b});
    const std::size_t row_len = model.config.t * model.config.b;

    RngState shuffle_rng(derive_seed(cfg.seed, 1));
    RngState dropout_rng(derive_seed(cfg.seed, 2));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainingReport report;
    report.has_test = test != nullptr;
    std::size_t global_step = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochRow row;
        row.epoch = epoch + 1;
        row.lr = cosine_lr(cfg.schedule, global_step);
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t batch_n = std::min(cfg.batch_size, n - start);
            grads.zero();
            for (std::size_t bi = 0; bi < batch_n; ++bi) {
                const std::size_t si = order[start + bi];
                std::copy(train.sample(si), train.sample(si) + row_len,
                          xbuf.data());
                model_forward_into(model, xbuf, RunMode::train, &dropout_rng,
                                   cache);
                const std::size_t y = train.labels[si];
                loss_sum += sample_nll(cache.probs.data(), k, y);
                if (detail::argmax(cache.probs.data(), k) == y) ++correct;
                model_backward_into(model, cache, y, grads);
            }
            detail::scale_gradients(grads, 1.0f / static_cast<float>(batch_n));
            amsgrad_step(params, grad_refs, state,
                         cosine_lr(cfg.schedule, global_step));
            ++global_step;
        }
        row.train_loss = loss_sum / static_cast<double>(n);
        row.train_oa = static_cast<double>(correct) / static_cast<double>(n);
        if (!std::isfinite(row.train_loss))
            throw numeric_error("training diverged at epoch " +
                                std::to_string(row.epoch));

        if (test) {
            std::size_t test_correct = 0;
            for (std::size_t si = 0; si < test->size(); ++si) {
                std::copy(test->sample(si), test->sample(si) + row_len,
                          xbuf.data());
                model_forward_into(model, xbuf, RunMode::eval, nullptr, cache);
                if (detail::argmax(cache.probs.data(), k) == test->labels[si])
                    ++test_correct;
            }
            row.test_oa = static_cast<double>(test_correct) /
                          static_cast<double>(test->size());
            row.has_test = true;
        }
        if (cfg.verbose) {
            std::printf("epoch %3zu  lr %.5g  loss %.5f  acc %.4f", row.epoch,
                        row.lr, row.train_loss, row.train_oa);
            if (row.has_test) std::printf("  test_acc %.4f", row.test_oa);
            std::printf("\n");
            std::fflush(stdout);
        }
        report.history.push_back(row);
    }

    report.steps = global_step;
    report.final_train_loss = report.history.back().train_loss;
    report.final_train_oa = report.history.back().train_oa;
    if (test) report.final_test_oa = report.history.back().test_oa;
    if (!cfg.checkpoint_path.empty()) save_checkpoint(cfg.checkpoint_path, model);
    return report;
}

struct LrRangePoint {
    double lr = 0.0;
    double loss = 0.0;
    double smoothed = 0.0;
};

struct LrRangeResult {
    std::vector<LrRangePoint> points;
    double suggestion = 0.0;
    bool truncated = false;
};

// Generic range-test driver: step_with_lr(lr) performs one optimization
// step and returns that step's pre-update loss. Rates run linearly from lo
// to hi; recording stops at the first non-finite loss. The suggestion is
// the rate at the steepest descent of the 0.98-smoothed loss, ignoring the
// final 10% of recorded points where divergence typically sets in.
template <typename StepFn>
LrRangeResult lr_range_core(StepFn&& step_with_lr, double lo, double hi,
                            std::size_t iters) {
    if (iters < 2) throw parameter_error("lr range: need at least 2 iterations");
    if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi))
        throw parameter_error("lr range: bad bounds");
    LrRangeResult out;
    out.points.reserve(iters);
    for (std::size_t i = 0; i < iters; ++i) {
        const double lr =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(iters - 1);
        const double loss = step_with_lr(lr);
        if (!std::isfinite(loss)) {
            out.truncated = true;
            break;
        }
        LrRangePoint p;
        p.lr = lr;
        p.loss = loss;
        p.smoothed = out.points.empty()
                         ? loss
                         : 0.98 * out.points.back().smoothed + 0.02 * loss;
        out.points.push_back(p);
    }
    const std::size_t m = out.points.size();
    const std::size_t keep = m - m / 10;
    if (keep < 2) {
        out.suggestion = m ? out.points.front().lr : lo;
        return out;
    }
    std::size_t best = 1;
    double best_drop = out.points[1].smoothed - out.points[0].smoothed;
    for (std::size_t i = 2; i < keep; ++i) {
        const double drop = out.points[i].smoothed - out.points[i - 1].smoothed;
        if (drop < best_drop) {
            best_drop = drop;
            best = i;
        }
    }
    out.suggestion = out.points[best].lr;
    return out;
}

// Runs the range test against a throwaway copy of the model, so parameters
// and optimizer state are untouched on return.
inline LrRangeResult lr_range_test(const PixelRcnnModel<float>& model,
                                   const PixelDataset& data, double lo, double hi,
                                   std::size_t iters, const TrainConfig& cfg) {
    detail::check_data_for_model(model, data);
    PixelRcnnModel<float> probe = model;
    auto params = model_params(probe);
    auto state = make_amsgrad_state<float>(params, cfg.beta1, cfg.beta2, cfg.eps);
    ModelGradients<float> grads = make_gradients<float>(probe.config);
    auto grad_refs = grads.params();
    ForwardCache<float> cache = make_cache<float>(probe.config);
    Tensor<float> xbuf({probe.config.t, probe.config.b});
    const std::size_t row_len = probe.config.t * probe.config.b;
    const std::size_t n = data.size(), k = probe.config.k;

    RngState shuffle_rng(derive_seed(cfg.seed, 3));
    RngState dropout_rng(derive_seed(cfg.seed, 4));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order);
    std::size_t cursor = 0;

    auto step = [&](double lr) -> double {
        const std::size_t batch_n = std::min(cfg.batch_size, n);
        grads.zero();
        double loss_sum = 0.0;
        for (std::size_t bi = 0; bi < batch_n; ++bi) {
            const std::size_t si = order[cursor];
            cursor = (cursor + 1) % n;
            std::copy(data.sample(si), data.sample(si) + row_len, xbuf.data());
            model_forward_into(probe, xbuf, RunMode::train, &dropout_rng, cache);
            loss_sum += sample_nll(cache.probs.data(), k, data.labels[si]);
            model_backward_into(probe, cache, data.labels[si], grads);
        }
        const double loss = loss_sum / static_cast<double>(batch_n);
        if (!std::isfinite(loss)) return loss;
        detail::scale_gradients(grads, 1.0f / static_cast<float>(batch_n));
        try {
            amsgrad_step(params, grad_refs, state, lr);
        } catch (const numeric_error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return loss;
    };
    return lr_range_core(step, lo, hi, iters);
}

inline void write_lr_range_csv(const std::string& path, const LrRangeResult& r) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os << "lr,loss,smoothed\n";
    char buf[120];
    for (const auto& p : r.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", p.lr, p.loss,
                      p.smoothed);
        os << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "suggestion,%.17g", r.suggestion);
    os << buf << '\n';
    if (!os) throw data_error("write failed: " + path);
}

// Fills in the schedule the way train does when none is given: eta_max from
// a short range test, eta_min a hundredth of it, ten epochs per cycle.
inline CosineSchedule auto_schedule(const PixelRcnnModel<float>& model,
                                    const PixelDataset& train,
                                    const TrainConfig& cfg, double lo = 1e-5,
                                    double hi = 1.0, std::size_t iters = 80) {
    const LrRangeResult r = lr_range_test(model, train, lo, hi, iters, cfg);
    CosineSchedule s;
    s.eta_max = r.suggestion > 0.0 ? r.suggestion : 1e-3;
    s.eta_min = s.eta_max / 100.0;
    s.period = ((train.size() + cfg.batch_size - 1) / cfg.batch_size) * 10;
    s.cyclic = true;
    return s;
}

// Multinomial logistic regression over flattened t*b features, trained by
// the same AMSGrad update at a constant rate. Serves as the linear
// reference point for the network.
struct LogisticBaseline {
    Tensor<double> w;  // d x k
    Tensor<double> b;  // k
    double train_oa = 0.0;
};

inline std::size_t logistic_predict(const LogisticBaseline& m, const float* x,
                                    std::size_t d) {
    const std::size_t k = m.b.dim(0);
    std::vector<double> scores(k);
    for (std::size_t j = 0; j < k; ++j) scores[j] = m.b[j];
    for (std::size_t f = 0; f < d; ++f) {
        const double v = static_cast<double>(x[f]);
        const double* wrow = m.w.data() + f * k;
        for (std::size_t j = 0; j < k; ++j) scores[j] += v * wrow[j];
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j)
        if (scores[j] > scores[best]) best = j;
    return best;
}

inline LogisticBaseline logistic_baseline_fit(const PixelDataset& train,
                                              std::size_t epochs,
                                              std::size_t batch_size, double lr,
                                              std::uint64_t seed) {
    check_dataset(train);
    if (epochs == 0 || batch_size == 0 || !(lr > 0.0))
        throw parameter_error("logistic: bad training settings");
    const std::size_t n = train.size(), d = train.t * train.b,
                      k = train.classes();
    LogisticBaseline m;
    m.w = Tensor<double>({d, k});
    m.w.fill(0.0);
    m.b = Tensor<double>({k});
    m.b.fill(0.0);
    std::vector<ParamRef<double>> params = {{"w", &m.w}, {"b", &m.b}};
    auto state = make_amsgrad_state<double>(params, 0.86, 0.98, 1e-9);
    Tensor<double> gw({d, k}), gb({k});
    std::vector<ParamRef<double>> grad_refs = {{"w", &gw}, {"b", &gb}};

    RngState shuffle_rng(derive_seed(seed, 5));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> scores(k), probs(k);

    std::size_t correct = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        correct = 0;
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t batch_n = std::min(batch_size, n - start);
            gw.fill(0.0);
            gb.fill(0.0);
            for (std::size_t bi = 0; bi < batch_n; ++bi) {
                const std::size_t si = order[start + bi];
                const float* x = train.sample(si);
                const std::size_t y = train.labels[si];
                for (std::size_t j = 0; j < k; ++j) scores[j] = m.b[j];
                for (std::size_t f = 0; f < d; ++f) {
                    const double v = static_cast<double>(x[f]);
                    const double* wrow = m.w.data() + f * k;
                    for (std::size_t j = 0; j < k; ++j) scores[j] += v * wrow[j];
                }
                softmax_into(scores.data(), k, probs.data());
                std::size_t best = 0;
                for (std::size_t j = 1; j < k; ++j)
                    if (probs[j] > probs[best]) best = j;
                if (best == y) ++correct;
                for (std::size_t j = 0; j < k; ++j) {
                    const double dz =
                        (probs[j] - (j == y ? 1.0 : 0.0)) /
                        static_cast<double>(batch_n);
                    gb[j] += dz;
                    for (std::size_t f = 0; f < d; ++f)
                        gw(f, j) += static_cast<double>(x[f]) * dz;
                }
            }
            amsgrad_step(params, grad_refs, state, lr);
        }
    }
    m.train_oa = static_cast<double>(correct) / static_cast<double>(n);
    return m;
}

inline double logistic_oa(const LogisticBaseline& m, const PixelDataset& ds) {
    check_dataset(ds);
    const std::size_t d = ds.t * ds.b;
    if (m.w.dim(0) != d) throw data_error("logistic: feature count mismatch");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (logistic_predict(m, ds.sample(i), d) == ds.labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(ds.size());
}

}  // namespace prcnn
