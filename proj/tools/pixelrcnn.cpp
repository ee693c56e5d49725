// Command-line front end: dataset synthesis, training, evaluation,
// prediction, learning-rate search, PCA export and activation inspection.
// Exit codes: 0 success, 2 usage/data error, 3 numeric failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prcnn/prcnn.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prcnn;

namespace {

// Everything a run needs, JSON-configurable, flag-overridable. Defaults
// reproduce the reference architecture and optimizer settings.
struct RunConfig {
    ModelConfig model;

    std::size_t epochs = 150;
    std::size_t batch = 128;
    double beta1 = 0.86;
    double beta2 = 0.98;
    double eps = 1e-9;
    double eta_max = 0.0;   // <= 0: take the range-test suggestion
    double eta_min = -1.0;  // < 0: eta_max / 100
    std::size_t period = 0;  // 0: steps per epoch * 10
    bool cyclic = true;

    std::string data_path;  // empty: synthesize from the fields below
    std::size_t classes = 15;
    std::size_t per_class = 200;
    double sigma = 0.15;
    std::string proportions;  // "" or "table3"
    double train_fraction = 0.6;

    std::uint64_t seed = 0;
};

void reject_unknown(const json& j, const char* where,
                    std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw parameter_error(std::string("config: unknown key '") +
                                  it.key() + "' in " + where);
    }
}

double jnum(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw parameter_error(std::string("config: '") + key +
                              "' must be a number");
    return j[key].get<double>();
}

std::size_t jsize(const json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned())
        throw parameter_error(std::string("config: '") + key +
                              "' must be a nonnegative integer");
    return j[key].get<std::size_t>();
}

bool jbool(const json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean())
        throw parameter_error(std::string("config: '") + key +
                              "' must be a boolean");
    return j[key].get<bool>();
}

std::string jstr(const json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string())
        throw parameter_error(std::string("config: '") + key +
                              "' must be a string");
    return j[key].get<std::string>();
}

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream is(path);
    if (!is) throw data_error("cannot open config: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw format_error(std::string("config: ") + e.what());
    }
    reject_unknown(j, "top level", {"model", "train", "data", "seed"});

    if (j.contains("model")) {
        const json& m = j["model"];
        reject_unknown(m, "model",
                       {"t", "b", "u", "d_out", "n1", "f1", "n2", "f2", "K",
                        "peepholes", "dropout_p", "tdd_relu"});
        cfg.model.t = jsize(m, "t", cfg.model.t);
        cfg.model.b = jsize(m, "b", cfg.model.b);
        cfg.model.u = jsize(m, "u", cfg.model.u);
        cfg.model.d_out = jsize(m, "d_out", cfg.model.d_out);
        cfg.model.n1 = jsize(m, "n1", cfg.model.n1);
        cfg.model.f1 = jsize(m, "f1", cfg.model.f1);
        cfg.model.n2 = jsize(m, "n2", cfg.model.n2);
        cfg.model.f2 = jsize(m, "f2", cfg.model.f2);
        cfg.model.k = jsize(m, "K", cfg.model.k);
        cfg.model.peepholes = jbool(m, "peepholes", cfg.model.peepholes);
        cfg.model.dropout_p = jnum(m, "dropout_p", cfg.model.dropout_p);
        cfg.model.tdd_relu = jbool(m, "tdd_relu", cfg.model.tdd_relu);
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        reject_unknown(
            t, "train", {"epochs", "batch", "beta1", "beta2", "eps", "schedule"});
        cfg.epochs = jsize(t, "epochs", cfg.epochs);
        cfg.batch = jsize(t, "batch", cfg.batch);
        cfg.beta1 = jnum(t, "beta1", cfg.beta1);
        cfg.beta2 = jnum(t, "beta2", cfg.beta2);
        cfg.eps = jnum(t, "eps", cfg.eps);
        if (t.contains("schedule")) {
            const json& s = t["schedule"];
            reject_unknown(s, "train.schedule",
                           {"eta_max", "eta_min", "period", "cyclic"});
            cfg.eta_max = jnum(s, "eta_max", cfg.eta_max);
            cfg.eta_min = jnum(s, "eta_min", cfg.eta_min);
            cfg.period = jsize(s, "period", cfg.period);
            cfg.cyclic = jbool(s, "cyclic", cfg.cyclic);
        }
    }
    if (j.contains("data")) {
        const json& d = j["data"];
        reject_unknown(d, "data",
                       {"path", "classes", "per_class", "sigma", "proportions",
                        "train_fraction"});
        cfg.data_path = jstr(d, "path", cfg.data_path);
        cfg.classes = jsize(d, "classes", cfg.classes);
        cfg.per_class = jsize(d, "per_class", cfg.per_class);
        cfg.sigma = jnum(d, "sigma", cfg.sigma);
        cfg.proportions = jstr(d, "proportions", cfg.proportions);
        cfg.train_fraction = jnum(d, "train_fraction", cfg.train_fraction);
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            throw parameter_error("config: 'seed' must be a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    return cfg;
}

SynthSpec synth_spec_from(const RunConfig& cfg) {
    SynthSpec spec;
    spec.t = cfg.model.t;
    spec.bands = cfg.model.b;
    spec.sigma = cfg.sigma;
    spec.seed = cfg.seed;
    if (cfg.proportions == "table3") {
        for (const auto& [name, count] : reference_class_counts()) {
            spec.class_names.push_back(name);
            spec.counts.push_back(count);
        }
    } else if (!cfg.proportions.empty()) {
        throw parameter_error("unknown proportions preset: " + cfg.proportions);
    } else {
        spec.counts.assign(cfg.classes, cfg.per_class);
    }
    return spec;
}

PixelDataset resolve_dataset(const RunConfig& cfg) {
    if (!cfg.data_path.empty()) return load_dataset(cfg.data_path);
    return synth_generate(synth_spec_from(cfg));
}

std::string out_file(const std::string& out_dir, const char* name) {
    fs::create_directories(out_dir);
    return (fs::path(out_dir) / name).string();
}

TrainConfig train_config_from(const RunConfig& cfg) {
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch;
    tc.beta1 = cfg.beta1;
    tc.beta2 = cfg.beta2;
    tc.eps = cfg.eps;
    tc.seed = cfg.seed;
    return tc;
}

CosineSchedule resolve_schedule(const PixelRcnnModel<float>& model,
                                const PixelDataset& train, const RunConfig& cfg,
                                const TrainConfig& tc) {
    const std::size_t spe = (train.size() + cfg.batch - 1) / cfg.batch;
    CosineSchedule s;
    if (cfg.eta_max > 0.0) {
        s.eta_max = cfg.eta_max;
    } else {
        std::printf("no eta_max configured; running the range test...\n");
        s = auto_schedule(model, train, tc);
        std::printf("range test suggests eta_max = %.6g\n", s.eta_max);
    }
    s.eta_min = cfg.eta_min >= 0.0 ? cfg.eta_min : s.eta_max / 100.0;
    s.period = cfg.period ? cfg.period : spe * 10;
    s.cyclic = cfg.cyclic;
    return s;
}

void predict_all(const PixelRcnnModel<float>& model, const PixelDataset& ds,
                 std::vector<std::uint16_t>& pred) {
    if (ds.t != model.config.t || ds.b != model.config.b)
        throw data_error("dataset dims do not match the checkpoint");
    ForwardCache<float> cache = make_cache<float>(model.config);
    Tensor<float> x({model.config.t, model.config.b});
    const std::size_t row_len = ds.t * ds.b;
    pred.resize(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::copy(ds.sample(i), ds.sample(i) + row_len, x.data());
        model_forward_into(model, x, RunMode::eval, nullptr, cache);
        std::size_t best = 0;
        for (std::size_t c = 1; c < model.config.k; ++c)
            if (cache.probs[c] > cache.probs[best]) best = c;
        pred[i] = static_cast<std::uint16_t>(best);
    }
}

PixelDataset maybe_scaled(const PixelDataset& ds, const std::string& scaler_path) {
    if (scaler_path.empty()) return ds;
    return scaler_apply(load_scaler_csv(scaler_path), ds);
}

int cmd_synth(const RunConfig& cfg, const std::string& out_dir) {
    const SynthSpec spec = synth_spec_from(cfg);
    const PixelDataset ds = synth_generate(spec);
    const std::string path = out_file(out_dir, "dataset.pxrc");
    save_dataset(path, ds);
    std::printf("wrote %s (%zu samples, t=%zu, b=%zu, sigma=%g, seed=%llu)\n",
                path.c_str(), ds.size(), ds.t, ds.b, spec.sigma,
                static_cast<unsigned long long>(spec.seed));
    std::vector<std::size_t> counts(ds.classes(), 0);
    for (auto l : ds.labels) ++counts[l];
    for (std::size_t c = 0; c < ds.classes(); ++c)
        std::printf("  %-22s %zu\n", ds.class_names[c].c_str(), counts[c]);
    return 0;
}

// The classifier head must span the dataset's label space; the configured K
// only drives in-memory synthesis.
ModelConfig fit_to_catalog(ModelConfig mc, const PixelDataset& ds) {
    if (mc.k != ds.classes()) {
        std::printf("head resized to the %zu-class catalog (config had %zu)\n",
                    ds.classes(), mc.k);
        mc.k = ds.classes();
    }
    return mc;
}

int cmd_train(const RunConfig& cfg, const std::string& out_dir) {
    const PixelDataset full = resolve_dataset(cfg);
    auto [train_raw, test_raw] =
        stratified_split(full, cfg.train_fraction, cfg.seed);
    const ScalerParams sp = scaler_fit(train_raw);
    const PixelDataset train = scaler_apply(sp, train_raw);
    const PixelDataset test = scaler_apply(sp, test_raw);
    std::printf("training on %zu samples, evaluating on %zu\n", train.size(),
                test.size());

    auto model = make_model<float>(fit_to_catalog(cfg.model, full));
    RngState init_rng(derive_seed(cfg.seed, 6));
    init_params(model, init_rng);
    std::printf("model: %zu trainable parameters\n", param_count(model));

    TrainConfig tc = train_config_from(cfg);
    tc.schedule = resolve_schedule(model, train, cfg, tc);
    tc.checkpoint_path = out_file(out_dir, "checkpoint.prcn");
    tc.verbose = true;

    const TrainingReport report = fit(model, train, &test, tc);
    write_training_csv(out_file(out_dir, "training.csv"), report);
    write_training_json(out_file(out_dir, "training.json"), report);
    write_scaler_csv(out_file(out_dir, "scaler.csv"), sp);
    std::printf("final train OA %.4f  test OA %.4f  checkpoint %s\n",
                report.final_train_oa, report.final_test_oa,
                tc.checkpoint_path.c_str());
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& out_dir,
             const std::string& checkpoint, const std::string& fixture,
             const std::string& scaler_path, const std::string& train_data,
             bool baseline) {
    if (!fixture.empty()) {
        const ConfusionMatrix cm = load_confusion_csv(fixture);
        std::fputs(render_report(cm).c_str(), stdout);
        std::printf("OA %.17g\nkappa %.17g\n", overall_accuracy(cm),
                    cohen_kappa(cm));
        return 0;
    }
    if (checkpoint.empty())
        throw parameter_error("eval needs --checkpoint or --fixture");
    const auto model = load_checkpoint(checkpoint);
    const PixelDataset ds = maybe_scaled(resolve_dataset(cfg), scaler_path);
    if (ds.classes() != model.config.k)
        throw data_error("dataset class count does not match the checkpoint");

    std::vector<std::uint16_t> pred;
    predict_all(model, ds, pred);
    ConfusionMatrix cm = make_confusion(ds.class_names);
    for (std::size_t i = 0; i < ds.size(); ++i)
        confusion_accumulate(cm, ds.labels[i], pred[i]);
    std::fputs(render_report(cm).c_str(), stdout);
    const std::string report_path = out_file(out_dir, "report.csv");
    write_report_csv(report_path, cm);
    std::printf("report written to %s\n", report_path.c_str());

    if (baseline) {
        PixelDataset fit_ds = ds;
        if (!train_data.empty())
            fit_ds = maybe_scaled(load_dataset(train_data), scaler_path);
        const LogisticBaseline lb =
            logistic_baseline_fit(fit_ds, 50, cfg.batch, 0.05, cfg.seed);
        std::printf("logistic baseline OA %.6f (network OA %.6f)\n",
                    logistic_oa(lb, ds), overall_accuracy(cm));
    }
    return 0;
}

int cmd_predict(const RunConfig& cfg, const std::string& out_dir,
                const std::string& checkpoint, const std::string& scaler_path,
                std::size_t rows, std::size_t cols) {
    const auto model = load_checkpoint(checkpoint);
    const PixelDataset ds = maybe_scaled(resolve_dataset(cfg), scaler_path);
    const std::size_t n = ds.size();
    if (rows == 0 && cols == 0) {
        rows = 1;
        cols = n;
    }
    if (rows == 0 || cols == 0 || rows * cols != n)
        throw data_error("--rows x --cols must cover exactly the sample count");

    std::vector<std::uint16_t> pred;
    predict_all(model, ds, pred);

    const std::string pgm_path = out_file(out_dir, "classmap.pgm");
    std::ofstream pgm(pgm_path, std::ios::binary);
    if (!pgm) throw data_error("cannot open for writing: " + pgm_path);
    const std::size_t maxval = model.config.k > 1 ? model.config.k - 1 : 1;
    pgm << "P2\n" << cols << ' ' << rows << '\n' << maxval << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c)
            pgm << pred[r * cols + c] << (c + 1 < cols ? ' ' : '\n');
    }
    if (!pgm) throw data_error("write failed: " + pgm_path);

    const std::string csv_path = out_file(out_dir, "classmap.csv");
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw data_error("cannot open for writing: " + csv_path);
    csv << "row,col,class\n";
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            csv << r << ',' << c << ',' << pred[r * cols + c] << '\n';
    if (!csv) throw data_error("write failed: " + csv_path);

    std::printf("wrote %s and %s (%zux%zu cells)\n", pgm_path.c_str(),
                csv_path.c_str(), rows, cols);
    return 0;
}

int cmd_lr_find(const RunConfig& cfg, const std::string& out_dir, double lo,
                double hi, std::size_t iters) {
    const PixelDataset full = resolve_dataset(cfg);
    auto [train_raw, test_raw] =
        stratified_split(full, cfg.train_fraction, cfg.seed);
    const ScalerParams sp = scaler_fit(train_raw);
    const PixelDataset train = scaler_apply(sp, train_raw);

    auto model = make_model<float>(fit_to_catalog(cfg.model, full));
    RngState init_rng(derive_seed(cfg.seed, 6));
    init_params(model, init_rng);

    const TrainConfig tc = train_config_from(cfg);
    const LrRangeResult r = lr_range_test(model, train, lo, hi, iters, tc);
    const std::string path = out_file(out_dir, "lr_range.csv");
    write_lr_range_csv(path, r);
    std::printf("%zu rates probed%s; suggestion %.6g; wrote %s\n",
                r.points.size(), r.truncated ? " (truncated at divergence)" : "",
                r.suggestion, path.c_str());
    return 0;
}

int cmd_pca(const RunConfig& cfg, const std::string& out_dir,
            std::size_t components) {
    const PixelDataset raw = resolve_dataset(cfg);
    const PixelDataset ds = scaler_apply(scaler_fit(raw), raw);
    const PcaResult r = pca_project(ds, components);

    char buf[64];
    const std::string proj_path = out_file(out_dir, "pca_projection.csv");
    std::ofstream proj(proj_path, std::ios::binary);
    if (!proj) throw data_error("cannot open for writing: " + proj_path);
    for (std::size_t p = 0; p < components; ++p) proj << 'c' << (p + 1) << ',';
    proj << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t p = 0; p < components; ++p) {
            std::snprintf(buf, sizeof buf, "%.17g,", r.projected(i, p));
            proj << buf;
        }
        proj << ds.labels[i] << '\n';
    }
    if (!proj) throw data_error("write failed: " + proj_path);

    const std::string ratio_path = out_file(out_dir, "pca_ratios.csv");
    std::ofstream ratios(ratio_path, std::ios::binary);
    if (!ratios) throw data_error("cannot open for writing: " + ratio_path);
    ratios << "component,ratio,cumulative\n";
    double cumulative = 0.0;
    for (std::size_t p = 0; p < r.ratios.size(); ++p) {
        cumulative += r.ratios[p];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g", p + 1, r.ratios[p],
                      cumulative);
        ratios << buf << '\n';
    }
    if (!ratios) throw data_error("write failed: " + ratio_path);

    double top = 0.0;
    for (std::size_t p = 0; p < components && p < r.ratios.size(); ++p)
        top += r.ratios[p];
    std::printf("first %zu components explain %.1f%% of variance; wrote %s, %s\n",
                components, 100.0 * top, proj_path.c_str(), ratio_path.c_str());
    return 0;
}

int cmd_inspect(const RunConfig& cfg, const std::string& out_dir,
                const std::string& checkpoint, const std::string& scaler_path,
                const std::vector<std::size_t>& samples) {
    const auto model = load_checkpoint(checkpoint);
    const PixelDataset ds = maybe_scaled(resolve_dataset(cfg), scaler_path);
    if (ds.t != model.config.t || ds.b != model.config.b)
        throw data_error("dataset dims do not match the checkpoint");

    ForwardCache<float> cache = make_cache<float>(model.config);
    Tensor<float> x({model.config.t, model.config.b});
    const std::size_t row_len = ds.t * ds.b;
    char buf[48];
    for (const std::size_t idx : samples) {
        if (idx >= ds.size())
            throw data_error("inspect: sample index out of range");
        std::copy(ds.sample(idx), ds.sample(idx) + row_len, x.data());
        model_forward_into(model, x, RunMode::eval, nullptr, cache);
        const std::string name = "activation_" + std::to_string(idx) + ".csv";
        const std::string path = out_file(out_dir, name.c_str());
        std::ofstream os(path, std::ios::binary);
        if (!os) throw data_error("cannot open for writing: " + path);
        for (std::size_t s = 0; s < model.config.t; ++s) {
            for (std::size_t d = 0; d < model.config.d_out; ++d) {
                std::snprintf(buf, sizeof buf, "%.17g",
                              cache.y_timed(s, d, 0));
                os << buf << (d + 1 < model.config.d_out ? "," : "\n");
            }
        }
        if (!os) throw data_error("write failed: " + path);
        std::size_t best = 0;
        for (std::size_t c = 1; c < model.config.k; ++c)
            if (cache.probs[c] > cache.probs[best]) best = c;
        std::printf("sample %zu (label %s) -> %s, predicted %s\n", idx,
                    ds.class_names[ds.labels[idx]].c_str(), path.c_str(),
                    ds.class_names[best].c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pixelrcnn: per-pixel time-series classification"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = ".";
    std::uint64_t seed_flag = 0;
    app.add_option("--config", config_path, "JSON run configuration");
    auto* seed_opt =
        app.add_option("--seed", seed_flag, "master seed (overrides config)");
    app.add_option("--out", out_dir, "output directory (default .)");

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    std::size_t classes = 0, per_class = 0;
    double sigma = -1.0;
    std::string proportions;
    auto* classes_opt = synth->add_option("--classes", classes, "class count");
    auto* per_class_opt =
        synth->add_option("--per-class", per_class, "samples per class");
    auto* sigma_opt = synth->add_option("--sigma", sigma, "noise level");
    auto* prop_opt = synth->add_option(
        "--proportions", proportions,
        "class-count preset; 'table3' uses the bundled reference distribution");

    auto* train = app.add_subcommand("train", "split, scale and train");
    std::string data_path;
    std::size_t epochs = 0, batch = 0, period = 0;
    double eta_max = -1.0, eta_min = -1.0, train_fraction = -1.0;
    bool cyclic = true;
    auto* data_opt = train->add_option("--data", data_path, "PXRC dataset path");
    auto* epochs_opt = train->add_option("--epochs", epochs, "training epochs");
    auto* batch_opt = train->add_option("--batch", batch, "mini-batch size");
    auto* eta_max_opt = train->add_option(
        "--eta-max", eta_max, "peak learning rate (omit to auto-derive)");
    auto* eta_min_opt =
        train->add_option("--eta-min", eta_min, "floor learning rate");
    auto* period_opt =
        train->add_option("--period", period, "cosine period in steps");
    auto* cyclic_opt = train->add_flag("--cyclic,!--no-cyclic", cyclic,
                                       "restart the cosine cycle (default on)");
    auto* fraction_opt = train->add_option("--train-fraction", train_fraction,
                                           "stratified train share");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    std::string checkpoint, fixture, scaler_path, train_data;
    bool baseline = false;
    eval->add_option("--checkpoint", checkpoint, "PRCN checkpoint path");
    auto* eval_data_opt =
        eval->add_option("--data", data_path, "PXRC dataset path");
    eval->add_option("--fixture", fixture,
                     "score a raw confusion-matrix CSV instead of a model");
    eval->add_option("--scaler", scaler_path, "scaler CSV from training");
    eval->add_option("--train-data", train_data,
                     "dataset for fitting the --baseline model");
    eval->add_flag("--baseline", baseline,
                   "also fit and score a logistic baseline");

    auto* predict = app.add_subcommand("predict", "write a class map");
    std::size_t rows = 0, cols = 0;
    predict->add_option("--checkpoint", checkpoint, "PRCN checkpoint path")
        ->required();
    auto* predict_data_opt =
        predict->add_option("--data", data_path, "PXRC dataset path");
    predict->add_option("--scaler", scaler_path, "scaler CSV from training");
    predict->add_option("--rows", rows, "grid height");
    predict->add_option("--cols", cols, "grid width");

    auto* lr_find = app.add_subcommand("lr-find", "learning-rate range test");
    double lo = 1e-5, hi = 1.0;
    std::size_t iters = 80;
    auto* lr_data_opt =
        lr_find->add_option("--data", data_path, "PXRC dataset path");
    lr_find->add_option("--lo", lo, "starting rate");
    lr_find->add_option("--hi", hi, "final rate");
    lr_find->add_option("--iters", iters, "probe count");

    auto* pca = app.add_subcommand("pca", "project samples onto principal axes");
    std::size_t components = 3;
    auto* pca_data_opt = pca->add_option("--data", data_path, "PXRC dataset path");
    pca->add_option("--components", components, "projection dimensions");

    auto* inspect =
        app.add_subcommand("inspect", "dump time-distributed activations");
    std::vector<std::size_t> samples{0};
    inspect->add_option("--checkpoint", checkpoint, "PRCN checkpoint path")
        ->required();
    auto* inspect_data_opt =
        inspect->add_option("--data", data_path, "PXRC dataset path");
    inspect->add_option("--scaler", scaler_path, "scaler CSV from training");
    inspect->add_option("--samples", samples, "sample indices")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg = load_run_config(config_path);
        if (seed_opt->count()) cfg.seed = seed_flag;
        if (classes_opt->count()) cfg.classes = classes;
        if (per_class_opt->count()) cfg.per_class = per_class;
        if (sigma_opt->count()) cfg.sigma = sigma;
        if (prop_opt->count()) cfg.proportions = proportions;
        if (data_opt->count() || eval_data_opt->count() ||
            predict_data_opt->count() || lr_data_opt->count() ||
            pca_data_opt->count() || inspect_data_opt->count())
            cfg.data_path = data_path;
        if (epochs_opt->count()) cfg.epochs = epochs;
        if (batch_opt->count()) cfg.batch = batch;
        if (eta_max_opt->count()) cfg.eta_max = eta_max;
        if (eta_min_opt->count()) cfg.eta_min = eta_min;
        if (period_opt->count()) cfg.period = period;
        if (cyclic_opt->count()) cfg.cyclic = cyclic;
        if (fraction_opt->count()) cfg.train_fraction = train_fraction;

        if (app.got_subcommand(synth)) return cmd_synth(cfg, out_dir);
        if (app.got_subcommand(train)) return cmd_train(cfg, out_dir);
        if (app.got_subcommand(eval))
            return cmd_eval(cfg, out_dir, checkpoint, fixture, scaler_path,
                            train_data, baseline);
        if (app.got_subcommand(predict))
            return cmd_predict(cfg, out_dir, checkpoint, scaler_path, rows, cols);
        if (app.got_subcommand(lr_find))
            return cmd_lr_find(cfg, out_dir, lo, hi, iters);
        if (app.got_subcommand(pca)) return cmd_pca(cfg, out_dir, components);
        if (app.got_subcommand(inspect))
            return cmd_inspect(cfg, out_dir, checkpoint, scaler_path, samples);
        return 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
