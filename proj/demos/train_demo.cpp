// Minimal end-to-end walkthrough: synthesize a labelled time-series set,
// split and standardize it, train the network, and print a test report.
// Small enough to finish in seconds; see the CLI for the full-size runs.

#include <algorithm>
#include <cstdio>

#include "prcnn/prcnn.hpp"

using namespace prcnn;

int main() {
    SynthSpec spec;
    spec.t = 9;
    spec.bands = 5;
    spec.counts.assign(5, 120);
    spec.sigma = 0.15;
    spec.seed = 7;
    const PixelDataset full = synth_generate(spec);
    auto [train_raw, test_raw] = stratified_split(full, 0.6, 7);

    const ScalerParams sp = scaler_fit(train_raw);
    const PixelDataset train = scaler_apply(sp, train_raw);
    const PixelDataset test = scaler_apply(sp, test_raw);

    ModelConfig mc;
    mc.k = full.classes();
    auto model = make_model<float>(mc);
    RngState init_rng(derive_seed(7, 6));
    init_params(model, init_rng);

    TrainConfig tc;
    tc.epochs = 12;
    tc.batch_size = 64;
    tc.seed = 7;
    tc.schedule = auto_schedule(model, train, tc);
    tc.verbose = true;
    const TrainingReport rep = fit(model, train, &test, tc);
    std::printf("final train loss %.4f, train OA %.4f, test OA %.4f\n",
                rep.final_train_loss, rep.final_train_oa, rep.final_test_oa);

    ConfusionMatrix cm = make_confusion(test.class_names);
    ForwardCache<float> cache = make_cache<float>(mc);
    Tensor<float> x({mc.t, mc.b});
    for (std::size_t i = 0; i < test.size(); ++i) {
        std::copy(test.sample(i), test.sample(i) + mc.t * mc.b, x.data());
        model_forward_into(model, x, RunMode::eval, nullptr, cache);
        std::size_t best = 0;
        for (std::size_t c = 1; c < mc.k; ++c)
            if (cache.probs[c] > cache.probs[best]) best = c;
        confusion_accumulate(cm, test.labels[i], best);
    }
    std::printf("%s", render_report(cm).c_str());
    return 0;
}
