#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "prcnn/error.hpp"
#include "prcnn/io.hpp"
#include "prcnn/linalg.hpp"
#include "prcnn/rng.hpp"
#include "prcnn/tensor.hpp"

namespace prcnn {

// Labeled per-pixel time series: X is i x t x b, one row of t time steps
// with b features each per sample.
struct PixelDataset {
    std::size_t t = 0, b = 0;
    std::vector<std::string> class_names;
    Tensor<float> x;
    std::vector<std::uint16_t> labels;
    std::string provenance;

    std::size_t size() const { return labels.size(); }
    std::size_t classes() const { return class_names.size(); }
    const float* sample(std::size_t i) const { return x.data() + i * t * b; }
};

inline void check_dataset(const PixelDataset& ds) {
    if (ds.t == 0 || ds.b == 0)
        throw data_error("dataset: t and b must be positive");
    if (ds.x.rank() != 3 || ds.x.dim(0) != ds.size() || ds.x.dim(1) != ds.t ||
        ds.x.dim(2) != ds.b)
        throw data_error("dataset: tensor shape inconsistent with labels");
    if (ds.class_names.empty()) throw data_error("dataset: empty class catalog");
    for (std::uint16_t y : ds.labels)
        if (y >= ds.classes()) throw data_error("dataset: label out of range");
}

// One acquisition date: the four reflectance grids used downstream
// (blue, green, red, near-infrared), all h x w.
struct BandStack {
    std::string date;
    Tensor<float> b2, b3, b4, b8;
};

// Per-cell optional class id over the same grid; -1 marks unlabeled cells.
struct LabelMask {
    std::size_t h = 0, w = 0;
    std::vector<std::int32_t> cells;
    std::vector<std::string> class_names;
};

// Normalized difference vegetation index (nir - red) / (nir + red),
// defined as 0 where both bands are 0 so water and shadow cells stay
// usable instead of propagating NaN.
inline Tensor<float> ndvi(const Tensor<float>& b8, const Tensor<float>& b4) {
    if (b8.rank() != 2 || b4.rank() != 2 || b8.shape() != b4.shape())
        throw data_error("ndvi: band grids must be rank-2 and same shape");
    Tensor<float> out(b8.shape());
    for (std::size_t i = 0; i < out.numel(); ++i) {
        const float nir = b8[i], red = b4[i];
        if (nir < 0.0f || red < 0.0f)
            throw data_error("ndvi: negative reflectance");
        const float denom = nir + red;
        out[i] = denom == 0.0f ? 0.0f : (nir - red) / denom;
    }
    return out;
}

// Extracts one t x 5 sample per labeled cell, feature columns
// (B2, B3, B4, B8, NDVI) per date, rows in date order.
inline PixelDataset assemble_dataset(const std::vector<BandStack>& stacks,
                                     const LabelMask& mask) {
    if (stacks.empty()) throw data_error("assemble: no acquisition dates");
    const std::size_t h = mask.h, w = mask.w;
    if (h == 0 || w == 0 || mask.cells.size() != h * w)
        throw data_error("assemble: bad label mask dims");
    if (mask.class_names.empty())
        throw data_error("assemble: mask has no class catalog");
    for (std::size_t s = 0; s < stacks.size(); ++s) {
        const BandStack& st = stacks[s];
        for (const Tensor<float>* g : {&st.b2, &st.b3, &st.b4, &st.b8})
            if (g->rank() != 2 || g->dim(0) != h || g->dim(1) != w)
                throw data_error("assemble: band grid dims mismatch mask");
        if (s > 0 && !stacks[s - 1].date.empty() && !st.date.empty() &&
            !(stacks[s - 1].date < st.date))
            throw data_error("assemble: dates must be strictly increasing");
    }

    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < h * w; ++c) {
        const std::int32_t y = mask.cells[c];
        if (y >= 0) {
            if (static_cast<std::size_t>(y) >= mask.class_names.size())
                throw data_error("assemble: label out of catalog range");
            cells.push_back(c);
        }
    }
    if (cells.empty()) throw data_error("assemble: no labeled cells");

    const std::size_t t = stacks.size(), b = 5;
    PixelDataset ds;
    ds.t = t;
    ds.b = b;
    ds.class_names = mask.class_names;
    ds.x = Tensor<float>({cells.size(), t, b});
    ds.labels.reserve(cells.size());
    std::vector<Tensor<float>> vi;
    vi.reserve(t);
    for (const BandStack& st : stacks) vi.push_back(ndvi(st.b8, st.b4));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::size_t c = cells[i];
        ds.labels.push_back(static_cast<std::uint16_t>(mask.cells[c]));
        for (std::size_t s = 0; s < t; ++s) {
            float* row = ds.x.data() + (i * t + s) * b;
            row[0] = stacks[s].b2[c];
            row[1] = stacks[s].b3[c];
            row[2] = stacks[s].b4[c];
            row[3] = stacks[s].b8[c];
            row[4] = vi[s][c];
        }
    }
    ds.provenance = "assembled from " + std::to_string(t) + " acquisition dates";
    return ds;
}

// Synthetic phenology-like generator. Each class gets one per-band seasonal
// template a*sin(2*pi*(j+phi)/t) + c with (a, phi, c) drawn once from the
// seed; samples are the template plus element-wise Gaussian noise.
struct SynthSpec {
    std::size_t t = 9;
    std::size_t bands = 5;
    std::vector<std::size_t> counts;       // one entry per class
    double sigma = 0.15;
    std::uint64_t seed = 0;
    std::vector<std::string> class_names;  // optional, defaults to class_<i>
    // Template draw ranges. Deliberately tight: at the reference noise level
    // (sigma 0.15) the classes overlap enough that accuracy separates models
    // instead of saturating at 100% for anything linear.
    double amp_lo = 0.02, amp_hi = 0.18;   // template amplitude range
    double off_lo = 0.35, off_hi = 0.65;   // template offset range
};

// The bundled 15-class agricultural land-cover distribution used by the
// `--proportions table3` preset (92,116 samples total).
inline std::vector<std::pair<std::string, std::size_t>> reference_class_counts() {
    return {{"Tomatoes", 3020},  {"Artificials", 9343},
            {"Trees", 7384},     {"Rye", 4382},
            {"Wheat", 12826},    {"Soya", 5836},
            {"Apple", 849},      {"Peer", 495},
            {"Temporary grassland", 1744},
            {"Water", 2451},     {"Lucerne", 17942},
            {"Drum wheat", 1188},{"Vineyard", 6110},
            {"Barley", 2549},    {"Maize", 15997}};
}

inline Tensor<double> synth_templates(const SynthSpec& spec) {
    const std::size_t k = spec.counts.size();
    Tensor<double> tpl({k, spec.bands, spec.t});
    RngState rng(derive_seed(spec.seed, 0));
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t band = 0; band < spec.bands; ++band) {
            const double a = rng.uniform(spec.amp_lo, spec.amp_hi);
            const double phi = rng.uniform(0.0, static_cast<double>(spec.t));
            const double off = rng.uniform(spec.off_lo, spec.off_hi);
            for (std::size_t j = 0; j < spec.t; ++j)
                tpl(c, band, j) =
                    a * std::sin(2.0 * 3.14159265358979323846 * (j + phi) /
                                 static_cast<double>(spec.t)) +
                    off;
        }
    }
    return tpl;
}

inline PixelDataset synth_generate(const SynthSpec& spec) {
    const std::size_t k = spec.counts.size();
    if (k == 0) throw parameter_error("synth: need at least one class");
    if (k > 0xffff) throw parameter_error("synth: too many classes");
    if (spec.t == 0 || spec.bands == 0)
        throw parameter_error("synth: t and bands must be positive");
    if (!(spec.sigma >= 0.0)) throw parameter_error("synth: sigma must be >= 0");
    if (!(spec.amp_lo < spec.amp_hi) || !(spec.off_lo < spec.off_hi))
        throw parameter_error("synth: bad template draw ranges");
    std::size_t total = 0;
    for (std::size_t n : spec.counts) {
        if (n == 0) throw parameter_error("synth: class counts must be positive");
        total += n;
    }
    if (!spec.class_names.empty() && spec.class_names.size() != k)
        throw parameter_error("synth: class name count mismatch");

    const Tensor<double> tpl = synth_templates(spec);
    PixelDataset ds;
    ds.t = spec.t;
    ds.b = spec.bands;
    if (spec.class_names.empty()) {
        for (std::size_t c = 0; c < k; ++c)
            ds.class_names.push_back("class_" + std::to_string(c));
    } else {
        ds.class_names = spec.class_names;
    }
    ds.x = Tensor<float>({total, spec.t, spec.bands});
    ds.labels.reserve(total);

    RngState noise(derive_seed(spec.seed, 1));
    std::size_t i = 0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t n = 0; n < spec.counts[c]; ++n, ++i) {
            ds.labels.push_back(static_cast<std::uint16_t>(c));
            float* row = ds.x.data() + i * spec.t * spec.bands;
            for (std::size_t j = 0; j < spec.t; ++j)
                for (std::size_t band = 0; band < spec.bands; ++band)
                    row[j * spec.bands + band] = static_cast<float>(
                        tpl(c, band, j) +
                        (spec.sigma > 0.0 ? spec.sigma * noise.gauss() : 0.0));
        }
    }
    ds.provenance = "synthetic seed=" + std::to_string(spec.seed) +
                    " sigma=" + std::to_string(spec.sigma);
    return ds;
}

// Principal-component projection of flattened samples. All arithmetic in
// double so results are stable against sample order. The caller is expected
// to standardize the dataset first; this routine only mean-centers.
struct PcaResult {
    Tensor<double> projected;     // i x n_components
    std::vector<double> ratios;   // all t*b components, descending
};

inline PcaResult pca_project(const PixelDataset& ds, std::size_t n_components = 3) {
    check_dataset(ds);
    const std::size_t n = ds.size(), d = ds.t * ds.b;
    if (n_components == 0 || n_components > d)
        throw parameter_error("pca: component count out of range");
    Tensor<double> flat({n, d});
    for (std::size_t i = 0; i < n * d; ++i)
        flat[i] = static_cast<double>(ds.x[i]);
    const auto svd = svd_covariance(flat);

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += flat(i, j);
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);

    PcaResult out;
    out.projected = Tensor<double>({n, n_components});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < n_components; ++p) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                acc += (flat(i, j) - mean[j]) * svd.components(j, p);
            out.projected(i, p) = acc;
        }
    double total = 0.0;
    for (double v : svd.variances) total += v;
    if (total <= 0.0) throw data_error("pca: zero total variance");
    out.ratios.reserve(d);
    for (double v : svd.variances) out.ratios.push_back(v / total);
    return out;
}

// Binary dataset file: magic "PXRC", version u16 = 1, u32 sample count,
// u32 t, u32 b, u16 class count, class-name table (u16 length + utf-8),
// little-endian f32 features row-major (i, t, b), then u16 labels.
inline void save_dataset(const std::string& path, const PixelDataset& ds) {
    check_dataset(ds);
    if (ds.classes() > 0xffff) throw data_error("save dataset: too many classes");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    io::store_bytes(os, "PXRC", 4);
    io::store_u16(os, 1);
    io::store_u32(os, static_cast<std::uint32_t>(ds.size()));
    io::store_u32(os, static_cast<std::uint32_t>(ds.t));
    io::store_u32(os, static_cast<std::uint32_t>(ds.b));
    io::store_u16(os, static_cast<std::uint16_t>(ds.classes()));
    for (const auto& name : ds.class_names) io::store_string(os, name);
    for (std::size_t i = 0; i < ds.x.numel(); ++i) io::store_f32(os, ds.x[i]);
    for (std::uint16_t y : ds.labels) io::store_u16(os, y);
    if (!os) throw data_error("write failed: " + path);
}

inline PixelDataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open: " + path);
    char magic[4];
    io::load_bytes(is, magic, 4, "magic");
    if (std::string(magic, 4) != "PXRC")
        throw format_error("dataset file: bad magic");
    const std::uint16_t version = io::load_u16(is, "version");
    if (version != 1) throw format_error("dataset file: unsupported version");
    PixelDataset ds;
    const std::uint32_t n = io::load_u32(is, "sample count");
    ds.t = io::load_u32(is, "t");
    ds.b = io::load_u32(is, "b");
    const std::uint16_t k = io::load_u16(is, "class count");
    for (std::uint16_t c = 0; c < k; ++c)
        ds.class_names.push_back(io::load_string(is, "class name"));
    ds.x = Tensor<float>({n, ds.t, ds.b});
    for (std::size_t i = 0; i < ds.x.numel(); ++i)
        ds.x[i] = io::load_f32(is, "feature data");
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.labels[i] = io::load_u16(is, "labels");
    ds.provenance = "loaded from " + path;
    check_dataset(ds);
    return ds;
}

// CSV interchange: header t<j>b<k> feature columns plus a final label
// column; one sample per row. %.9g keeps float values round-trippable.
inline void export_dataset_csv(const std::string& path, const PixelDataset& ds) {
    check_dataset(ds);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    for (std::size_t j = 0; j < ds.t; ++j)
        for (std::size_t band = 0; band < ds.b; ++band)
            os << 't' << j << 'b' << band << ',';
    os << "label\n";
    char buf[32];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const float* row = ds.sample(i);
        for (std::size_t f = 0; f < ds.t * ds.b; ++f) {
            std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(row[f]));
            os << buf << ',';
        }
        os << ds.labels[i] << '\n';
    }
    if (!os) throw data_error("write failed: " + path);
}

inline PixelDataset import_dataset_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line)) throw format_error("dataset csv: empty file");
    auto header = [&] {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur += ch;
            }
        }
        out.push_back(cur);
        return out;
    }();
    if (header.size() < 2 || header.back() != "label")
        throw format_error("dataset csv: last header column must be 'label'");
    std::size_t t = 0, b = 0;
    for (std::size_t f = 0; f + 1 < header.size(); ++f) {
        std::size_t j = 0, band = 0;
        if (std::sscanf(header[f].c_str(), "t%zub%zu", &j, &band) != 2)
            throw format_error("dataset csv: bad feature column name");
        t = std::max(t, j + 1);
        b = std::max(b, band + 1);
    }
    if (header.size() - 1 != t * b)
        throw format_error("dataset csv: feature columns do not fill a t x b grid");

    std::vector<float> values;
    std::vector<std::uint16_t> labels;
    std::size_t max_label = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string cell;
        for (std::size_t f = 0; f < t * b; ++f) {
            if (!std::getline(row, cell, ','))
                throw format_error("dataset csv: short row");
            values.push_back(std::strtof(cell.c_str(), nullptr));
        }
        if (!std::getline(row, cell, ','))
            throw format_error("dataset csv: missing label");
        const long y = std::strtol(cell.c_str(), nullptr, 10);
        if (y < 0 || y > 0xffff) throw format_error("dataset csv: bad label");
        labels.push_back(static_cast<std::uint16_t>(y));
        max_label = std::max(max_label, static_cast<std::size_t>(y));
    }
    if (labels.empty()) throw data_error("dataset csv: no samples");
    PixelDataset ds;
    ds.t = t;
    ds.b = b;
    for (std::size_t c = 0; c <= max_label; ++c)
        ds.class_names.push_back("class_" + std::to_string(c));
    ds.x = Tensor<float>({labels.size(), t, b}, std::move(values));
    ds.labels = std::move(labels);
    ds.provenance = "imported from " + path;
    return ds;
}

}  // namespace prcnn
