#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "prcnn/error.hpp"

namespace prcnn {

// Square confusion matrix, rows = ground truth, columns = predicted.
struct ConfusionMatrix {
    std::vector<std::string> class_names;
    std::vector<std::uint64_t> counts;  // k*k row-major

    std::size_t k() const { return class_names.size(); }
    std::uint64_t& at(std::size_t t, std::size_t p) { return counts[t * k() + p]; }
    std::uint64_t at(std::size_t t, std::size_t p) const {
        return counts[t * k() + p];
    }
    std::uint64_t row_total(std::size_t t) const {
        std::uint64_t s = 0;
        for (std::size_t p = 0; p < k(); ++p) s += at(t, p);
        return s;
    }
    std::uint64_t col_total(std::size_t p) const {
        std::uint64_t s = 0;
        for (std::size_t t = 0; t < k(); ++t) s += at(t, p);
        return s;
    }
    std::uint64_t grand_total() const {
        std::uint64_t s = 0;
        for (std::uint64_t c : counts) s += c;
        return s;
    }
    std::uint64_t diag_total() const {
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < k(); ++i) s += at(i, i);
        return s;
    }
};

inline ConfusionMatrix make_confusion(std::vector<std::string> class_names) {
    if (class_names.empty())
        throw parameter_error("confusion matrix: need at least one class");
    ConfusionMatrix cm;
    cm.counts.assign(class_names.size() * class_names.size(), 0);
    cm.class_names = std::move(class_names);
    return cm;
}

inline ConfusionMatrix make_confusion(std::size_t k) {
    std::vector<std::string> names;
    names.reserve(k);
    for (std::size_t i = 0; i < k; ++i) names.push_back("class_" + std::to_string(i));
    return make_confusion(std::move(names));
}

inline void confusion_accumulate(ConfusionMatrix& cm, std::size_t y_true,
                                 std::size_t y_pred) {
    if (y_true >= cm.k() || y_pred >= cm.k())
        throw data_error("confusion matrix: label out of range");
    ++cm.at(y_true, y_pred);
}

// Element-wise sum; equivalent to accumulating the concatenated streams.
inline ConfusionMatrix merge_confusion(const ConfusionMatrix& a,
                                       const ConfusionMatrix& b) {
    if (a.k() != b.k())
        throw data_error("confusion matrix: merge size mismatch");
    ConfusionMatrix out = a;
    for (std::size_t i = 0; i < out.counts.size(); ++i)
        out.counts[i] += b.counts[i];
    return out;
}

inline double overall_accuracy(const ConfusionMatrix& cm) {
    const std::uint64_t n = cm.grand_total();
    if (n == 0) throw data_error("overall accuracy undefined on empty matrix");
    return static_cast<double>(cm.diag_total()) / static_cast<double>(n);
}

// PA is per-class recall (row-normalized diagonal), UA per-class precision
// (column-normalized). A class absent from truth or predictions has the
// corresponding measure undefined rather than zero.
struct ClassAccuracy {
    double pa = 0.0;
    double ua = 0.0;
    bool pa_defined = false;
    bool ua_defined = false;
};

inline std::vector<ClassAccuracy> class_metrics(const ConfusionMatrix& cm) {
    if (cm.grand_total() == 0)
        throw data_error("class metrics undefined on empty matrix");
    std::vector<ClassAccuracy> out(cm.k());
    for (std::size_t i = 0; i < cm.k(); ++i) {
        const std::uint64_t row = cm.row_total(i), col = cm.col_total(i);
        const double diag = static_cast<double>(cm.at(i, i));
        if (row) {
            out[i].pa = diag / static_cast<double>(row);
            out[i].pa_defined = true;
        }
        if (col) {
            out[i].ua = diag / static_cast<double>(col);
            out[i].ua_defined = true;
        }
    }
    return out;
}

// Chance-corrected agreement with marginal-product expected agreement:
// kappa = (p_o - p_e) / (1 - p_e).
inline double cohen_kappa(const ConfusionMatrix& cm) {
    const std::uint64_t n = cm.grand_total();
    if (n == 0) throw data_error("kappa undefined on empty matrix");
    const double dn = static_cast<double>(n);
    const double p_o = static_cast<double>(cm.diag_total()) / dn;
    double p_e = 0.0;
    for (std::size_t i = 0; i < cm.k(); ++i)
        p_e += (static_cast<double>(cm.row_total(i)) / dn) *
               (static_cast<double>(cm.col_total(i)) / dn);
    if (p_e >= 1.0)
        throw data_error("kappa undefined: expected agreement is 1");
    return (p_o - p_e) / (1.0 - p_e);
}

namespace detail {

// Whole-percent rounding, ties to even, mirroring how the report tables
// present per-class accuracies.
inline long percent_half_even(double ratio) {
    return static_cast<long>(std::nearbyint(ratio * 100.0));
}

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// CSV schema: one header row of class names, k count rows, then PA, UA, OA
// and kappa footer rows. Raw ratios, full precision.
inline std::string render_report_csv(const ConfusionMatrix& cm) {
    std::ostringstream os;
    os << "class";
    for (const auto& name : cm.class_names) os << ',' << name;
    os << '\n';
    for (std::size_t i = 0; i < cm.k(); ++i) {
        os << cm.class_names[i];
        for (std::size_t j = 0; j < cm.k(); ++j) os << ',' << cm.at(i, j);
        os << '\n';
    }
    const auto per_class = class_metrics(cm);
    os << "PA";
    for (const auto& c : per_class)
        os << ',' << (c.pa_defined ? detail::fmt_double(c.pa) : "undefined");
    os << '\n';
    os << "UA";
    for (const auto& c : per_class)
        os << ',' << (c.ua_defined ? detail::fmt_double(c.ua) : "undefined");
    os << '\n';
    os << "OA," << detail::fmt_double(overall_accuracy(cm)) << '\n';
    os << "kappa," << detail::fmt_double(cohen_kappa(cm)) << '\n';
    return os.str();
}

// Fixed-width text table in the classical accuracy-assessment layout:
// truth rows with totals and PA, a predicted-totals row, a UA row, then
// the two summary scores.
inline std::string render_report(const ConfusionMatrix& cm) {
    const std::size_t k = cm.k();
    const auto per_class = class_metrics(cm);
    std::size_t name_w = sizeof("truth \\ pred") - 1;
    for (const auto& n : cm.class_names) name_w = std::max(name_w, n.size());
    std::vector<std::size_t> col_w(k);
    for (std::size_t j = 0; j < k; ++j)
        col_w[j] = std::max<std::size_t>(cm.class_names[j].size(), 6);

    std::ostringstream os;
    auto pad = [&](const std::string& s, std::size_t w) {
        os << s;
        for (std::size_t i = s.size(); i < w + 2; ++i) os << ' ';
    };
    auto num = [&](std::uint64_t v, std::size_t w) {
        pad(std::to_string(v), w);
    };
    auto pct = [&](double ratio, bool defined, std::size_t w) {
        pad(defined ? std::to_string(detail::percent_half_even(ratio)) + "%"
                    : "n/a",
            w);
    };

    pad("truth \\ pred", name_w);
    for (std::size_t j = 0; j < k; ++j) pad(cm.class_names[j], col_w[j]);
    pad("total", 6);
    pad("PA", 4);
    os << '\n';
    for (std::size_t i = 0; i < k; ++i) {
        pad(cm.class_names[i], name_w);
        for (std::size_t j = 0; j < k; ++j) num(cm.at(i, j), col_w[j]);
        num(cm.row_total(i), 6);
        pct(per_class[i].pa, per_class[i].pa_defined, 4);
        os << '\n';
    }
    pad("total", name_w);
    for (std::size_t j = 0; j < k; ++j) num(cm.col_total(j), col_w[j]);
    num(cm.grand_total(), 6);
    os << '\n';
    pad("UA", name_w);
    for (std::size_t j = 0; j < k; ++j)
        pct(per_class[j].ua, per_class[j].ua_defined, col_w[j]);
    os << '\n';
    char line[96];
    std::snprintf(line, sizeof line, "OA %.6f  kappa %.6f\n",
                  overall_accuracy(cm), cohen_kappa(cm));
    os << line;
    return os.str();
}

inline void write_report_csv(const std::string& path, const ConfusionMatrix& cm) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os << render_report_csv(cm);
    if (!os) throw data_error("write failed: " + path);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
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
}

}  // namespace detail

// Reads the CSV report schema back into a matrix. Footer rows (PA/UA/OA/
// kappa) are optional and ignored; the counts are authoritative.
inline ConfusionMatrix parse_confusion_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw format_error("confusion csv: empty input");
    auto header = detail::split_csv_line(line);
    if (header.size() < 2 || header[0] != "class")
        throw format_error("confusion csv: bad header row");
    std::vector<std::string> names(header.begin() + 1, header.end());
    ConfusionMatrix cm = make_confusion(names);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!std::getline(is, line))
            throw format_error("confusion csv: missing count row");
        auto cells = detail::split_csv_line(line);
        if (cells.size() != names.size() + 1 || cells[0] != names[i])
            throw format_error("confusion csv: malformed count row");
        for (std::size_t j = 0; j < names.size(); ++j) {
            try {
                cm.at(i, j) = std::stoull(cells[j + 1]);
            } catch (const std::exception&) {
                throw format_error("confusion csv: non-integer count");
            }
        }
    }
    return cm;
}

inline ConfusionMatrix load_confusion_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open: " + path);
    return parse_confusion_csv(is);
}

}  // namespace prcnn
