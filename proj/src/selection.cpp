#include "eyeaffect/selection.hpp"

#include "eyeaffect/common.hpp"
#include "eyeaffect/csv.hpp"
#include "eyeaffect/error.hpp"
#include "eyeaffect/eval.hpp"
#include "eyeaffect/log.hpp"
#include "eyeaffect/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <iterator>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace eyeaffect {

// ----------------------------------------------------------------- shifting

ShiftConfig ShiftConfig::defaults() {
    ShiftConfig c;
    for (std::int64_t k = 0; k <= 22; ++k) {
        c.frames.push_back(5 * k);
    }
    return c;
}

ShiftConfig ShiftConfig::from_seconds(const std::vector<double>& seconds) {
    ShiftConfig c;
    for (double s : seconds) {
        if (s < 0.0) {
            throw ArgumentError("ground-truth shifts must be non-negative");
        }
        c.frames.push_back(seconds_to_frames(s));
    }
    return c;
}

std::vector<double> ShiftConfig::seconds() const {
    std::vector<double> out;
    out.reserve(frames.size());
    for (auto f : frames) {
        out.push_back(frames_to_seconds(f));
    }
    return out;
}

std::vector<double> shift_labels(std::span<const double> values, std::int64_t shift_frames) {
    if (shift_frames < 0) {
        throw ArgumentError("shift must be non-negative");
    }
    if (static_cast<std::size_t>(shift_frames) >= values.size()) {
        throw ArgumentError("shift of " + std::to_string(shift_frames) + " frames is not shorter than the " +
                            std::to_string(values.size()) + "-frame trace");
    }
    return {values.begin() + shift_frames, values.end()};
}

AnnotationTrace shift_labels(const AnnotationTrace& trace, double shift_seconds) {
    AnnotationTrace out;
    out.dimension = trace.dimension;
    out.annotator_id = trace.annotator_id;
    out.values = shift_labels(trace.values, seconds_to_frames(shift_seconds));
    return out;
}

// ------------------------------------------------------------------------ MI

int quantile_bins(std::span<const double> values, int bins, std::vector<int>& out) {
    if (bins < 1) {
        throw ArgumentError("bin count must be positive");
    }
    const std::size_t n = values.size();
    out.assign(n, 0);
    if (n == 0) {
        return 0;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::size_t distinct = 1;
    for (std::size_t k = 1; k < n && distinct <= 2; ++k) {
        if (values[order[k]] != values[order[k - 1]]) {
            ++distinct;
        }
    }
    if (distinct <= 2) {
        int bin = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k > 0 && values[order[k]] != values[order[k - 1]]) {
                ++bin;
            }
            out[order[k]] = bin;
        }
        return bin + 1;
    }

    int last = 0;
    for (std::size_t k = 0; k < n; ++k) {
        int bin = static_cast<int>((k * static_cast<std::size_t>(bins)) / n);
        if (k > 0 && values[order[k]] == values[order[k - 1]]) {
            bin = out[order[k - 1]];
        }
        out[order[k]] = bin;
        last = std::max(last, bin);
    }
    return last + 1;
}

namespace {

MiResult mi_from_bins(const std::vector<int>& bx, int nbx, const std::vector<int>& by, int nby) {
    if (nbx <= 1 || nby <= 1) {
        return {0.0, true};
    }
    const std::size_t n = bx.size();
    std::vector<double> joint(static_cast<std::size_t>(nbx) * static_cast<std::size_t>(nby), 0.0);
    std::vector<double> cx(static_cast<std::size_t>(nbx), 0.0);
    std::vector<double> cy(static_cast<std::size_t>(nby), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        joint[static_cast<std::size_t>(bx[i]) * static_cast<std::size_t>(nby) + static_cast<std::size_t>(by[i])] += 1.0;
        cx[static_cast<std::size_t>(bx[i])] += 1.0;
        cy[static_cast<std::size_t>(by[i])] += 1.0;
    }
    const double dn = static_cast<double>(n);
    double mi = 0.0;
    for (int a = 0; a < nbx; ++a) {
        for (int b = 0; b < nby; ++b) {
            const double c = joint[static_cast<std::size_t>(a) * static_cast<std::size_t>(nby) + static_cast<std::size_t>(b)];
            if (c > 0.0) {
                mi += c / dn * std::log(c * dn / (cx[static_cast<std::size_t>(a)] * cy[static_cast<std::size_t>(b)]));
            }
        }
    }
    return {std::max(0.0, mi), false};
}

}  // namespace

MiResult mutual_information(std::span<const double> x, std::span<const double> y, int bins) {
    if (x.size() != y.size()) {
        throw ArgumentError("mutual_information: length mismatch (" + std::to_string(x.size()) + " vs " +
                            std::to_string(y.size()) + ")");
    }
    std::vector<int> bx;
    std::vector<int> by;
    const int nbx = quantile_bins(x, bins, bx);
    const int nby = quantile_bins(y, bins, by);
    return mi_from_bins(bx, nbx, by, nby);
}

std::vector<double> mi_scores(const RowMatrix& features, std::span<const double> labels, int bins) {
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw ArgumentError("mi_scores: " + std::to_string(features.rows()) + " feature rows vs " +
                            std::to_string(labels.size()) + " labels");
    }
    std::vector<int> by;
    const int nby = quantile_bins(labels, bins, by);
    std::vector<double> scores(static_cast<std::size_t>(features.cols()), 0.0);
    std::vector<double> column(labels.size());
    std::vector<int> bx;
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
        for (Eigen::Index r = 0; r < features.rows(); ++r) {
            column[static_cast<std::size_t>(r)] = features(r, c);
        }
        const int nbx = quantile_bins(column, bins, bx);
        scores[static_cast<std::size_t>(c)] = mi_from_bins(bx, nbx, by, nby).nats;
    }
    return scores;
}

FilterResult mi_filter(std::vector<double> scores, double threshold) {
    FilterResult r;
    r.retained.resize(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        r.retained[i] = scores[i] >= threshold;
        r.n_retained += r.retained[i];
    }
    r.mi_scores = std::move(scores);
    if (r.n_retained == 0 && !r.mi_scores.empty()) {
        warn("MI threshold " + csv::format_double(threshold) + " removes every feature");
    }
    return r;
}

FilterResult mi_filter(const FeatureMatrix& matrix, std::span<const double> labels, double threshold, int bins) {
    return mi_filter(mi_scores(matrix.rows, labels, bins), threshold);
}

// ------------------------------------------------------------------ alignment

AlignedSubject align(const SubjectData& s, std::int64_t shift_frames) {
    if (shift_frames < 0) {
        throw ArgumentError("shift must be non-negative");
    }
    const auto target_len = static_cast<std::int64_t>(s.target.size());
    const std::int64_t available = target_len - s.features.frame_offset - shift_frames;
    const std::int64_t rows = std::min<std::int64_t>(available, static_cast<std::int64_t>(s.features.frames()));
    if (rows <= 0) {
        throw DataError("subject " + s.id + ": no frames left after a shift of " + std::to_string(shift_frames) +
                        " frames");
    }
    AlignedSubject a;
    a.features = s.features.rows.topRows(rows);
    a.target.resize(rows);
    for (std::int64_t r = 0; r < rows; ++r) {
        a.target(r) = s.target[static_cast<std::size_t>(s.features.frame_offset + r + shift_frames)];
    }
    return a;
}

// ------------------------------------------------------------------ protocols

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::before: return "before";
        case Protocol::during: return "during";
        case Protocol::after: return "after";
        case Protocol::none: return "none";
    }
    return "?";
}

Protocol parse_protocol(const std::string& name) {
    if (name == "before") return Protocol::before;
    if (name == "during") return Protocol::during;
    if (name == "after") return Protocol::after;
    if (name == "none") return Protocol::none;
    throw ArgumentError("unknown protocol '" + name + "' (expected before|during|after|none)");
}

namespace {

RowMatrix masked(const RowMatrix& m, const std::vector<bool>& mask) {
    std::vector<Eigen::Index> cols;
    for (std::size_t c = 0; c < mask.size(); ++c) {
        if (mask[c]) {
            cols.push_back(static_cast<Eigen::Index>(c));
        }
    }
    RowMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
    }
    return out;
}

std::string cell_key(const std::vector<bool>& mask, std::int64_t shift) {
    std::string key = std::to_string(shift) + ":";
    key.reserve(key.size() + mask.size());
    for (bool b : mask) {
        key.push_back(b ? '1' : '0');
    }
    return key;
}

}  // namespace

CellOutcome evaluate_cell(const std::vector<SubjectData>& train, const std::vector<SubjectData>& validation,
                          const std::vector<bool>& mask, std::int64_t shift_frames, const ModelConfig& config) {
    if (train.empty() || validation.empty()) {
        throw ArgumentError("a sweep cell needs training and validation subjects");
    }
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
        throw DataError("no features retained");
    }
    const FeatureCatalog catalog = train.front().features.catalog.subset(mask);

    std::vector<Eigen::MatrixXd> train_x;
    std::vector<Eigen::VectorXd> train_y;
    for (const auto& s : train) {
        AlignedSubject a = align(s, shift_frames);
        train_x.emplace_back(masked(a.features, mask));
        train_y.push_back(std::move(a.target));
    }
    const Standardizer xs = Standardizer::fit(train_x);
    const Standardizer ys = Standardizer::fit_series(train_y);

    std::vector<Sequence> train_seq;
    for (std::size_t i = 0; i < train_x.size(); ++i) {
        train_seq.push_back({xs.apply(train_x[i]).transpose(), ys.apply_series(train_y[i])});
    }
    std::vector<Sequence> val_seq;
    std::vector<Eigen::MatrixXd> val_x;
    std::vector<Eigen::VectorXd> val_y;
    for (const auto& s : validation) {
        AlignedSubject a = align(s, shift_frames);
        val_x.emplace_back(masked(a.features, mask));
        val_seq.push_back({xs.apply(val_x.back()).transpose(), ys.apply_series(a.target)});
        val_y.push_back(std::move(a.target));
    }

    CellOutcome out;
    const auto started = std::chrono::steady_clock::now();
    out.model = train_blstm(train_seq, val_seq, config);
    out.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.model.input_standardizer = xs;
    out.model.target_standardizer = ys;
    out.model.input_names = catalog.names();
    out.model.catalog_hash = catalog.hash();
    out.n_features = catalog.size();

    std::vector<double> pred;
    std::vector<double> truth;
    double sq = 0.0;
    std::size_t frames = 0;
    for (std::size_t i = 0; i < val_seq.size(); ++i) {
        const Eigen::VectorXd z = out.model.network.forward(val_seq[i].inputs);
        sq += (z - val_seq[i].targets).squaredNorm();
        frames += static_cast<std::size_t>(z.size());
        const Eigen::VectorXd raw = ys.invert_series(z);
        pred.insert(pred.end(), raw.data(), raw.data() + raw.size());
        truth.insert(truth.end(), val_y[i].data(), val_y[i].data() + val_y[i].size());
    }
    out.val_ccc = ccc(pred, truth);
    out.val_sse = sq / static_cast<double>(frames);
    return out;
}

int best_report(const std::vector<SelectionReport>& reports) {
    int best = -1;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        if (r.failed) {
            continue;
        }
        if (best < 0) {
            best = static_cast<int>(i);
            continue;
        }
        const auto& b = reports[static_cast<std::size_t>(best)];
        const bool better = r.val_ccc > b.val_ccc ||
                            (r.val_ccc == b.val_ccc && (r.n_features < b.n_features ||
                                                        (r.n_features == b.n_features && r.shift_frames < b.shift_frames)));
        if (better) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

SelectionSweep::SelectionSweep(std::vector<SubjectData> train, std::vector<SubjectData> validation,
                               SweepOptions options)
    : train_(std::move(train)), validation_(std::move(validation)), options_(std::move(options)) {
    if (train_.empty() || validation_.empty()) {
        throw ArgumentError("selection sweep needs training and validation subjects");
    }
    options_.model.validate();
    const auto width = train_.front().features.width();
    for (const auto* set : {&train_, &validation_}) {
        for (const auto& s : *set) {
            if (s.features.width() != width || s.features.catalog.hash() != train_.front().features.catalog.hash()) {
                throw DataError("subject " + s.id + " has a different feature catalog");
            }
        }
    }
    for (double t : options_.thresholds) {
        if (!(t >= 0.0)) {
            throw ArgumentError("MI thresholds must be non-negative");
        }
    }
    if (options_.shifts.frames.empty()) {
        throw ArgumentError("selection sweep needs at least one shift");
    }
}

const std::vector<double>& SelectionSweep::scores_for(std::int64_t shift_frames) {
    for (const auto& [shift, scores] : score_cache_) {
        if (shift == shift_frames) {
            return scores;
        }
    }
    std::vector<Eigen::Index> row_counts;
    Eigen::Index total = 0;
    std::vector<AlignedSubject> aligned;
    for (const auto& s : train_) {
        aligned.push_back(align(s, shift_frames));
        total += aligned.back().features.rows();
    }
    RowMatrix pooled(total, aligned.front().features.cols());
    std::vector<double> labels;
    labels.reserve(static_cast<std::size_t>(total));
    Eigen::Index row = 0;
    for (const auto& a : aligned) {
        pooled.middleRows(row, a.features.rows()) = a.features;
        row += a.features.rows();
        labels.insert(labels.end(), a.target.data(), a.target.data() + a.target.size());
    }
    score_cache_.emplace_back(shift_frames, mi_scores(pooled, labels, options_.bins));
    return score_cache_.back().second;
}

std::vector<SelectionReport> SelectionSweep::evaluate_rows(
    Protocol protocol, const std::vector<std::pair<std::optional<double>, std::int64_t>>& cells) {
    std::vector<SelectionReport> reports;
    reports.reserve(cells.size());
    for (const auto& [threshold, shift] : cells) {
        SelectionReport r;
        r.protocol = protocol;
        r.threshold = threshold;
        r.shift_frames = shift;
        r.mi_scores = scores_for(shift);
        r.retained.assign(r.mi_scores.size(), true);
        if (threshold) {
            r.retained = mi_filter(r.mi_scores, *threshold).retained;
        }
        r.n_features = static_cast<std::size_t>(std::count(r.retained.begin(), r.retained.end(), true));
        reports.push_back(std::move(r));
    }

    // Train each distinct uncached (mask, shift) cell once.
    std::vector<std::string> keys;
    std::vector<std::size_t> todo;
    std::set<std::string> pending;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const std::string key = cell_key(reports[i].retained, reports[i].shift_frames);
        keys.push_back(key);
        const bool cached = std::any_of(cell_cache_.begin(), cell_cache_.end(),
                                        [&](const auto& entry) { return entry.first == key; });
        if (!cached && reports[i].n_features > 0 && pending.insert(key).second) {
            todo.push_back(i);
        }
    }
    std::vector<std::optional<CellOutcome>> outcomes(todo.size());
    std::vector<std::string> errors(todo.size());
    parallel_for(todo.size(), options_.threads, [&](std::size_t k) {
        const auto& r = reports[todo[k]];
        try {
            outcomes[k] = evaluate_cell(train_, validation_, r.retained, r.shift_frames, options_.model);
        } catch (const NumericError& e) {
            errors[k] = e.what();
        }
    });
    std::map<std::string, std::string> failures;
    for (std::size_t k = 0; k < todo.size(); ++k) {
        reports[todo[k]].train_seconds = outcomes[k] ? outcomes[k]->train_seconds : 0.0;
        if (outcomes[k]) {
            cell_cache_.emplace_back(keys[todo[k]], std::move(*outcomes[k]));
        } else {
            failures[keys[todo[k]]] = errors[k];
        }
    }

    for (std::size_t i = 0; i < reports.size(); ++i) {
        auto& r = reports[i];
        if (r.n_features == 0) {
            r.failed = true;
            r.failure = "no features retained";
            r.val_ccc = std::nan("");
            r.val_sse = std::nan("");
            continue;
        }
        if (auto f = failures.find(keys[i]); f != failures.end()) {
            r.failed = true;
            r.failure = f->second;
            r.val_ccc = std::nan("");
            r.val_sse = std::nan("");
            continue;
        }
        for (const auto& [key, outcome] : cell_cache_) {
            if (key == keys[i]) {
                r.val_ccc = outcome.val_ccc;
                r.val_sse = outcome.val_sse;
                break;
            }
        }
    }
    return reports;
}

std::vector<SelectionReport> SelectionSweep::run_during(const std::vector<std::optional<double>>& thresholds) {
    std::vector<std::pair<std::optional<double>, std::int64_t>> cells;
    for (const auto& t : thresholds) {
        for (auto s : options_.shifts.frames) {
            cells.emplace_back(t, s);
        }
    }
    return evaluate_rows(Protocol::during, cells);
}

std::vector<SelectionReport> SelectionSweep::run(Protocol protocol) {
    std::vector<std::pair<std::optional<double>, std::int64_t>> cells;
    switch (protocol) {
        case Protocol::before:
            cells.emplace_back(std::nullopt, 0);
            for (double t : options_.thresholds) {
                cells.emplace_back(t, 0);
            }
            return evaluate_rows(protocol, cells);
        case Protocol::during: {
            std::vector<std::optional<double>> ts(options_.thresholds.begin(), options_.thresholds.end());
            return run_during(ts);
        }
        case Protocol::none:
            for (auto s : options_.shifts.frames) {
                cells.emplace_back(std::nullopt, s);
            }
            return evaluate_rows(protocol, cells);
        case Protocol::after: {
            const auto unfiltered = run(Protocol::none);
            const int best = best_report(unfiltered);
            if (best < 0) {
                throw NumericError("every unfiltered shift cell failed; cannot fix a shift for the after protocol");
            }
            const auto shift = unfiltered[static_cast<std::size_t>(best)].shift_frames;
            cells.emplace_back(std::nullopt, shift);
            for (double t : options_.thresholds) {
                cells.emplace_back(t, shift);
            }
            return evaluate_rows(protocol, cells);
        }
    }
    return {};
}

std::vector<SelectionReport> SelectionSweep::run_full() {
    std::vector<SelectionReport> all = run(Protocol::before);
    std::vector<SelectionReport> filtered;
    std::copy_if(all.begin(), all.end(), std::back_inserter(filtered),
                 [](const SelectionReport& r) { return r.threshold.has_value(); });
    const int best = best_report(filtered);
    if (best < 0) {
        throw NumericError("every filtered before-shift cell failed");
    }
    const auto during = run_during({filtered[static_cast<std::size_t>(best)].threshold});
    all.insert(all.end(), during.begin(), during.end());
    const auto none = run(Protocol::none);
    all.insert(all.end(), none.begin(), none.end());
    const auto after = run(Protocol::after);
    all.insert(all.end(), after.begin(), after.end());
    return all;
}

TrainedModel SelectionSweep::train_report_model(const SelectionReport& report) {
    const std::string key = cell_key(report.retained, report.shift_frames);
    for (const auto& [k, outcome] : cell_cache_) {
        if (k == key) {
            return outcome.model;
        }
    }
    return evaluate_cell(train_, validation_, report.retained, report.shift_frames, options_.model).model;
}

// ---------------------------------------------------------------------- output

void write_sweep_csv(std::ostream& out, const std::vector<SelectionReport>& reports) {
    out << "protocol,threshold,shift_s,n_features,val_sse,val_ccc\n";
    char shift[32];
    for (const auto& r : reports) {
        std::snprintf(shift, sizeof(shift), "%.2f", r.shift_seconds());
        out << to_string(r.protocol) << ',' << (r.threshold ? csv::format_double(*r.threshold) : "none") << ','
            << shift << ',' << r.n_features << ',' << (r.failed ? "nan" : csv::format_double(r.val_sse)) << ','
            << (r.failed ? "nan" : csv::format_double(r.val_ccc)) << '\n';
    }
}

std::vector<SelectionReport> read_sweep_csv(std::istream& in) {
    const csv::Table t = csv::read(in, ',');
    const std::vector<std::string> expected = {"protocol", "threshold", "shift_s", "n_features", "val_sse", "val_ccc"};
    if (t.header != expected) {
        throw DataError("sweep csv header must be protocol,threshold,shift_s,n_features,val_sse,val_ccc");
    }
    std::vector<SelectionReport> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        SelectionReport r;
        r.protocol = parse_protocol(row[0]);
        if (row[1] != "none") {
            r.threshold = csv::parse_double(row[1], i + 1, "threshold");
        }
        r.shift_frames = seconds_to_frames(csv::parse_double(row[2], i + 1, "shift_s"));
        r.n_features = static_cast<std::size_t>(csv::parse_double(row[3], i + 1, "n_features"));
        if (row[4] == "nan" || row[5] == "nan") {
            r.failed = true;
            r.val_sse = std::nan("");
            r.val_ccc = std::nan("");
        } else {
            r.val_sse = csv::parse_double(row[4], i + 1, "val_sse");
            r.val_ccc = csv::parse_double(row[5], i + 1, "val_ccc");
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_sweep_svg(std::ostream& out, const std::vector<SelectionReport>& reports) {
    struct Series {
        std::string label;
        std::vector<std::pair<double, double>> points;
    };
    std::vector<Series> series;
    for (const auto& r : reports) {
        if (r.failed) {
            continue;
        }
        const std::string label =
            to_string(r.protocol) + " (" + (r.threshold ? "MI >= " + csv::format_double(*r.threshold) : "no filter") + ")";
        auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.label == label; });
        if (it == series.end()) {
            series.push_back({label, {}});
            it = series.end() - 1;
        }
        it->points.emplace_back(r.shift_seconds(), r.val_ccc);
    }
    std::erase_if(series, [](const Series& s) { return s.points.size() < 2; });

    constexpr double kW = 640.0;
    constexpr double kH = 400.0;
    constexpr double kLeft = 60.0;
    constexpr double kRight = 180.0;
    constexpr double kTop = 20.0;
    constexpr double kBottom = 50.0;
    double x_max = 0.2;
    double y_min = 0.0;
    double y_max = 0.1;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    const auto px = [&](double x) { return kLeft + x / x_max * (kW - kLeft - kRight); };
    const auto py = [&](double y) { return kH - kBottom - (y - y_min) / (y_max - y_min) * (kH - kTop - kBottom); };
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    char buf[160];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf), "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", kLeft,
                  kH - kBottom, kW - kRight, kH - kBottom);
    out << buf;
    std::snprintf(buf, sizeof(buf), "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", kLeft,
                  kTop, kLeft, kH - kBottom);
    out << buf;
    for (int k = 0; k <= 4; ++k) {
        const double y = y_min + (y_max - y_min) * k / 4.0;
        std::snprintf(buf, sizeof(buf), "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">%.2f</text>\n",
                      kLeft - 6.0, py(y) + 4.0, y);
        out << buf;
        const double x = x_max * k / 4.0;
        std::snprintf(buf, sizeof(buf), "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">%.1f</text>\n",
                      px(x), kH - kBottom + 16.0, x);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">shift (s)</text>\n",
                  (kLeft + kW - kRight) / 2.0, kH - 12.0);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"14\" y=\"%.1f\" font-size=\"12\" transform=\"rotate(-90 14 %.1f)\" "
                  "text-anchor=\"middle\">validation CCC</text>\n",
                  (kTop + kH - kBottom) / 2.0, (kTop + kH - kBottom) / 2.0);
    out << buf;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[i].points) {
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px(x), py(y));
            out << buf;
        }
        out << "\"/>\n";
        std::snprintf(buf, sizeof(buf), "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"%s\">", kW - kRight + 10.0,
                      kTop + 14.0 * static_cast<double>(i + 1), color);
        out << buf << series[i].label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace eyeaffect
