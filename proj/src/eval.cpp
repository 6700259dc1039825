#include "eyeaffect/eval.hpp"

#include "eyeaffect/csv.hpp"
#include "eyeaffect/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

namespace eyeaffect {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, const char* what) {
    if (x.size() != y.size()) {
        throw ArgumentError(std::string(what) + ": length mismatch (" + std::to_string(x.size()) + " vs " +
                            std::to_string(y.size()) + ")");
    }
}

struct Moments {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double var_x = 0.0;
    double var_y = 0.0;
    double cov = 0.0;
};

Moments moments(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    Moments m;
    for (std::size_t i = 0; i < x.size(); ++i) {
        m.mean_x += x[i];
        m.mean_y += y[i];
    }
    m.mean_x /= n;
    m.mean_y /= n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - m.mean_x;
        const double dy = y[i] - m.mean_y;
        m.var_x += dx * dx;
        m.var_y += dy * dy;
        m.cov += dx * dy;
    }
    m.var_x /= n;
    m.var_y /= n;
    m.cov /= n;
    return m;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Counts of each U value under H0 for sample sizes (m, n): number of
// m-subsets of {1..m+n} whose rank sum minus m(m+1)/2 equals u.
std::vector<double> mann_whitney_counts(std::size_t m, std::size_t n) {
    // f[i][j][u] built row by row over i = size of first sample.
    std::vector<std::vector<std::vector<double>>> f(
        m + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(m * n + 1, 0.0)));
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            if (i == 0 || j == 0) {
                f[i][j][0] = 1.0;
                continue;
            }
            for (std::size_t u = 0; u <= i * j; ++u) {
                // Largest observation belongs to the first sample (adds j to U) or to the second.
                double c = f[i][j - 1][u];
                if (u >= j) {
                    c += f[i - 1][j][u - j];
                }
                f[i][j][u] = c;
            }
        }
    }
    return f[m][n];
}

}  // namespace

CccResult ccc_checked(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y, "ccc");
    if (x.size() < 2) {
        throw ArgumentError("ccc needs at least 2 samples");
    }
    const Moments m = moments(x, y);
    const double diff = m.mean_x - m.mean_y;
    const double denom = m.var_x + m.var_y + diff * diff;
    if (denom == 0.0) {
        return {0.0, true};
    }
    return {2.0 * m.cov / denom, false};
}

double ccc(std::span<const double> x, std::span<const double> y) {
    return ccc_checked(x, y).value;
}

double pcc(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y, "pcc");
    if (x.size() < 2) {
        throw ArgumentError("pcc needs at least 2 samples");
    }
    const Moments m = moments(x, y);
    if (m.var_x == 0.0 || m.var_y == 0.0) {
        throw NumericError("pcc is undefined for a constant input");
    }
    return m.cov / std::sqrt(m.var_x * m.var_y);
}

double sse(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y, "sse");
    if (x.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s / static_cast<double>(x.size());
}

double human_baseline(const std::vector<AnnotationTrace>& traces) {
    if (traces.size() < 2) {
        throw ArgumentError("group-of-humans baseline needs at least two annotators");
    }
    std::size_t n = traces.front().values.size();
    for (const auto& t : traces) {
        n = std::min(n, t.values.size());
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        for (std::size_t j = i + 1; j < traces.size(); ++j) {
            sum += ccc(std::span(traces[i].values).first(n), std::span(traces[j].values).first(n));
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw ArgumentError("wilcoxon_rank_sum needs two non-empty samples");
    }
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const std::size_t n = na + nb;

    std::vector<std::pair<double, bool>> pooled;
    pooled.reserve(n);
    for (double v : a) {
        pooled.emplace_back(v, true);
    }
    for (double v : b) {
        pooled.emplace_back(v, false);
    }
    std::sort(pooled.begin(), pooled.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    bool ties = false;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[j + 1].first == pooled[i].first) {
            ++j;
        }
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) {
            ties = true;
            tie_term += t * t * t - t;
        }
        for (std::size_t k = i; k <= j; ++k) {
            if (pooled[k].second) {
                rank_sum_a += midrank;
            }
        }
        i = j + 1;
    }

    RankSumResult out;
    out.w = rank_sum_a - static_cast<double>(na * (na + 1)) / 2.0;
    const double dna = static_cast<double>(na);
    const double dnb = static_cast<double>(nb);

    if (n <= 12 && !ties) {
        const std::vector<double> counts = mann_whitney_counts(na, nb);
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        const auto w = static_cast<std::size_t>(std::llround(out.w));
        double lower = 0.0;
        double upper = 0.0;
        for (std::size_t u = 0; u < counts.size(); ++u) {
            if (u <= w) {
                lower += counts[u];
            }
            if (u >= w) {
                upper += counts[u];
            }
        }
        out.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / total);
        out.exact = true;
        return out;
    }

    const double dn = static_cast<double>(n);
    const double z0 = out.w - dna * dnb / 2.0;
    const double sigma = std::sqrt(dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0))));
    if (sigma == 0.0) {
        out.p_value = 1.0;
        return out;
    }
    const double correction = z0 > 0.0 ? 0.5 : (z0 < 0.0 ? -0.5 : 0.0);
    const double z = (z0 - correction) / sigma;
    out.p_value = std::min(1.0, 2.0 * std::min(normal_cdf(z), 1.0 - normal_cdf(z)));
    return out;
}

EvalReport evaluate(const std::string& system, Dimension dimension, const std::string& split,
                    std::span<const double> predictions, std::span<const double> targets,
                    std::span<const double> standardized_predictions, std::span<const double> standardized_targets) {
    EvalReport r;
    r.system = system;
    r.dimension = dimension;
    r.split = split;
    r.n_frames = predictions.size();
    r.ccc = ccc(predictions, targets);
    try {
        r.pcc = pcc(predictions, targets);
    } catch (const NumericError&) {
        r.pcc = 0.0;
    }
    r.sse = standardized_predictions.empty() ? sse(predictions, targets)
                                             : sse(standardized_predictions, standardized_targets);
    return r;
}

void write_eval_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
    out << "system,dimension,split,sse,ccc,pcc\n";
    for (const auto& r : reports) {
        out << r.system << ',' << to_string(r.dimension) << ',' << r.split << ',' << csv::format_double(r.sse) << ','
            << csv::format_double(r.ccc) << ',' << csv::format_double(r.pcc) << '\n';
    }
}

std::vector<EvalReport> read_eval_csv(std::istream& in) {
    const csv::Table t = csv::read(in, ',');
    const int c_sys = t.column("system");
    const int c_dim = t.column("dimension");
    const int c_split = t.column("split");
    const int c_sse = t.column("sse");
    const int c_ccc = t.column("ccc");
    const int c_pcc = t.column("pcc");
    if (c_sys < 0 || c_dim < 0 || c_split < 0 || c_sse < 0 || c_ccc < 0 || c_pcc < 0) {
        throw DataError("eval csv must have columns system,dimension,split,sse,ccc,pcc");
    }
    std::vector<EvalReport> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        EvalReport e;
        e.system = row[c_sys];
        e.dimension = parse_dimension(row[c_dim]);
        e.split = row[c_split];
        e.sse = csv::parse_double(row[c_sse], r + 1, "sse");
        e.ccc = csv::parse_double(row[c_ccc], r + 1, "ccc");
        e.pcc = csv::parse_double(row[c_pcc], r + 1, "pcc");
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace eyeaffect
