#include "shrg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shrg/error.hpp"

namespace shrg::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

double gamma_series(double a, double x) {
    double sum = 1.0 / a, term = sum, ap = a;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_cf(double a, double x) {
    double b = x + 1 - a, c = 1 / kTiny, d = 1 / b, h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        double an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1) < kEps)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double beta_cf(double a, double b, double x) {
    double qab = a + b, qap = a + 1, qam = a - 1;
    double c = 1, d = 1 - qab * x / qap;
    if (std::fabs(d) < kTiny)
        d = kTiny;
    d = 1 / d;
    double h = d;
    for (int m = 1; m < kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1) < kEps)
            break;
    }
    return h;
}

double mean_of(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double var_of(const std::vector<double> &v, double mean) {
    double s = 0;
    for (double x : v)
        s += (x - mean) * (x - mean);
    return s / (v.size() - 1);
}

TestResult from_statistic(TestKind kind, double diff, double se, std::optional<double> df) {
    TestResult r{kind, 0, df, 1};
    if (se == 0) {
        // zero spread: exact tie is no evidence, any difference is total
        if (diff == 0)
            return r;
        r.statistic = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.p_value = 0;
        return r;
    }
    r.statistic = diff / se;
    r.p_value = kind == TestKind::kZ ? std::min(1.0, 2 * normal_sf(std::fabs(r.statistic)))
                                     : t_two_sided(r.statistic, *df);
    return r;
}

void need(const std::vector<double> &v, std::size_t n, const char *what) {
    if (v.size() < n)
        throw StatsError(std::string(what) + " needs at least " + std::to_string(n) + " observations");
    for (double x : v)
        if (!std::isfinite(x))
            throw StatsError(std::string(what) + ": non-finite observation");
}

} // namespace

double gamma_p(double a, double x) {
    if (!(a > 0) || x < 0)
        throw StatsError("incomplete gamma needs a > 0 and x >= 0");
    if (x == 0)
        return 0;
    return x < a + 1 ? gamma_series(a, x) : 1 - gamma_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0) || x < 0)
        throw StatsError("incomplete gamma needs a > 0 and x >= 0");
    if (x == 0)
        return 1;
    return x < a + 1 ? 1 - gamma_series(a, x) : gamma_cf(a, x);
}

double beta_inc(double a, double b, double x) {
    if (!(a > 0) || !(b > 0) || x < 0 || x > 1)
        throw StatsError("incomplete beta needs a, b > 0 and 0 <= x <= 1");
    if (x == 0 || x == 1)
        return x;
    double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1) / (a + b + 2))
        return front * beta_cf(a, b, x) / a;
    return 1 - front * beta_cf(b, a, 1 - x) / b;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0 && p < 1))
        throw StatsError("normal quantile needs 0 < p < 1");
    // Acklam's rational approximation, then one Halley step
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    double x;
    if (p < 0.02425) {
        double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - 0.02425) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        double q = std::sqrt(-2 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    for (int i = 0; i < 2; ++i) {
        double e = normal_cdf(x) - p;
        double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
        x -= u / (1 + x * u / 2);
    }
    return x;
}

double chi2_sf(double x, double df) {
    if (!(df > 0))
        throw StatsError("chi-square needs df > 0");
    if (x <= 0)
        return 1;
    return gamma_q(df / 2, x / 2);
}

double t_two_sided(double t, double df) {
    if (!(df > 0))
        throw StatsError("t distribution needs df > 0");
    if (std::isinf(t))
        return 0;
    return beta_inc(df / 2, 0.5, df / (df + t * t));
}

std::string to_string(TestKind k) {
    switch (k) {
    case TestKind::kChi2:
        return "chi2";
    case TestKind::kWelchT:
        return "welch_t";
    case TestKind::kStudentT:
        return "student_t";
    case TestKind::kPairedT:
        return "paired_t";
    case TestKind::kZ:
        return "z";
    }
    return "?";
}

void validate(const ContingencyTable &t) {
    if (t.counts.size() != t.rows.size() || t.rows.size() < 2)
        throw StatsError("contingency table needs at least 2 labelled rows");
    if (t.cols.size() < 2)
        throw StatsError("contingency table needs at least 2 columns");
    for (std::size_t i = 0; i < t.counts.size(); ++i) {
        if (t.counts[i].size() != t.cols.size())
            throw StatsError("contingency table is not rectangular");
        std::int64_t sum = 0;
        for (auto c : t.counts[i]) {
            if (c < 0)
                throw StatsError("negative count in contingency table");
            sum += c;
        }
        if (sum == 0)
            throw StatsError("row " + t.rows[i] + " has no observations");
    }
}

namespace {

struct Margins {
    std::vector<double> row, col;
    double total = 0;
};

Margins margins(const ContingencyTable &t) {
    Margins m;
    m.row.assign(t.rows.size(), 0);
    m.col.assign(t.cols.size(), 0);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < t.cols.size(); ++j) {
            m.row[i] += static_cast<double>(t.counts[i][j]);
            m.col[j] += static_cast<double>(t.counts[i][j]);
        }
    m.total = std::accumulate(m.row.begin(), m.row.end(), 0.0);
    return m;
}

} // namespace

ContingencyTable expected_frequency_filter(const ContingencyTable &t, double min_expected, FilterRule rule) {
    validate(t);
    auto m = margins(t);
    ContingencyTable out{t.rows, {}, std::vector<std::vector<std::int64_t>>(t.rows.size())};
    for (std::size_t j = 0; j < t.cols.size(); ++j) {
        bool keep = true;
        if (rule == FilterRule::kColumnTotal) {
            keep = m.col[j] > min_expected;
        } else {
            for (std::size_t i = 0; i < t.rows.size(); ++i)
                if (!(m.row[i] * m.col[j] / m.total > min_expected))
                    keep = false;
        }
        if (!keep)
            continue;
        out.cols.push_back(t.cols[j]);
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            out.counts[i].push_back(t.counts[i][j]);
    }
    if (out.cols.empty())
        throw StatsError("every column fell below the expected-frequency threshold");
    return out;
}

TestResult chi_square_independence(const ContingencyTable &t) {
    validate(t);
    auto m = margins(t);
    double x2 = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < t.cols.size(); ++j) {
            double e = m.row[i] * m.col[j] / m.total;
            if (e <= 0)
                throw StatsError("zero expected count in column " + t.cols[j]);
            double d = static_cast<double>(t.counts[i][j]) - e;
            x2 += d * d / e;
        }
    double df = static_cast<double>((t.rows.size() - 1) * (t.cols.size() - 1));
    return TestResult{TestKind::kChi2, x2, df, chi2_sf(x2, df)};
}

TestResult t_test(const std::vector<double> &a, const std::vector<double> &b, TVariant variant) {
    need(a, 2, "t-test sample a");
    need(b, 2, "t-test sample b");
    double na = a.size(), nb = b.size();
    if (variant == TVariant::kPaired) {
        if (a.size() != b.size())
            throw StatsError("paired t-test needs samples of equal length");
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            d[i] = a[i] - b[i];
        double md = mean_of(d), vd = var_of(d, md);
        return from_statistic(TestKind::kPairedT, md, std::sqrt(vd / na), na - 1);
    }
    double ma = mean_of(a), mb = mean_of(b);
    double va = var_of(a, ma), vb = var_of(b, mb);
    if (variant == TVariant::kStudent) {
        double pooled = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2);
        return from_statistic(TestKind::kStudentT, ma - mb, std::sqrt(pooled * (1 / na + 1 / nb)), na + nb - 2);
    }
    double qa = va / na, qb = vb / nb;
    double se = std::sqrt(qa + qb);
    double df = se > 0 ? (qa + qb) * (qa + qb) / (qa * qa / (na - 1) + qb * qb / (nb - 1)) : na + nb - 2;
    return from_statistic(TestKind::kWelchT, ma - mb, se, df);
}

TestResult z_test(const std::vector<double> &a, const std::vector<double> &b) {
    need(a, 2, "z-test sample a");
    need(b, 2, "z-test sample b");
    double ma = mean_of(a), mb = mean_of(b);
    double se = std::sqrt(var_of(a, ma) / a.size() + var_of(b, mb) / b.size());
    return from_statistic(TestKind::kZ, ma - mb, se, std::nullopt);
}

Describe describe(const std::vector<double> &sample) {
    if (sample.empty())
        throw StatsError("describe needs a non-empty sample");
    need(sample, 1, "describe");
    Describe d;
    d.n = sample.size();
    auto s = sample;
    std::sort(s.begin(), s.end());
    d.min = s.front();
    d.max = s.back();
    d.median = s.size() % 2 ? s[s.size() / 2] : (s[s.size() / 2 - 1] + s[s.size() / 2]) / 2;
    d.mean = mean_of(s);
    if (s.size() == 1) {
        d.sd = 0;
        d.sd_defined = false;
    } else {
        d.sd = std::sqrt(var_of(s, d.mean));
    }
    return d;
}

double percent_agreement(const std::vector<std::vector<std::string>> &labelings) {
    if (labelings.empty())
        throw StatsError("agreement over an empty item set");
    std::size_t agree = 0;
    for (const auto &item : labelings) {
        if (item.empty())
            throw StatsError("item without labels");
        if (std::all_of(item.begin(), item.end(), [&](const std::string &l) { return l == item.front(); }))
            ++agree;
    }
    return 100.0 * static_cast<double>(agree) / static_cast<double>(labelings.size());
}

RatioCi ratio_ci(double a, double b, double alpha) {
    if (!(a > 0) || !(b > 0))
        throw StatsError("ratio interval needs positive counts");
    if (!(alpha > 0 && alpha < 1))
        throw StatsError("alpha must lie in (0, 1)");
    double z = normal_quantile(1 - alpha / 2);
    double r = a / b, half = z * std::sqrt(1 / a + 1 / b);
    return RatioCi{r, std::exp(std::log(r) - half), std::exp(std::log(r) + half)};
}

} // namespace shrg::stats
