#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace shrg::stats {

// --- special functions ------------------------------------------------------

double gamma_p(double a, double x); // regularized lower incomplete gamma
double gamma_q(double a, double x); // upper, 1 - P
double beta_inc(double a, double b, double x); // regularized I_x(a, b)

double normal_cdf(double x);
double normal_sf(double x);
double normal_quantile(double p);

double chi2_sf(double x, double df);
// P(|T| >= |t|) for Student's t with df degrees of freedom.
double t_two_sided(double t, double df);

// --- tests ------------------------------------------------------------------

enum class TestKind { kChi2, kWelchT, kStudentT, kPairedT, kZ };
std::string to_string(TestKind k);

struct TestResult {
    TestKind kind;
    double statistic = 0;
    std::optional<double> df;
    double p_value = 1;
};

struct ContingencyTable {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    std::vector<std::vector<std::int64_t>> counts; // rows x cols
};

void validate(const ContingencyTable &t);

enum class FilterRule {
    kPerCell,     // every cell's expected count must exceed the threshold
    kColumnTotal, // the column total must exceed it
};

ContingencyTable expected_frequency_filter(const ContingencyTable &t, double min_expected = 4,
                                           FilterRule rule = FilterRule::kPerCell);

TestResult chi_square_independence(const ContingencyTable &t);

enum class TVariant { kWelch, kStudent, kPaired };
TestResult t_test(const std::vector<double> &a, const std::vector<double> &b, TVariant variant);
TestResult z_test(const std::vector<double> &a, const std::vector<double> &b);

struct Describe {
    std::size_t n = 0;
    double mean = 0, median = 0, sd = 0, max = 0, min = 0;
    bool sd_defined = true; // false for a single observation (sd reported as 0)
};

Describe describe(const std::vector<double> &sample);

// labelings[item][annotator]; 100 * share of items where every label agrees.
double percent_agreement(const std::vector<std::vector<std::string>> &labelings);

struct RatioCi {
    double ratio, lo, hi;
};

// Log-normal (Katz) interval for a / b.
RatioCi ratio_ci(double a, double b, double alpha = 0.05);

} // namespace shrg::stats
