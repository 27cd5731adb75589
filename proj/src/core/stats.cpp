#include "camo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "camo/errors.hpp"
#include "camo/random.hpp"

namespace camo {

Interval proportion_ci(double p, int n) {
    if (n <= 0) return {p, p};
    const double h = 1.96 * std::sqrt(p * (1.0 - p) / n);
    return {p - h, p + h};
}

double mean(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double median(std::vector<double> x) {
    if (x.empty()) return 0.0;
    std::sort(x.begin(), x.end());
    const size_t n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

Interval mean_ci(const std::vector<double>& x) {
    const double m = mean(x);
    if (x.size() < 2) return {m, m};
    const double h = 1.96 * sample_sd(x) / std::sqrt(static_cast<double>(x.size()));
    return {m - h, m + h};
}

Interval bootstrap_median_ci(const std::vector<double>& x, int resamples, uint64_t seed) {
    if (x.empty()) return {0.0, 0.0};
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    Rng rng(seed);
    std::vector<double> medians(resamples);
    std::vector<double> draw(sorted.size());
    for (int r = 0; r < resamples; ++r) {
        for (auto& d : draw) d = sorted[uniform_index(rng, sorted.size())];
        medians[r] = median(draw);
    }
    std::sort(medians.begin(), medians.end());
    const auto pick = [&](double q) {
        const double pos = q * (resamples - 1);
        const auto lo = static_cast<size_t>(std::floor(pos));
        const size_t hi = std::min(lo + 1, medians.size() - 1);
        return medians[lo] + (pos - lo) * (medians[hi] - medians[lo]);
    };
    return {pick(0.025), pick(0.975)};
}

TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw DomainError("t-test needs at least two values per sample");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = std::pow(sample_sd(a), 2) / na, vb = std::pow(sample_sd(b), 2) / nb;
    const double diff = mean(a) - mean(b);
    TestResult r;
    if (va + vb == 0.0) {
        r.statistic = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
        r.p_value = diff == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.statistic = diff / std::sqrt(va + vb);
    r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    const boost::math::students_t dist(r.df);
    r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic))));
    return r;
}

TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw DomainError("Mann-Whitney U needs two nonempty samples");
    const size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
    std::vector<std::pair<double, int>> all;
    all.reserve(n);
    for (double v : a) all.emplace_back(v, 0);
    for (double v : b) all.emplace_back(v, 1);
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    double rank_sum_a = 0.0, tie_term = 0.0;
    for (size_t i = 0; i < n;) {
        size_t j = i;
        while (j < n && all[j].first == all[i].first) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (size_t k = i; k < j; ++k)
            if (all[k].second == 0) rank_sum_a += avg_rank;
        i = j;
    }
    const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2), dn = static_cast<double>(n);
    TestResult r;
    r.statistic = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
    const double mu = dn1 * dn2 / 2.0;
    const double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (var <= 0.0) {
        r.p_value = 1.0;
        return r;
    }
    const double u = std::max(r.statistic, dn1 * dn2 - r.statistic);
    const double z = (u - mu - 0.5) / std::sqrt(var);
    const boost::math::normal_distribution<> nd;
    r.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(nd, z)), 0.0, 1.0);
    return r;
}

}  // namespace camo
