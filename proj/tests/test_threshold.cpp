#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mcd/error.hpp"
#include "mcd/simulation.hpp"
#include "mcd/threshold.hpp"

using namespace mcd;

TEST_CASE("neighborhood variability") {
    SUBCASE("constant grid") {
        const auto v = neighborhood_variability(Field<double>(6, 7, 2.5));
        for (double x : v.values()) CHECK(x == 0.0);
    }
    SUBCASE("interior cross (4,0,0,0,0)") {
        Field<double> f(5, 5, 0.0);
        f(2, 2) = 4.0;
        const auto v = neighborhood_variability(f);
        CHECK(v(2, 2) == doctest::Approx(3.2));
        CHECK(v(1, 2) == doctest::Approx(3.2));
        CHECK(v(0, 0) == 0.0);
    }
    SUBCASE("corner pixel uses three values") {
        Field<double> f(4, 4, 9.0);
        f(0, 0) = 1.0;
        f(0, 1) = 2.0;
        f(1, 0) = 3.0;
        CHECK(neighborhood_variability(f)(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("random field against direct variance") {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> d(0.0, 2.0);
        Field<double> f(9, 8);
        for (auto& x : f.values()) x = d(rng);
        const auto v = neighborhood_variability(f);
        for (int r = 0; r < 9; ++r)
            for (int c = 0; c < 8; ++c) {
                std::vector<double> vals;
                for (auto [dr, dc] : {std::pair{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}})
                    if (f.contains(r + dr, c + dc)) vals.push_back(f(r + dr, c + dc));
                double m = 0.0;
                for (double x : vals) m += x;
                m /= static_cast<double>(vals.size());
                double ss = 0.0;
                for (double x : vals) ss += (x - m) * (x - m);
                CHECK(v(r, c) == doctest::Approx(ss / static_cast<double>(vals.size() - 1)).epsilon(1e-12));
            }
    }
    SUBCASE("binomial uses adjusted proportions") {
        Grid y(3, 3, 10.0);
        TrialsMap n(3, 3, 50);
        n(1, 1) = 100;
        y(1, 1) = 20.0;
        const auto v = neighborhood_variability(y, ModelSpec::binomial(n));
        // 11/52 vs 21/102: heterogeneous trials, nearly equal rates
        CHECK(v(1, 1) < 1e-4);
        CHECK(v(1, 1) > 0.0);
    }
    SUBCASE("too small") { CHECK_THROWS_AS(neighborhood_variability(Field<double>(1, 5)), InvalidInput); }
}

TEST_CASE("two-valued statistic: brute-force belt enumeration") {
    Field<double> t(10, 10, 0.0);
    for (int r = 3; r < 7; ++r)
        for (int c = 3; c < 7; ++c) t(r, c) = 10.0;
    const auto v = neighborhood_variability(t);
    const int k = 100;
    const auto scan = scan_thresholds(t, v, k);
    REQUIRE(scan.threshold_count() == k);
    int best = -1;
    double best_mean = 0.0;
    for (int b = 0; b < k - 1; ++b) {
        const double lo = 10.0 * b / (k - 1), hi = 10.0 * (b + 1) / (k - 1);
        double s = 0.0;
        int n = 0;
        for (std::size_t p = 0; p < t.size(); ++p)
            if (t[p] > lo && t[p] <= hi) {
                s += v[p];
                ++n;
            }
        CHECK(scan.belt_counts[b] == n);
        if (n > 0 && (best < 0 || s / n > best_mean)) {
            best = b;
            best_mean = s / n;
        }
    }
    CHECK(scan.chosen_belt == best);
    const auto result = select_and_detect(t, v, k);
    for (std::size_t p = 0; p < t.size(); ++p) CHECK(result.mask[p] == (t[p] == 10.0 ? 1 : 0));
}

TEST_CASE("threshold ladder and belts") {
    std::mt19937_64 rng(8);
    std::gamma_distribution<double> d(2.0, 1.0);
    Field<double> t(30, 30), v(30, 30);
    for (auto& x : t.values()) x = d(rng);
    for (auto& x : v.values()) x = d(rng);
    const auto scan = scan_thresholds(t, v, 25);
    const auto [lo, hi] = std::minmax_element(t.values().begin(), t.values().end());
    CHECK(scan.thresholds.front() == *lo);
    CHECK(scan.thresholds.back() == *hi);
    for (std::size_t i = 1; i < scan.thresholds.size(); ++i) CHECK(scan.thresholds[i] > scan.thresholds[i - 1]);
    std::int64_t above = 0, total = 0;
    for (double x : t.values()) above += x > *lo;
    for (auto n : scan.belt_counts) total += n;
    CHECK(total == above);
    for (int b = 0; b < 24; ++b)
        if (scan.belt_counts[b] > 0) CHECK(scan.belt_means[scan.chosen_belt] >= scan.belt_means[b]);
        else CHECK(std::isnan(scan.belt_means[b]));
    CHECK(scan.t_star == doctest::Approx(0.5 * (scan.thresholds[scan.chosen_belt] + scan.thresholds[scan.chosen_belt + 1])));
}

TEST_CASE("equal belt means pick the lowest belt") {
    Field<double> t(1, 10), v(1, 10, 1.0);
    for (int c = 0; c < 10; ++c) t(0, c) = c;
    const auto scan = scan_thresholds(t, v, 10);
    for (auto n : scan.belt_counts) CHECK(n == 1);
    CHECK(scan.chosen_belt == 0);
    CHECK(scan.t_star == 0.5);
}

TEST_CASE("minimum belt population") {
    Field<double> t(1, 12), v(1, 12, 1.0);
    for (int c = 0; c < 12; ++c) t(0, c) = c < 8 ? 1.0 : 2.0;
    t(0, 0) = 0.0;
    v(0, 11) = 5.0;  // the upper belt holds 4 pixels with the larger mean
    CHECK(scan_thresholds(t, v, 3).chosen_belt == 1);
    CHECK(scan_thresholds(t, v, 3, 5).chosen_belt == 0);
    CHECK(scan_thresholds(t, v, 3, 50).chosen_belt == 1);  // nothing qualifies: all non-empty belts compete
    CHECK_THROWS_AS(scan_thresholds(t, v, 3, 0), ConfigError);
}

TEST_CASE("scan errors") {
    Field<double> t(4, 4, 1.0), v(4, 4, 0.0);
    CHECK_THROWS_AS(scan_thresholds(t, v), NoSignal);
    t(0, 0) = 2.0;
    CHECK_THROWS_AS(scan_thresholds(t, v, 2), ConfigError);
    CHECK_THROWS_AS(scan_thresholds(t, Field<double>(3, 4)), InvalidInput);
}

TEST_CASE("detect is strict and nested") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> d(0.0, 1.0);
    Field<double> t(20, 20);
    for (auto& x : t.values()) x = d(rng);
    std::vector<double> sorted(t.values().begin(), t.values().end());
    std::sort(sorted.begin(), sorted.end());
    CHECK(count_on(detect(t, sorted.back())) == 0);
    CHECK(count_on(detect(t, sorted.front() - 1.0)) == 400);
    const double med = 0.5 * (sorted[199] + sorted[200]);
    std::int64_t greater = 0;
    for (double x : t.values()) greater += x > med;
    CHECK(count_on(detect(t, med)) == greater);
    CHECK(count_on(detect(t, sorted[150])) == 249);
    const auto a = detect(t, -0.5), b = detect(t, 0.5);
    for (std::size_t p = 0; p < t.size(); ++p) CHECK(b[p] <= a[p]);
}

namespace {

Metrics normal_disc_detection(std::int64_t min_belt_count) {
    SimConfig cfg;
    cfg.family = Family::Normal;
    cfg.alternatives = {2.0};
    cfg.shape = ShapeSpec::disc(20);
    cfg.replicates = 40;
    cfg.seed = 1;
    auto m = MethodSpec::mcd();
    m.min_belt_count = min_belt_count;
    cfg.methods = {m};
    const auto& s = run_experiment(cfg).methods.front().settings.front();
    return {s.sensitivity_mean, s.specificity_mean};
}

}  // namespace

TEST_CASE("normal disc, delta 2, opt-in belt floor") {
    const auto m = normal_disc_detection(20);
    CHECK(m.sensitivity > 0.9);
    CHECK(m.specificity > 0.9);
}

TEST_CASE("normal disc, delta 2, default settings") {
    const auto m = normal_disc_detection(1);
    MESSAGE("sensitivity " << m.sensitivity << ", specificity " << m.specificity);
    CHECK(m.sensitivity > 0.9);
    CHECK(m.specificity > 0.9);
}
