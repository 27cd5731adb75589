#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "camo/errors.hpp"
#include "camo/evalkit.hpp"
#include "camo/random.hpp"

using namespace camo;

TEST_CASE("eval_crop_size") {
    CHECK(eval_crop_size(32) == 64);
    CHECK(eval_crop_size(50) == 96);
    CHECK(eval_crop_size(100) == 160);
    for (int d = 1; d <= 512; ++d) {
        const int s = eval_crop_size(d);
        CHECK(s == 32 * static_cast<int>(std::ceil(d / 32.0)) + 32);
        CHECK(s % 32 == 0);
        CHECK(s >= d + 32);
    }
    CHECK_THROWS_AS(eval_crop_size(0), DomainError);
    CHECK_THROWS_AS(eval_crop_size(-5), DomainError);
}

TEST_CASE("extract_eval_crop contains and centers the object") {
    Image a(120, 200, 0.3f), b(120, 200, 0.6f);
    for (auto [x0, y0, w, h] : std::vector<std::array<int, 4>>{{50, 40, 30, 20}, {0, 0, 10, 40}, {180, 100, 20, 20}}) {
        Mask m(120, 200);
        for (int y = y0; y < y0 + h; ++y)
            for (int x = x0; x < x0 + w; ++x) m.set(y, x, true);
        const EvalCrop c = extract_eval_crop(a, b, m);
        CHECK(c.size == eval_crop_size(std::max(w, h)));
        CHECK(c.x0 <= x0);
        CHECK(c.y0 <= y0);
        CHECK(c.x0 + c.size >= x0 + w);
        CHECK(c.y0 + c.size >= y0 + h);
        CHECK(c.x0 >= 0);
        CHECK(c.y0 >= 0);
        CHECK(c.x0 + c.size <= 200);
        CHECK(c.y0 + c.size <= 120);
        CHECK(c.mask.count() == static_cast<size_t>(w * h));
        CHECK(c.rendered.height == c.size);
        CHECK(c.background.pixel(0, 0).x() == doctest::Approx(0.6f));
    }
    Mask centered(120, 200);
    for (int y = 50; y < 70; ++y)
        for (int x = 90; x < 110; ++x) centered.set(y, x, true);
    const EvalCrop c = extract_eval_crop(a, b, centered);
    CHECK(c.x0 == 100 - 32);
    CHECK(c.y0 == 60 - 32);
    CHECK_THROWS_AS(extract_eval_crop(a, b, Mask(120, 200)), DomainError);
}

TEST_CASE("answer key outlines a rectangle") {
    Image img(40, 50, 0.5f);
    Mask m(40, 50);
    for (int y = 10; y < 20; ++y)
        for (int x = 15; x < 35; ++x) m.set(y, x, true);
    bool warn = true;
    const Image key = render_answer_key(img, m, &warn);
    CHECK_FALSE(warn);
    const Mask edge = outline_mask(m);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 50; ++x) {
            // Ring one pixel outside and one pixel inside the rectangle border.
            const bool outer = y >= 9 && y <= 20 && x >= 14 && x <= 35;
            const bool inner = y >= 11 && y <= 18 && x >= 16 && x <= 33;
            const bool want = outer && !inner;
            CHECK(edge.at(y, x) == want);
            if (want)
                CHECK(key.pixel(y, x) == Rgb(1, 0, 0));
            else
                CHECK(key.pixel(y, x) == img.pixel(y, x));
        }
    render_answer_key(img, Mask(40, 50), &warn);
    CHECK(warn);
}

namespace {

std::vector<StudyResponse> planted(const std::string& method, int n, int misses, int offset = 0) {
    std::vector<StudyResponse> out;
    for (int i = 0; i < n; ++i) {
        StudyResponse r;
        r.trial_id = method + std::to_string(i + offset);
        r.method = method;
        const bool miss = i < misses;
        if (miss && i % 2 == 0) {
            r.time_to_click = 60.0;  // timeout
        } else {
            r.click = std::array<double, 2>{1.0, 2.0};
            r.hit = !miss;
            r.time_to_click = 2.0 + (i % 37);
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_CASE("aggregate_study: confusion rates and confidence intervals") {
    auto all = planted("A", 100, 40);
    const StudyTable t = aggregate_study(all);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].confusion == doctest::Approx(0.4));
    CHECK(t.rows[0].confusion_ci.hi - 0.4 == doctest::Approx(0.096).epsilon(0.01));
    CHECK(0.4 - t.rows[0].confusion_ci.lo == doctest::Approx(1.96 * std::sqrt(0.24 / 100)));

    const StudyTable perfect = aggregate_study(planted("B", 30, 0));
    CHECK(perfect.rows[0].confusion == 0.0);

    // CI half-width shrinks like 1/sqrt(n).
    const double w100 = t.rows[0].confusion_ci.hi - t.rows[0].confusion;
    const StudyTable t400 = aggregate_study(planted("A", 400, 160));
    CHECK((t400.rows[0].confusion_ci.hi - t400.rows[0].confusion) == doctest::Approx(w100 / 2.0));
}

TEST_CASE("aggregate_study: training trials, timeouts and missing methods") {
    auto rs = planted("A", 10, 0);
    StudyResponse training = rs[0];
    training.trial_id = "t";
    training.hit = false;
    training.is_training = true;
    rs.push_back(training);
    StudyResponse timeout;
    timeout.trial_id = "late";
    timeout.method = "A";
    timeout.time_to_click = 75.0;
    rs.push_back(timeout);
    AggregateOptions opt;
    opt.methods = {"A", "ghost"};
    const StudyTable t = aggregate_study(rs, opt);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].n == 11);
    CHECK(t.rows[0].confusion == doctest::Approx(1.0 / 11.0));
    double sum = 0.0;
    for (int i = 0; i < 10; ++i) sum += 2.0 + i;
    CHECK(t.rows[0].mean_time == doctest::Approx((sum + 60.0) / 11.0));
    CHECK(t.warnings.size() == 1);
}

TEST_CASE("aggregate_study is order-invariant") {
    auto rs = planted("A", 80, 20);
    auto more = planted("B", 90, 45, 1000);
    rs.insert(rs.end(), more.begin(), more.end());
    const StudyTable a = aggregate_study(rs);
    Rng rng(4);
    shuffle(rs, rng);
    const StudyTable b = aggregate_study(rs);
    CHECK(study_table_csv(a) == study_table_csv(b));
    CHECK(study_table_markdown(a) == study_table_markdown(b));
}

TEST_CASE("statistical tests") {
    const std::vector<double> x = {3.1, 4.5, 2.2, 5.9, 4.4, 3.3, 6.0, 2.8};
    CHECK(mann_whitney_u(x, x).p_value > 0.9);
    CHECK(welch_t_test(x, x).p_value == doctest::Approx(1.0));
    // Reference values from the textbook formulas evaluated independently.
    const std::vector<double> a = {1, 2, 3, 4, 5}, b = {6, 7, 8, 9, 10};
    const TestResult t = welch_t_test(a, b);
    CHECK(t.statistic == doctest::Approx(-5.0));
    CHECK(t.df == doctest::Approx(8.0));
    const TestResult u = mann_whitney_u(a, b);
    CHECK(u.statistic == 0.0);
    // U = 0, mu = 12.5, sigma^2 = 25 * 11 / 12, continuity 0.5.
    const double z = (25.0 - 12.5 - 0.5) / std::sqrt(25.0 * 11.0 / 12.0);
    CHECK(u.p_value == doctest::Approx(std::erfc(z / std::sqrt(2.0))));
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
}
