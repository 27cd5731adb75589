#include "doctest.h"

#include <map>
#include <set>

#include "camo/errors.hpp"
#include "camo/study.hpp"
#include "study_fixture.hpp"
#include "temp_dir.hpp"

using namespace camo;
using testing_support::TempDir;

namespace {

struct FakeClock {
    double now = 100.0;
    StudyService::Clock fn() {
        return [this] { return now; };
    }
};

}  // namespace

TEST_CASE("sessions cover every scene once with training trials first") {
    TempDir dir("study");
    const auto m = testing_support::write_study_assets(dir.path(), 36, {"ours", "greedy"});
    FakeClock clock;
    StudyService svc(m, dir.path(), dir / "log.jsonl", 7, clock.fn());
    const SessionInfo a = svc.create_session("alice");
    const SessionInfo b = svc.create_session("bob");
    CHECK(a.trial_count == 36);
    CHECK(a.session_token != b.session_token);
    const auto ta = svc.session_trials(a.session_token);
    const auto tb = svc.session_trials(b.session_token);
    std::set<std::string> scenes;
    int training = 0;
    for (const auto& t : ta) {
        scenes.insert(t.scene_id);
        training += t.is_training;
        CHECK(t.is_training == (t.index < 5));
    }
    CHECK(scenes.size() == 36);
    CHECK(training == 5);
    bool differs = false;
    for (size_t i = 0; i < ta.size(); ++i) differs |= ta[i].scene_id != tb[i].scene_id;
    CHECK(differs);
    CHECK_THROWS_AS(svc.create_session("alice"), ConflictError);
    CHECK_THROWS_AS(svc.next_trial("nope"), NotFoundError);
}

TEST_CASE("method assignment is uniform") {
    TempDir dir("study");
    const auto m = testing_support::write_study_assets(dir.path(), 36, {"a", "b", "c"});
    StudyService svc(m, dir.path(), dir / "log.jsonl", 11);
    std::map<std::string, int> counts;
    int total = 0;
    for (int p = 0; p < 280; ++p) {
        const auto info = svc.create_session("p" + std::to_string(p));
        for (const auto& t : svc.session_trials(info.session_token)) {
            ++counts[t.method];
            ++total;
        }
    }
    CHECK(total >= 10000);
    for (const auto& [method, c] : counts) CHECK(std::abs(static_cast<double>(c) / total - 1.0 / 3.0) < 0.02);
}

TEST_CASE("responses: hits, misses, timeouts and outline access") {
    TempDir dir("study");
    const auto m = testing_support::write_study_assets(dir.path(), 8, {"ours"});
    FakeClock clock;
    StudyService svc(m, dir.path(), dir / "log.jsonl", 3, clock.fn());
    const auto s = svc.create_session("carol");

    auto t1 = svc.next_trial(s.session_token);
    REQUIRE(t1);
    CHECK(t1->index == 0);
    CHECK(t1->is_training);
    CHECK(t1->image_url == "/trial/" + t1->trial_id + "/image");
    CHECK(svc.next_trial(s.session_token)->trial_id == t1->trial_id);
    CHECK_THROWS_AS(svc.outline(t1->trial_id), ForbiddenError);
    clock.now += 5.0;
    CHECK_FALSE(svc.trial_image(t1->trial_id).empty());
    clock.now += 2.5;
    const StudyResponse hit = svc.submit_response(t1->trial_id, std::array<double, 2>{25.5, 15.2}, 2.4);
    CHECK(hit.hit);
    CHECK(hit.time_to_click == doctest::Approx(2.5));
    CHECK_THROWS_AS(svc.submit_response(t1->trial_id, std::array<double, 2>{1.0, 1.0}, 1.0), ConflictError);
    const auto expected = encode_png(render_answer_key(load_image(dir.path() / m.assets[svc.trial(t1->trial_id).asset].image),
                                                       load_mask(dir.path() / m.assets[svc.trial(t1->trial_id).asset].mask)));
    CHECK(svc.outline_png(t1->trial_id) == expected);

    auto t2 = svc.next_trial(s.session_token);
    REQUIRE(t2);
    CHECK(t2->index == 1);
    svc.trial_image(t2->trial_id);
    clock.now += 1.0;
    const StudyResponse miss = svc.submit_response(t2->trial_id, std::array<double, 2>{1.0, 1.0}, 1.0);
    CHECK_FALSE(miss.hit);
    CHECK(miss.click.has_value());

    auto t3 = svc.next_trial(s.session_token);
    svc.trial_image(t3->trial_id);
    clock.now += 61.0;
    const StudyResponse late = svc.submit_response(t3->trial_id, std::array<double, 2>{25.0, 15.0}, 10.0);
    CHECK_FALSE(late.hit);
    CHECK(late.time_to_click == 60.0);

    auto t4 = svc.next_trial(s.session_token);
    svc.trial_image(t4->trial_id);
    clock.now += 3.0;
    const StudyResponse client_late = svc.submit_response(t4->trial_id, std::array<double, 2>{25.0, 15.0}, 61.0);
    CHECK_FALSE(client_late.hit);
    CHECK(client_late.time_to_click == 60.0);

    auto t5 = svc.next_trial(s.session_token);
    const StudyResponse none = svc.submit_response(t5->trial_id, std::nullopt, 60.0);
    CHECK_FALSE(none.click.has_value());
    CHECK(none.time_to_click == 60.0);

    CHECK_THROWS_AS(svc.submit_response("ffff", std::nullopt, 1.0), NotFoundError);
    const auto pending = svc.session_trials(s.session_token).back();
    CHECK_THROWS_AS(svc.submit_response(pending.trial_id, std::nullopt, 1.0), ConflictError);
    CHECK_THROWS_AS(svc.trial_image(pending.trial_id), ForbiddenError);

    while (auto t = svc.next_trial(s.session_token)) svc.submit_response(t->trial_id, std::nullopt, 1.0);
    CHECK_FALSE(svc.next_trial(s.session_token).has_value());
    CHECK(svc.responses().size() == 8);
}

TEST_CASE("log replay restores state") {
    TempDir dir("study");
    const auto m = testing_support::write_study_assets(dir.path(), 10, {"ours", "mean"});
    FakeClock clock;
    std::string token, open_id;
    std::vector<StudyResponse> before;
    {
        StudyService svc(m, dir.path(), dir / "log.jsonl", 5, clock.fn());
        token = svc.create_session("dana").session_token;
        svc.create_session("eve");
        for (int i = 0; i < 7; ++i) {
            auto t = svc.next_trial(token);
            svc.trial_image(t->trial_id);
            clock.now += 1.0 + i;
            svc.submit_response(t->trial_id, std::array<double, 2>{22.0 + i, 12.0}, 1.0 + i);
        }
        open_id = svc.next_trial(token)->trial_id;
        before = svc.responses();
    }
    StudyService again(m, dir.path(), dir / "log.jsonl", 5, clock.fn());
    const auto after = again.responses();
    REQUIRE(after.size() == before.size());
    for (size_t i = 0; i < after.size(); ++i) CHECK(response_to_json(after[i]) == response_to_json(before[i]));
    CHECK(study_table_csv(again.aggregate()) == study_table_csv(aggregate_study(before, {60.0, 10000, 0, m.methods})));
    CHECK_THROWS_AS(again.create_session("dana"), ConflictError);
    CHECK(again.next_trial(token)->trial_id == open_id);
    const auto logged = read_response_log(dir / "log.jsonl");
    CHECK(logged.size() == before.size());
}

TEST_CASE("manifest round trip") {
    TempDir dir("study");
    const auto m = testing_support::write_study_assets(dir.path(), 3, {"x", "y"});
    const auto loaded = StudyManifest::load(dir.path());
    CHECK(loaded.scenes == m.scenes);
    CHECK(loaded.methods == m.methods);
    REQUIRE(loaded.assets.size() == 6);
    CHECK(loaded.assets[3].image == m.assets[3].image);
    CHECK_THROWS_AS(StudyManifest::load(dir / "missing"), IngestError);
}
