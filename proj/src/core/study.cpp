#include "camo/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

#include "camo/errors.hpp"
#include "camo/random.hpp"

namespace camo {

using nlohmann::json;

namespace {

std::string random_hex(size_t bytes) {
    static thread_local std::random_device rd;
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (size_t i = 0; i < bytes; ++i) {
        const unsigned v = rd() & 0xFFu;
        s.push_back(digits[v >> 4]);
        s.push_back(digits[v & 15u]);
    }
    return s;
}

double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

json response_json(const StudyResponse& r) {
    json j = {{"trial_id", r.trial_id},       {"participant_id", r.participant_id}, {"scene_id", r.scene_id},
              {"method", r.method},           {"is_training", r.is_training},       {"time_to_click", r.time_to_click},
              {"hit", r.hit},                 {"client_elapsed", r.client_elapsed}};
    j["click"] = r.click ? json::array({(*r.click)[0], (*r.click)[1]}) : json(nullptr);
    return j;
}

StudyResponse response_of(const json& j) {
    StudyResponse r;
    r.trial_id = j.at("trial_id").get<std::string>();
    r.participant_id = j.value("participant_id", "");
    r.scene_id = j.value("scene_id", "");
    r.method = j.at("method").get<std::string>();
    r.is_training = j.value("is_training", false);
    r.time_to_click = j.at("time_to_click").get<double>();
    r.hit = j.at("hit").get<bool>();
    r.client_elapsed = j.value("client_elapsed", 0.0);
    if (j.contains("click") && !j["click"].is_null()) r.click = std::array<double, 2>{j["click"][0], j["click"][1]};
    return r;
}

}  // namespace

std::string response_to_json(const StudyResponse& r) { return response_json(r).dump(); }
StudyResponse response_from_json(const std::string& s) { return response_of(json::parse(s)); }

StudyManifest StudyManifest::load(const std::filesystem::path& asset_dir) {
    std::ifstream in(asset_dir / "study.json");
    if (!in) throw IngestError("missing study manifest: " + (asset_dir / "study.json").string());
    const json j = json::parse(in);
    StudyManifest m;
    m.time_limit = j.value("time_limit", kStudyTimeLimit);
    m.training_trials = j.value("training_trials", 5);
    m.methods = j.at("methods").get<std::vector<std::string>>();
    m.scenes = j.at("scenes").get<std::vector<std::string>>();
    for (const auto& a : j.at("assets"))
        m.assets.push_back({a.at("scene_id"), a.value("view_id", ""), a.at("method"),
                            a.at("image").get<std::string>(), a.at("mask").get<std::string>()});
    return m;
}

void StudyManifest::save(const std::filesystem::path& asset_dir) const {
    json j = {{"time_limit", time_limit}, {"training_trials", training_trials}, {"methods", methods},
              {"scenes", scenes},         {"assets", json::array()}};
    for (const auto& a : assets)
        j["assets"].push_back({{"scene_id", a.scene_id}, {"view_id", a.view_id}, {"method", a.method},
                               {"image", a.image.generic_string()}, {"mask", a.mask.generic_string()}});
    std::filesystem::create_directories(asset_dir);
    std::ofstream(asset_dir / "study.json") << j.dump(2) << '\n';
}

StudyService::StudyService(StudyManifest manifest, std::filesystem::path asset_dir, std::filesystem::path log_path,
                           uint64_t seed, Clock clock)
    : manifest_(std::move(manifest)),
      asset_dir_(std::move(asset_dir)),
      log_path_(std::move(log_path)),
      seed_(seed),
      clock_(clock ? std::move(clock) : Clock(steady_seconds)) {
    if (manifest_.scenes.empty() || manifest_.methods.empty()) throw ConfigError("study needs scenes and methods");
    if (std::filesystem::exists(log_path_)) {
        std::ifstream in(log_path_);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) apply(line, true);
    }
    if (log_path_.has_parent_path()) std::filesystem::create_directories(log_path_.parent_path());
    log_.open(log_path_, std::ios::app);
    if (!log_) throw Error("io", "cannot open study log " + log_path_.string());
}

void StudyService::append(const std::string& line) {
    log_ << line << '\n';
    log_.flush();
}

void StudyService::apply(const std::string& line, bool replay) {
    const json j = json::parse(line);
    const std::string event = j.at("event");
    if (event == "session") {
        const std::string token = j.at("token"), participant = j.at("participant_id");
        participants_[participant] = token;
        auto& ids = sessions_[token];
        for (const auto& t : j.at("trials")) {
            StudyTrial tr;
            tr.trial_id = t.at("trial_id");
            tr.participant_id = participant;
            tr.token = token;
            tr.scene_id = t.at("scene_id");
            tr.view_id = t.value("view_id", "");
            tr.method = t.at("method");
            tr.asset = t.at("asset");
            tr.index = t.at("index");
            tr.is_training = t.at("is_training");
            ids.push_back(tr.trial_id);
            trials_[tr.trial_id] = tr;
        }
        ++session_count_;
    } else if (event == "open") {
        StudyTrial& tr = trials_.at(j.at("trial_id"));
        tr.state = TrialState::open;
        // Clock readings do not survive a restart; replayed open trials restart now.
        tr.delivered_at = replay ? clock_() : j.at("at").get<double>();
    } else if (event == "response") {
        StudyResponse r = response_of(j.at("response"));
        StudyTrial& tr = trials_.at(r.trial_id);
        tr.state = TrialState::answered;
        tr.server_elapsed = j.value("server_elapsed", r.time_to_click);
        responses_.push_back(std::move(r));
    }
}

SessionInfo StudyService::create_session(const std::string& participant_id) {
    std::lock_guard lock(mutex_);
    if (participant_id.empty()) throw ContractError("participant_id must not be empty");
    if (participants_.count(participant_id))
        throw ConflictError("participant '" + participant_id + "' is already enrolled");
    // Per-session stream: deterministic for a given seed and enrollment order.
    Rng rng(seed_ ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(session_count_ + 1)));
    std::vector<std::string> order = manifest_.scenes;
    shuffle(order, rng);
    const std::string token = random_hex(16);
    json trials = json::array();
    for (size_t i = 0; i < order.size(); ++i) {
        const std::string& method = manifest_.methods[uniform_index(rng, manifest_.methods.size())];
        std::vector<int> candidates;
        for (size_t a = 0; a < manifest_.assets.size(); ++a)
            if (manifest_.assets[a].scene_id == order[i] && manifest_.assets[a].method == method)
                candidates.push_back(static_cast<int>(a));
        if (candidates.empty())
            throw ConfigError("no study image for scene '" + order[i] + "' and method '" + method + "'");
        const int asset = candidates[uniform_index(rng, candidates.size())];
        trials.push_back({{"trial_id", random_hex(12)},
                          {"scene_id", order[i]},
                          {"view_id", manifest_.assets[asset].view_id},
                          {"method", method},
                          {"asset", asset},
                          {"index", static_cast<int>(i)},
                          {"is_training", static_cast<int>(i) < manifest_.training_trials}});
    }
    const std::string line =
        json{{"event", "session"}, {"participant_id", participant_id}, {"token", token}, {"trials", trials}}.dump();
    append(line);
    apply(line, false);
    return {token, static_cast<int>(order.size())};
}

std::optional<TrialTicket> StudyService::next_trial(const std::string& token) {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(token);
    if (it == sessions_.end()) throw NotFoundError("unknown session token");
    for (const auto& id : it->second) {
        StudyTrial& tr = trials_.at(id);
        if (tr.state == TrialState::answered) continue;
        if (tr.state == TrialState::pending) {
            const std::string line = json{{"event", "open"}, {"trial_id", id}, {"at", clock_()}}.dump();
            append(line);
            apply(line, false);
        }
        return TrialTicket{id, "/trial/" + id + "/image", manifest_.time_limit, tr.index, tr.is_training};
    }
    return std::nullopt;
}

std::vector<uint8_t> StudyService::trial_image(const std::string& trial_id) {
    std::filesystem::path path;
    {
        std::lock_guard lock(mutex_);
        const auto it = trials_.find(trial_id);
        if (it == trials_.end()) throw NotFoundError("unknown trial '" + trial_id + "'");
        StudyTrial& tr = it->second;
        if (tr.state == TrialState::pending) throw ForbiddenError("trial '" + trial_id + "' is not open yet");
        if (tr.state == TrialState::open && !tr.image_fetched) {
            tr.image_fetched = true;
            tr.delivered_at = clock_();
        }
        path = asset_dir_ / manifest_.assets.at(tr.asset).image;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("missing study image " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Mask StudyService::asset_mask(int asset) const { return load_mask(asset_dir_ / manifest_.assets.at(asset).mask); }

StudyResponse StudyService::submit_response(const std::string& trial_id, std::optional<std::array<double, 2>> click,
                                            double client_elapsed_seconds) {
    std::lock_guard lock(mutex_);
    const auto it = trials_.find(trial_id);
    if (it == trials_.end()) throw NotFoundError("unknown trial '" + trial_id + "'");
    const StudyTrial& tr = it->second;
    if (tr.state == TrialState::answered) throw ConflictError("trial '" + trial_id + "' already has a response");
    if (tr.state == TrialState::pending) throw ConflictError("trial '" + trial_id + "' has not been delivered");
    const double limit = manifest_.time_limit;
    const double server_elapsed = std::max(0.0, clock_() - tr.delivered_at);
    StudyResponse r;
    r.trial_id = trial_id;
    r.participant_id = tr.participant_id;
    r.scene_id = tr.scene_id;
    r.method = tr.method;
    r.is_training = tr.is_training;
    r.client_elapsed = client_elapsed_seconds;
    const bool late = client_elapsed_seconds > limit || server_elapsed > limit;
    if (!click || late) {
        r.time_to_click = limit;
        r.hit = false;
    } else {
        r.click = click;
        r.time_to_click = server_elapsed;
        const Mask mask = asset_mask(tr.asset);
        r.hit = mask.contains(static_cast<int>(std::floor((*click)[1])), static_cast<int>(std::floor((*click)[0])));
    }
    const std::string line =
        json{{"event", "response"}, {"response", response_json(r)}, {"server_elapsed", server_elapsed}}.dump();
    append(line);
    apply(line, false);
    return r;
}

Image StudyService::outline(const std::string& trial_id) const {
    int asset = -1;
    {
        std::lock_guard lock(mutex_);
        const auto it = trials_.find(trial_id);
        if (it == trials_.end()) throw NotFoundError("unknown trial '" + trial_id + "'");
        if (it->second.state != TrialState::answered)
            throw ForbiddenError("outline of trial '" + trial_id + "' is available after a response");
        asset = it->second.asset;
    }
    const Image composite = load_image(asset_dir_ / manifest_.assets.at(asset).image);
    return render_answer_key(composite, asset_mask(asset));
}

std::vector<uint8_t> StudyService::outline_png(const std::string& trial_id) const { return encode_png(outline(trial_id)); }

std::vector<StudyResponse> StudyService::responses() const {
    std::lock_guard lock(mutex_);
    return responses_;
}

StudyTrial StudyService::trial(const std::string& trial_id) const {
    std::lock_guard lock(mutex_);
    const auto it = trials_.find(trial_id);
    if (it == trials_.end()) throw NotFoundError("unknown trial '" + trial_id + "'");
    return it->second;
}

std::vector<StudyTrial> StudyService::session_trials(const std::string& token) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(token);
    if (it == sessions_.end()) throw NotFoundError("unknown session token");
    std::vector<StudyTrial> out;
    for (const auto& id : it->second) out.push_back(trials_.at(id));
    return out;
}

StudyTable StudyService::aggregate(const AggregateOptions& options) const {
    AggregateOptions o = options;
    o.time_limit = manifest_.time_limit;
    if (o.methods.empty()) o.methods = manifest_.methods;
    return aggregate_study(responses(), o);
}

std::vector<StudyResponse> read_response_log(const std::filesystem::path& log_path) {
    std::ifstream in(log_path);
    if (!in) throw IngestError("missing study log: " + log_path.string());
    std::vector<StudyResponse> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        if (j.value("event", "") == "response") out.push_back(response_of(j.at("response")));
    }
    return out;
}

}  // namespace camo
