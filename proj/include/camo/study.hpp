#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "camo/evalkit.hpp"
#include "camo/image.hpp"

namespace camo {

/// One prebuilt study image: a composite of `method` in a reserved view of a
/// scene, with its object mask. Paths are relative to the asset directory.
struct StudyAsset {
    std::string scene_id;
    std::string view_id;
    std::string method;
    std::filesystem::path image;
    std::filesystem::path mask;
};

/// Contents of `study.json` in an asset directory.
struct StudyManifest {
    double time_limit = kStudyTimeLimit;
    int training_trials = 5;
    std::vector<std::string> methods;
    std::vector<std::string> scenes;
    std::vector<StudyAsset> assets;

    static StudyManifest load(const std::filesystem::path& asset_dir);
    void save(const std::filesystem::path& asset_dir) const;
};

enum class TrialState { pending, open, answered };

struct StudyTrial {
    std::string trial_id;
    std::string participant_id;
    std::string token;
    std::string scene_id;
    std::string view_id;
    std::string method;
    int asset = -1;
    int index = 0;
    bool is_training = false;
    TrialState state = TrialState::pending;
    double delivered_at = 0.0;
    bool image_fetched = false;
    double server_elapsed = 0.0;
};

struct SessionInfo {
    std::string session_token;
    int trial_count = 0;
};

struct TrialTicket {
    std::string trial_id;
    std::string image_url;
    double time_limit = kStudyTimeLimit;
    int index = 0;
    bool is_training = false;
};

/// Visual-search study state machine. Every state change is appended to a
/// JSONL log before it takes effect in memory; constructing the service on an
/// existing log replays it. All methods are thread-safe.
class StudyService {
public:
    using Clock = std::function<double()>;  // seconds, monotonic

    StudyService(StudyManifest manifest, std::filesystem::path asset_dir, std::filesystem::path log_path,
                 uint64_t seed, Clock clock = {});

    /// One trial per scene in random order, method uniform per trial, the
    /// first `training_trials` flagged. Throws ConflictError for a known
    /// participant.
    SessionInfo create_session(const std::string& participant_id);

    /// The session's open trial, or the next pending one (which opens and
    /// starts its clock). Empty when the session is finished. Throws
    /// NotFoundError for an unknown token.
    std::optional<TrialTicket> next_trial(const std::string& token);

    /// Closes an open trial. No click or an elapsed time beyond the limit
    /// (client-reported or measured) records a timeout. Throws NotFoundError
    /// for unknown trials and ConflictError for answered or unopened ones.
    StudyResponse submit_response(const std::string& trial_id, std::optional<std::array<double, 2>> click,
                                  double client_elapsed_seconds);

    /// PNG bytes of the trial image; the first fetch restarts the trial clock.
    std::vector<uint8_t> trial_image(const std::string& trial_id);

    /// Answer-key render; ForbiddenError until the trial is answered.
    Image outline(const std::string& trial_id) const;
    std::vector<uint8_t> outline_png(const std::string& trial_id) const;

    std::vector<StudyResponse> responses() const;
    StudyTrial trial(const std::string& trial_id) const;
    std::vector<StudyTrial> session_trials(const std::string& token) const;
    const StudyManifest& manifest() const { return manifest_; }
    StudyTable aggregate(const AggregateOptions& options = {}) const;

private:
    void apply(const std::string& line, bool replay);
    void append(const std::string& line);
    Mask asset_mask(int asset) const;

    StudyManifest manifest_;
    std::filesystem::path asset_dir_;
    std::filesystem::path log_path_;
    uint64_t seed_;
    Clock clock_;
    mutable std::mutex mutex_;
    std::ofstream log_;
    std::map<std::string, std::string> participants_;             // participant -> token
    std::map<std::string, std::vector<std::string>> sessions_;    // token -> trial ids
    std::map<std::string, StudyTrial> trials_;
    std::vector<StudyResponse> responses_;
    int session_count_ = 0;
};

/// Responses recorded in a study log.
std::vector<StudyResponse> read_response_log(const std::filesystem::path& log_path);

/// JSON encoding of a response as stored in the log.
std::string response_to_json(const StudyResponse& r);
StudyResponse response_from_json(const std::string& json);

}  // namespace camo
