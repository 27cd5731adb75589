#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "camo/image.hpp"
#include "camo/stats.hpp"

namespace camo {

/// Side of the evaluation crop for an object whose mask bounding box has
/// largest side d: 32 * ceil(d / 32) + 32. Throws DomainError for d < 1.
int eval_crop_size(int d);

/// Square crop around the object, taken at the same rectangle from the
/// rendered composite and from the background.
struct EvalCrop {
    Image rendered;
    Image background;
    Mask mask;
    int x0 = 0;
    int y0 = 0;
    int size = 0;
};

/// Centers the crop on the mask bounding box and shifts it inside the image
/// when it fits; larger crops replicate edge pixels. Throws DomainError on an
/// empty mask.
EvalCrop extract_eval_crop(const Image& rendered, const Image& background, const Mask& mask);

/// Pixels of the 3x3 morphological gradient (dilation minus erosion), a
/// 2-pixel band straddling the mask contour.
Mask outline_mask(const Mask& mask);

/// Composite with the outline painted red. `warning` is set for an empty mask.
Image render_answer_key(const Image& composite, const Mask& mask, bool* warning = nullptr);

inline constexpr double kStudyTimeLimit = 60.0;

/// One recorded study trial outcome.
struct StudyResponse {
    std::string trial_id;
    std::string participant_id;
    std::string scene_id;
    std::string method;
    bool is_training = false;
    std::optional<std::array<double, 2>> click;  // pixels, none on timeout
    double time_to_click = 0.0;                  // seconds, timeouts at the limit
    bool hit = false;
    double client_elapsed = 0.0;                 // seconds reported by the browser
};

struct MethodRow {
    std::string method;
    int n = 0;
    double confusion = 0.0;
    Interval confusion_ci;
    double mean_time = 0.0;
    Interval mean_time_ci;
    double median_time = 0.0;
    Interval median_time_ci;
};

struct MethodComparison {
    std::string a;
    std::string b;
    double confusion_p = 1.0;  // Welch t-test on the 0/1 confusion indicator
    double time_p = 1.0;       // Mann-Whitney U on times
};

struct StudyTable {
    std::vector<MethodRow> rows;  // sorted by method name
    std::vector<MethodComparison> comparisons;
    std::vector<std::string> warnings;
};

struct AggregateOptions {
    double time_limit = kStudyTimeLimit;
    int bootstrap_resamples = 10000;
    uint64_t seed = 0;
    std::vector<std::string> methods;  // expected methods; missing ones are reported
};

/// Per-method confusion rate and timing over non-training responses, plus
/// pairwise significance tests. Independent of response order.
StudyTable aggregate_study(const std::vector<StudyResponse>& responses, const AggregateOptions& options = {});

std::string study_table_csv(const StudyTable& table);
std::string study_table_markdown(const StudyTable& table);

/// Confusion-rate bar chart and per-method time histograms as PNG.
void write_study_plots(const StudyTable& table, const std::vector<StudyResponse>& responses,
                       const std::filesystem::path& directory, double time_limit = kStudyTimeLimit);

/// One automated-metric evaluation of a method on a scene view.
struct MetricRecord {
    std::string scene;
    std::string view;
    std::string method;
    double perceptual = 0.0;
    double sifid = 0.0;
};

struct MetricSummary {
    std::string method;
    int n = 0;
    double perceptual = 0.0;
    Interval perceptual_ci;
    double sifid = 0.0;
    Interval sifid_ci;
};

std::vector<MetricSummary> summarize_metrics(const std::vector<MetricRecord>& records);
std::string metric_records_csv(const std::vector<MetricRecord>& records);
std::string metric_summary_markdown(const std::vector<MetricSummary>& summary);

}  // namespace camo
