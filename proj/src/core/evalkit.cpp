#include "camo/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "camo/errors.hpp"

namespace camo {

int eval_crop_size(int d) {
    if (d < 1) throw DomainError("crop size needs an object extent of at least one pixel");
    return 32 * ((d + 31) / 32) + 32;
}

EvalCrop extract_eval_crop(const Image& rendered, const Image& background, const Mask& mask) {
    if (rendered.height != background.height || rendered.width != background.width ||
        rendered.height != mask.height || rendered.width != mask.width)
        throw ShapeError("rendered image, background and mask differ in size");
    const PixelBox box = bounding_box(mask);
    if (!box.valid()) throw DomainError("cannot crop around an empty mask");
    const int s = eval_crop_size(std::max(box.width(), box.height()));
    const auto place = [s](int lo, int hi, int extent) {
        int start = static_cast<int>(std::floor((lo + hi + 1 - s) / 2.0));
        if (s <= extent) start = std::clamp(start, 0, extent - s);
        return start;
    };
    EvalCrop c;
    c.size = s;
    c.x0 = place(box.x0, box.x1, rendered.width);
    c.y0 = place(box.y0, box.y1, rendered.height);
    c.rendered = crop(rendered, c.x0, c.y0, s);
    c.background = crop(background, c.x0, c.y0, s);
    c.mask = crop(mask, c.x0, c.y0, s);
    return c;
}

Mask outline_mask(const Mask& mask) {
    Mask out(mask.height, mask.width);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool any = false, all = true;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int yy = y + dy, xx = x + dx;
                    // Outside the image counts as background for both operators.
                    const bool v = mask.contains(yy, xx);
                    any = any || v;
                    all = all && v;
                }
            }
            out.set(y, x, any && !all);
        }
    }
    return out;
}

Image render_answer_key(const Image& composite, const Mask& mask, bool* warning) {
    if (composite.height != mask.height || composite.width != mask.width)
        throw ShapeError("composite and mask differ in size");
    if (warning) *warning = mask.empty();
    Image out = composite;
    const Mask edge = outline_mask(mask);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (edge.at(y, x)) out.set_pixel(y, x, Rgb(1.0f, 0.0f, 0.0f));
    return out;
}

namespace {

struct Bucket {
    std::vector<double> miss;  // 1 = not found within the limit
    std::vector<double> time;
};

std::map<std::string, Bucket> bucketize(const std::vector<StudyResponse>& responses, double limit) {
    std::map<std::string, Bucket> buckets;
    for (const auto& r : responses) {
        if (r.is_training) continue;
        auto& b = buckets[r.method];
        const bool found = r.click.has_value() && r.hit && r.time_to_click <= limit;
        b.miss.push_back(found ? 0.0 : 1.0);
        b.time.push_back(r.click.has_value() ? std::min(r.time_to_click, limit) : limit);
    }
    // Fixed order inside each bucket keeps every statistic order-invariant.
    for (auto& [m, b] : buckets) {
        std::sort(b.miss.begin(), b.miss.end());
        std::sort(b.time.begin(), b.time.end());
    }
    return buckets;
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

StudyTable aggregate_study(const std::vector<StudyResponse>& responses, const AggregateOptions& options) {
    StudyTable table;
    const auto buckets = bucketize(responses, options.time_limit);
    for (const auto& m : options.methods)
        if (!buckets.count(m)) table.warnings.push_back("no responses for method '" + m + "'; row omitted");
    uint64_t salt = 0;
    for (const auto& [method, b] : buckets) {
        MethodRow row;
        row.method = method;
        row.n = static_cast<int>(b.miss.size());
        row.confusion = mean(b.miss);
        row.confusion_ci = proportion_ci(row.confusion, row.n);
        row.mean_time = mean(b.time);
        row.mean_time_ci = mean_ci(b.time);
        row.median_time = median(b.time);
        row.median_time_ci = bootstrap_median_ci(b.time, options.bootstrap_resamples, options.seed + salt++);
        table.rows.push_back(row);
    }
    for (auto a = buckets.begin(); a != buckets.end(); ++a) {
        for (auto b = std::next(a); b != buckets.end(); ++b) {
            MethodComparison c;
            c.a = a->first;
            c.b = b->first;
            if (a->second.miss.size() >= 2 && b->second.miss.size() >= 2)
                c.confusion_p = welch_t_test(a->second.miss, b->second.miss).p_value;
            c.time_p = mann_whitney_u(a->second.time, b->second.time).p_value;
            table.comparisons.push_back(c);
        }
    }
    return table;
}

std::string study_table_csv(const StudyTable& table) {
    std::ostringstream os;
    os << "method,n,confusion,confusion_lo,confusion_hi,mean_time,mean_time_lo,mean_time_hi,median_time,"
          "median_time_lo,median_time_hi\n";
    for (const auto& r : table.rows)
        os << r.method << ',' << r.n << ',' << fmt(r.confusion) << ',' << fmt(r.confusion_ci.lo) << ','
           << fmt(r.confusion_ci.hi) << ',' << fmt(r.mean_time) << ',' << fmt(r.mean_time_ci.lo) << ','
           << fmt(r.mean_time_ci.hi) << ',' << fmt(r.median_time) << ',' << fmt(r.median_time_ci.lo) << ','
           << fmt(r.median_time_ci.hi) << '\n';
    return os.str();
}

std::string study_table_markdown(const StudyTable& table) {
    std::ostringstream os;
    os << "| Method | n | Confusion rate | Average time (s) | Median time (s) |\n";
    os << "|---|---|---|---|---|\n";
    for (const auto& r : table.rows)
        os << "| " << r.method << " | " << r.n << " | " << fmt(100.0 * r.confusion, 2) << "% ± "
           << fmt(100.0 * (r.confusion_ci.hi - r.confusion), 2) << "% | " << fmt(r.mean_time, 2) << " ± "
           << fmt(r.mean_time_ci.hi - r.mean_time, 2) << " | " << fmt(r.median_time, 2) << " ["
           << fmt(r.median_time_ci.lo, 2) << ", " << fmt(r.median_time_ci.hi, 2) << "] |\n";
    if (!table.comparisons.empty()) {
        os << "\n| Pair | p (confusion, t-test) | p (time, Mann-Whitney U) |\n|---|---|---|\n";
        for (const auto& c : table.comparisons)
            os << "| " << c.a << " vs " << c.b << " | " << fmt(c.confusion_p, 4) << " | " << fmt(c.time_p, 4)
               << " |\n";
    }
    for (const auto& w : table.warnings) os << "\nWarning: " << w << '\n';
    return os.str();
}

void write_study_plots(const StudyTable& table, const std::vector<StudyResponse>& responses,
                       const std::filesystem::path& directory, double time_limit) {
    std::filesystem::create_directories(directory);
    const cv::Scalar ink(40, 40, 40), bar(180, 110, 40);
    {
        const int bw = 80, gap = 30, h = 300, top = 30, bottom = 60;
        const int w = std::max(200, static_cast<int>(table.rows.size()) * (bw + gap) + gap);
        cv::Mat img(h + top + bottom, w, CV_8UC3, cv::Scalar(255, 255, 255));
        cv::line(img, {gap / 2, top + h}, {w - gap / 2, top + h}, ink, 1);
        for (size_t i = 0; i < table.rows.size(); ++i) {
            const auto& r = table.rows[i];
            const int x = gap + static_cast<int>(i) * (bw + gap);
            const int bh = static_cast<int>(std::lround(r.confusion * h));
            cv::rectangle(img, {x, top + h - bh}, {x + bw, top + h}, bar, cv::FILLED);
            const int lo = top + h - static_cast<int>(std::lround(std::clamp(r.confusion_ci.lo, 0.0, 1.0) * h));
            const int hi = top + h - static_cast<int>(std::lround(std::clamp(r.confusion_ci.hi, 0.0, 1.0) * h));
            cv::line(img, {x + bw / 2, lo}, {x + bw / 2, hi}, ink, 2);
            cv::putText(img, r.method, {x, top + h + 20}, cv::FONT_HERSHEY_SIMPLEX, 0.45, ink, 1);
            cv::putText(img, fmt(100.0 * r.confusion, 1) + "%", {x, top + h - bh - 6}, cv::FONT_HERSHEY_SIMPLEX,
                        0.45, ink, 1);
        }
        cv::putText(img, "confusion rate", {gap / 2, 20}, cv::FONT_HERSHEY_SIMPLEX, 0.5, ink, 1);
        cv::imwrite((directory / "confusion.png").string(), img);
    }
    {
        const auto buckets = bucketize(responses, time_limit);
        const int bins = 12, panel_h = 140, bin_w = 30, left = 20, top = 25;
        const int w = left * 2 + bins * bin_w;
        const int h = std::max<int>(1, static_cast<int>(buckets.size())) * (panel_h + top + 20);
        cv::Mat img(h, w, CV_8UC3, cv::Scalar(255, 255, 255));
        int row = 0;
        for (const auto& [method, b] : buckets) {
            std::vector<int> counts(bins, 0);
            for (double t : b.time)
                ++counts[std::min(bins - 1, static_cast<int>(t / time_limit * bins))];
            const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
            const int y0 = row * (panel_h + top + 20) + top;
            cv::putText(img, method + " time-to-click (0-" + fmt(time_limit, 0) + " s)", {left, y0 - 8},
                        cv::FONT_HERSHEY_SIMPLEX, 0.45, ink, 1);
            for (int k = 0; k < bins; ++k) {
                const int bh = counts[k] * panel_h / peak;
                cv::rectangle(img, {left + k * bin_w + 2, y0 + panel_h - bh}, {left + (k + 1) * bin_w - 2, y0 + panel_h},
                              bar, cv::FILLED);
            }
            cv::line(img, {left, y0 + panel_h}, {w - left, y0 + panel_h}, ink, 1);
            ++row;
        }
        cv::imwrite((directory / "time_histograms.png").string(), img);
    }
}

std::vector<MetricSummary> summarize_metrics(const std::vector<MetricRecord>& records) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_method;
    for (const auto& r : records) {
        by_method[r.method].first.push_back(r.perceptual);
        by_method[r.method].second.push_back(r.sifid);
    }
    std::vector<MetricSummary> out;
    for (auto& [m, v] : by_method) {
        std::sort(v.first.begin(), v.first.end());
        std::sort(v.second.begin(), v.second.end());
        MetricSummary s;
        s.method = m;
        s.n = static_cast<int>(v.first.size());
        s.perceptual = mean(v.first);
        s.perceptual_ci = mean_ci(v.first);
        s.sifid = mean(v.second);
        s.sifid_ci = mean_ci(v.second);
        out.push_back(s);
    }
    return out;
}

std::string metric_records_csv(const std::vector<MetricRecord>& records) {
    std::ostringstream os;
    os << "scene,view,method,perceptual,sifid\n";
    for (const auto& r : records)
        os << r.scene << ',' << r.view << ',' << r.method << ',' << fmt(r.perceptual, 6) << ',' << fmt(r.sifid, 6)
           << '\n';
    return os.str();
}

std::string metric_summary_markdown(const std::vector<MetricSummary>& summary) {
    std::ostringstream os;
    os << "| Method | n | Perceptual distance | SIFID |\n|---|---|---|---|\n";
    for (const auto& s : summary)
        os << "| " << s.method << " | " << s.n << " | " << fmt(s.perceptual) << " ± "
           << fmt(s.perceptual_ci.hi - s.perceptual) << " | " << fmt(s.sifid) << " ± " << fmt(s.sifid_ci.hi - s.sifid)
           << " |\n";
    return os.str();
}

}  // namespace camo
