#include "camo/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "camo/errors.hpp"

namespace camo {

size_t Mask::count() const {
    return static_cast<size_t>(std::count_if(data.begin(), data.end(), [](uint8_t v) { return v != 0; }));
}

PixelBox bounding_box(const Mask& mask) {
    PixelBox box{mask.width, mask.height, -1, -1};
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(y, x)) continue;
            box.x0 = std::min(box.x0, x);
            box.y0 = std::min(box.y0, y);
            box.x1 = std::max(box.x1, x);
            box.y1 = std::max(box.y1, y);
        }
    }
    if (!box.valid()) return PixelBox{};
    return box;
}

namespace {

cv::Mat to_mat(const Image& image) {
    cv::Mat m(image.height, image.width, CV_32FC3);
    std::copy(image.data.begin(), image.data.end(), reinterpret_cast<float*>(m.data));
    return m;
}

Image from_mat(const cv::Mat& m) {
    Image out(m.rows, m.cols);
    cv::Mat cont = m.isContinuous() ? m : m.clone();
    const auto* p = reinterpret_cast<const float*>(cont.data);
    std::copy(p, p + out.data.size(), out.data.begin());
    return out;
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IngestError("missing image file: " + path.string());
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw IngestError("cannot decode image file: " + path.string());
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    cv::Mat f;
    rgb.convertTo(f, CV_32FC3, 1.0 / 255.0);
    return from_mat(f);
}

namespace {

cv::Mat to_bgr8(const Image& image) {
    cv::Mat f = to_mat(image);
    cv::Mat u8;
    f.convertTo(u8, CV_8UC3, 255.0);
    cv::Mat bgr;
    cv::cvtColor(u8, bgr, cv::COLOR_RGB2BGR);
    return bgr;
}

}  // namespace

std::vector<uint8_t> encode_png(const Image& image) {
    std::vector<uint8_t> out;
    if (!cv::imencode(".png", to_bgr8(image), out)) throw Error("io", "cannot encode PNG");
    return out;
}

void save_image(const std::filesystem::path& path, const Image& image) {
    const cv::Mat bgr = to_bgr8(image);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), bgr)) throw Error("io", "cannot write image: " + path.string());
}

Mask load_mask(const std::filesystem::path& path) {
    cv::Mat g = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
    if (g.empty()) throw IngestError("cannot read mask: " + path.string());
    Mask m(g.rows, g.cols);
    for (int y = 0; y < g.rows; ++y)
        for (int x = 0; x < g.cols; ++x) m.set(y, x, g.at<uint8_t>(y, x) > 127);
    return m;
}

void save_mask(const std::filesystem::path& path, const Mask& mask) {
    cv::Mat g(mask.height, mask.width, CV_8UC1);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) g.at<uint8_t>(y, x) = mask.at(y, x) ? 255 : 0;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), g)) throw Error("io", "cannot write mask: " + path.string());
}

Image resize(const Image& image, int height, int width) {
    if (image.height == height && image.width == width) return image;
    cv::Mat src = to_mat(image);
    cv::Mat dst;
    const bool shrinking = height < image.height || width < image.width;
    cv::resize(src, dst, cv::Size(width, height), 0, 0, shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
    return from_mat(dst);
}

Rgb sample_bilinear(const Image& image, double u, double v) {
    u = std::clamp(u - 0.5, 0.0, static_cast<double>(image.width - 1));
    v = std::clamp(v - 0.5, 0.0, static_cast<double>(image.height - 1));
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const int x1 = std::min(x0 + 1, image.width - 1);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const float fx = static_cast<float>(u - x0);
    const float fy = static_cast<float>(v - y0);
    const Rgb top = (1.0f - fx) * image.pixel(y0, x0) + fx * image.pixel(y0, x1);
    const Rgb bottom = (1.0f - fx) * image.pixel(y1, x0) + fx * image.pixel(y1, x1);
    return (1.0f - fy) * top + fy * bottom;
}

Image crop(const Image& image, int x0, int y0, int size) {
    Image out(size, size);
    for (int y = 0; y < size; ++y) {
        const int sy = std::clamp(y0 + y, 0, image.height - 1);
        for (int x = 0; x < size; ++x) {
            const int sx = std::clamp(x0 + x, 0, image.width - 1);
            out.set_pixel(y, x, image.pixel(sy, sx));
        }
    }
    return out;
}

Mask crop(const Mask& mask, int x0, int y0, int size) {
    Mask out(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) out.set(y, x, mask.contains(y0 + y, x0 + x));
    return out;
}

Image flip_horizontal(const Image& image) {
    Image out(image.height, image.width);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) out.set_pixel(y, image.width - 1 - x, image.pixel(y, x));
    return out;
}

double mean_abs_difference(const Image& a, const Image& b) {
    if (a.height != b.height || a.width != b.width) throw ShapeError("image shapes differ");
    double s = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) s += std::abs(a.data[i] - b.data[i]);
    return a.data.empty() ? 0.0 : s / static_cast<double>(a.data.size());
}

}  // namespace camo
