#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace camo {

using Rgb = Eigen::Vector3f;

/// Row-major H x W x 3 float image, RGB in [0, 1]. Continuous image
/// coordinates have their origin at the top-left corner, so pixel (x, y)
/// covers [x, x + 1) x [y, y + 1) and its center is (x + 0.5, y + 0.5).
struct Image {
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Image() = default;
    Image(int h, int w, float fill = 0.0f)
        : height(h), width(w), data(static_cast<size_t>(h) * w * 3, fill) {}

    bool empty() const { return height == 0 || width == 0; }
    size_t index(int y, int x) const { return (static_cast<size_t>(y) * width + x) * 3; }

    float& at(int y, int x, int c) { return data[index(y, x) + c]; }
    float at(int y, int x, int c) const { return data[index(y, x) + c]; }

    Rgb pixel(int y, int x) const {
        const size_t i = index(y, x);
        return {data[i], data[i + 1], data[i + 2]};
    }
    void set_pixel(int y, int x, const Rgb& c) {
        const size_t i = index(y, x);
        data[i] = c.x();
        data[i + 1] = c.y();
        data[i + 2] = c.z();
    }

    bool operator==(const Image&) const = default;
};

/// Boolean coverage mask, row-major.
struct Mask {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> data;

    Mask() = default;
    Mask(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w, 0) {}

    bool at(int y, int x) const { return data[static_cast<size_t>(y) * width + x] != 0; }
    void set(int y, int x, bool v) { data[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    bool contains(int y, int x) const {
        return y >= 0 && x >= 0 && y < height && x < width && at(y, x);
    }
    size_t count() const;
    bool empty() const { return count() == 0; }

    bool operator==(const Mask&) const = default;
};

/// Inclusive pixel bounding box.
struct PixelBox {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
    bool valid() const { return x1 >= x0 && y1 >= y0; }
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    double center_x() const { return 0.5 * (x0 + x1); }
    double center_y() const { return 0.5 * (y0 + y1); }
};

PixelBox bounding_box(const Mask& mask);

Image load_image(const std::filesystem::path& path);
void save_image(const std::filesystem::path& path, const Image& image);
/// 8-bit PNG bytes, as save_image would write them.
std::vector<uint8_t> encode_png(const Image& image);
Mask load_mask(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const Mask& mask);

/// Area-averaged resize (bilinear when upsampling).
Image resize(const Image& image, int height, int width);

/// Bilinear lookup at continuous image coordinates, clamped to the border
/// pixel centers.
Rgb sample_bilinear(const Image& image, double u, double v);

/// size x size window whose top-left corner is (x0, y0); samples outside the
/// image replicate the nearest edge pixel.
Image crop(const Image& image, int x0, int y0, int size);
Mask crop(const Mask& mask, int x0, int y0, int size);

Image flip_horizontal(const Image& image);

double mean_abs_difference(const Image& a, const Image& b);

}  // namespace camo
