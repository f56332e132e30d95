#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace centerdepth {

struct Pixel {
    int x{0};
    int y{0};

    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Dense row-major multi-channel image. Channel index varies fastest.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, int channels, T fill = T{})
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<std::size_t>(width) * height * channels, fill) {
        assert(width >= 0 && height >= 0 && channels >= 1);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    std::size_t offset(int x, int y, int c = 0) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    T& at(int x, int y, int c = 0) noexcept { return data_[offset(x, y, c)]; }
    const T& at(int x, int y, int c = 0) const noexcept { return data_[offset(x, y, c)]; }

    /// All channels of one pixel.
    std::span<const T> pixel(int x, int y) const noexcept {
        return {data_.data() + offset(x, y), static_cast<std::size_t>(channels_)};
    }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_{0};
    int height_{0};
    int channels_{1};
    std::vector<T> data_;
};

using DepthRaster = Raster<float>;
using FeatureMap = Raster<float>;

}  // namespace centerdepth
