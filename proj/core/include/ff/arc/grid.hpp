#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ff::arc {

inline constexpr int kMaxSide = 30;
inline constexpr int kColors = 10;

struct Grid {
    int height = 0;
    int width = 0;
    std::vector<std::int32_t> cells;  // row-major

    Grid() = default;
    Grid(int h, int w, std::int32_t fill = 0) : height(h), width(w), cells(static_cast<std::size_t>(h) * w, fill) {}
    Grid(std::initializer_list<std::initializer_list<std::int32_t>> rows);

    std::int32_t at(int r, int c) const { return cells[static_cast<std::size_t>(r) * width + c]; }
    std::int32_t& at(int r, int c) { return cells[static_cast<std::size_t>(r) * width + c]; }

    bool operator==(const Grid&) const = default;
};

// Colors 0-9, sides 1-30.
bool valid_grid(const Grid& g);
std::string to_string(const Grid& g);

// Raised by grid operations on a violated precondition; the primitive
// adapter turns it into an HCF error value.
struct Hcf : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Object {
    Grid mask;  // 1 on object cells, 0 elsewhere, sized to the bounding box
    int row = 0;
    int col = 0;
    std::int32_t color = 0;

    bool operator==(const Object&) const = default;
};

// Pure grid operations behind the ARC primitives.
namespace ops {

Grid mirror_horizontal(const Grid& g);  // reverses columns
Grid mirror_vertical(const Grid& g);    // reverses rows
Grid rotate_90(const Grid& g);          // clockwise
Grid rotate_180(const Grid& g);
Grid rotate_270(const Grid& g);
Grid transpose(const Grid& g);
Grid recolor(const Grid& g, std::int32_t from, std::int32_t to);
Grid recolor_all(const Grid& g, std::int32_t to);
Grid crop_to_content(const Grid& g);
Grid pad_to(const Grid& g, int height, int width, std::int32_t color);
Grid tile(const Grid& g, int nx, int ny);
Grid scale_up(const Grid& g, int k);
std::int32_t most_common_color(const Grid& g);
std::int32_t least_common_color(const Grid& g);
std::int32_t background_color(const Grid& g);
std::vector<Object> detect_objects(const Grid& g);
std::vector<Object> filter_symmetric(const std::vector<Object>& objects);
Object largest_object(const std::vector<Object>& objects);
Grid paint_object(const Grid& g, const Object& o);
Grid replace_background(const Grid& g, std::int32_t color);

}  // namespace ops

}  // namespace ff::arc
