#include "ff/arc/grid.hpp"

#include <algorithm>
#include <array>

namespace ff::arc {

Grid::Grid(std::initializer_list<std::initializer_list<std::int32_t>> rows) {
    height = static_cast<int>(rows.size());
    width = height ? static_cast<int>(rows.begin()->size()) : 0;
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != width) throw std::invalid_argument("ragged grid literal");
        cells.insert(cells.end(), r.begin(), r.end());
    }
}

bool valid_grid(const Grid& g) {
    if (g.height < 1 || g.width < 1 || g.height > kMaxSide || g.width > kMaxSide) return false;
    if (g.cells.size() != static_cast<std::size_t>(g.height) * g.width) return false;
    for (auto c : g.cells) {
        if (c < 0 || c >= kColors) return false;
    }
    return true;
}

std::string to_string(const Grid& g) {
    std::string s = "[";
    for (int r = 0; r < g.height; ++r) {
        if (r) s += ',';
        s += '[';
        for (int c = 0; c < g.width; ++c) {
            if (c) s += ',';
            s += std::to_string(g.at(r, c));
        }
        s += ']';
    }
    return s + "]";
}

namespace ops {

namespace {

void check_color(std::int32_t c) {
    if (c < 0 || c >= kColors) throw Hcf("color out of range");
}

void check_side(long side) {
    if (side < 1 || side > kMaxSide) throw Hcf("grid side out of range");
}

std::array<int, kColors> histogram(const Grid& g) {
    std::array<int, kColors> h{};
    for (auto c : g.cells) ++h[static_cast<std::size_t>(c)];
    return h;
}

}  // namespace

Grid mirror_horizontal(const Grid& g) {
    Grid out(g.height, g.width);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c) out.at(r, c) = g.at(r, g.width - 1 - c);
    return out;
}

Grid mirror_vertical(const Grid& g) {
    Grid out(g.height, g.width);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c) out.at(r, c) = g.at(g.height - 1 - r, c);
    return out;
}

Grid rotate_90(const Grid& g) {
    Grid out(g.width, g.height);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) out.at(r, c) = g.at(g.height - 1 - c, r);
    return out;
}

Grid rotate_180(const Grid& g) {
    Grid out(g.height, g.width);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c) out.at(r, c) = g.at(g.height - 1 - r, g.width - 1 - c);
    return out;
}

Grid rotate_270(const Grid& g) {
    Grid out(g.width, g.height);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) out.at(r, c) = g.at(c, g.width - 1 - r);
    return out;
}

Grid transpose(const Grid& g) {
    Grid out(g.width, g.height);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) out.at(r, c) = g.at(c, r);
    return out;
}

Grid recolor(const Grid& g, std::int32_t from, std::int32_t to) {
    check_color(from);
    check_color(to);
    Grid out = g;
    for (auto& c : out.cells) {
        if (c == from) c = to;
    }
    return out;
}

Grid recolor_all(const Grid& g, std::int32_t to) {
    check_color(to);
    const auto bg = background_color(g);
    Grid out = g;
    for (auto& c : out.cells) {
        if (c != bg) c = to;
    }
    return out;
}

Grid crop_to_content(const Grid& g) {
    const auto bg = background_color(g);
    int r0 = g.height, r1 = -1, c0 = g.width, c1 = -1;
    for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) {
            if (g.at(r, c) == bg) continue;
            r0 = std::min(r0, r);
            r1 = std::max(r1, r);
            c0 = std::min(c0, c);
            c1 = std::max(c1, c);
        }
    }
    if (r1 < 0) throw Hcf("grid has no content");
    Grid out(r1 - r0 + 1, c1 - c0 + 1);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) out.at(r, c) = g.at(r0 + r, c0 + c);
    return out;
}

Grid pad_to(const Grid& g, int height, int width, std::int32_t color) {
    check_color(color);
    check_side(height);
    check_side(width);
    if (height < g.height || width < g.width) throw Hcf("pad target smaller than grid");
    Grid out(height, width, color);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < g.width; ++c) out.at(r, c) = g.at(r, c);
    return out;
}

Grid tile(const Grid& g, int nx, int ny) {
    if (nx < 1 || ny < 1) throw Hcf("tile counts must be positive");
    check_side(static_cast<long>(g.width) * nx);
    check_side(static_cast<long>(g.height) * ny);
    Grid out(g.height * ny, g.width * nx);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) out.at(r, c) = g.at(r % g.height, c % g.width);
    return out;
}

Grid scale_up(const Grid& g, int k) {
    if (k < 1) throw Hcf("scale factor must be positive");
    check_side(static_cast<long>(g.width) * k);
    check_side(static_cast<long>(g.height) * k);
    Grid out(g.height * k, g.width * k);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c) out.at(r, c) = g.at(r / k, c / k);
    return out;
}

std::int32_t most_common_color(const Grid& g) {
    auto h = histogram(g);
    std::int32_t best = 0;
    for (std::int32_t c = 1; c < kColors; ++c) {
        if (h[static_cast<std::size_t>(c)] > h[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

std::int32_t least_common_color(const Grid& g) {
    auto h = histogram(g);
    std::int32_t best = -1;
    for (std::int32_t c = 0; c < kColors; ++c) {
        const int n = h[static_cast<std::size_t>(c)];
        if (n == 0) continue;
        if (best < 0 || n < h[static_cast<std::size_t>(best)]) best = c;
    }
    if (best < 0) throw Hcf("empty grid");
    return best;
}

std::int32_t background_color(const Grid& g) { return most_common_color(g); }

std::vector<Object> detect_objects(const Grid& g) {
    const auto bg = background_color(g);
    std::vector<int> label(g.cells.size(), -1);
    std::vector<Object> objects;
    std::vector<std::pair<int, int>> cells;
    std::vector<std::pair<int, int>> frontier;
    for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) {
            const auto idx = static_cast<std::size_t>(r) * g.width + c;
            if (g.cells[idx] == bg || label[idx] >= 0) continue;
            const auto color = g.cells[idx];
            const int id = static_cast<int>(objects.size());
            cells.clear();
            frontier.assign(1, {r, c});
            label[idx] = id;
            while (!frontier.empty()) {
                auto [y, x] = frontier.back();
                frontier.pop_back();
                cells.emplace_back(y, x);
                constexpr int dy[] = {-1, 1, 0, 0};
                constexpr int dx[] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    const int ny = y + dy[k], nx = x + dx[k];
                    if (ny < 0 || nx < 0 || ny >= g.height || nx >= g.width) continue;
                    const auto nidx = static_cast<std::size_t>(ny) * g.width + nx;
                    if (label[nidx] >= 0 || g.cells[nidx] != color) continue;
                    label[nidx] = id;
                    frontier.emplace_back(ny, nx);
                }
            }
            int r0 = g.height, r1 = 0, c0 = g.width, c1 = 0;
            for (auto [y, x] : cells) {
                r0 = std::min(r0, y);
                r1 = std::max(r1, y);
                c0 = std::min(c0, x);
                c1 = std::max(c1, x);
            }
            Object o{Grid(r1 - r0 + 1, c1 - c0 + 1), r0, c0, color};
            for (auto [y, x] : cells) o.mask.at(y - r0, x - c0) = 1;
            objects.push_back(std::move(o));
        }
    }
    return objects;
}

std::vector<Object> filter_symmetric(const std::vector<Object>& objects) {
    std::vector<Object> out;
    for (const auto& o : objects) {
        if (mirror_horizontal(o.mask) == o.mask) out.push_back(o);
    }
    return out;
}

Object largest_object(const std::vector<Object>& objects) {
    if (objects.empty()) throw Hcf("no objects");
    std::size_t best = 0;
    long best_size = -1;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        long n = 0;
        for (auto c : objects[i].mask.cells) n += c != 0;
        if (n > best_size) {
            best_size = n;
            best = i;
        }
    }
    return objects[best];
}

Grid paint_object(const Grid& g, const Object& o) {
    check_color(o.color);
    if (o.row < 0 || o.col < 0 || o.row + o.mask.height > g.height || o.col + o.mask.width > g.width) {
        throw Hcf("object outside grid");
    }
    Grid out = g;
    for (int r = 0; r < o.mask.height; ++r)
        for (int c = 0; c < o.mask.width; ++c)
            if (o.mask.at(r, c)) out.at(o.row + r, o.col + c) = o.color;
    return out;
}

Grid replace_background(const Grid& g, std::int32_t color) {
    check_color(color);
    const auto bg = background_color(g);
    Grid out = g;
    for (auto& c : out.cells) {
        if (c == bg) c = color;
    }
    return out;
}

}  // namespace ops

}  // namespace ff::arc
