#pragma once

namespace retarget {

// Integer pixel rectangle, half-open: columns [left, left+width), rows [top, top+height).
struct Rect {
    int left = 0;
    int top = 0;
    int width = 0;
    int height = 0;

    int right() const { return left + width; }    // exclusive
    int bottom() const { return top + height; }   // exclusive
    long long area() const { return static_cast<long long>(width) * height; }

    bool contains(const Rect& other) const {
        return other.left >= left && other.top >= top &&
               other.right() <= right() && other.bottom() <= bottom();
    }
    bool contains_point(int x, int y) const {
        return x >= left && x < right() && y >= top && y < bottom();
    }
    bool operator==(const Rect& other) const = default;
};

}  // namespace retarget
