#ifndef AVRPLAN_TRAJECTORY_HPP_
#define AVRPLAN_TRAJECTORY_HPP_

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "avrplan/mesh.hpp"

namespace avrplan {

// Half of the camera's pi/2 field of view.
inline constexpr double kHalfFov = std::numbers::pi / 4.0;

// Camera pose: position and unit viewing direction.
struct View {
    Vec3 position;
    Vec3 direction;

    static View looking(const Vec3& position, const Vec3& direction) {
        return View{position, direction.normalized()};
    }
};

// Ordered views. A closed trajectory also flies back from the last view to
// the first, and its length includes that leg.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<View> views, bool closed = false)
        : views_(std::move(views)), closed_(closed) {}

    const std::vector<View>& views() const { return views_; }
    std::span<const View> span() const { return views_; }
    std::size_t size() const { return views_.size(); }
    bool empty() const { return views_.empty(); }
    const View& operator[](std::size_t i) const { return views_[i]; }

    bool closed() const { return closed_; }
    void set_closed(bool closed) { closed_ = closed; }

    void push_back(const View& v) { views_.push_back(v); }
    void append(const Trajectory& other) {
        views_.insert(views_.end(), other.views_.begin(), other.views_.end());
    }

    // Sum of consecutive position distances, plus the closing leg if closed.
    double length() const {
        double sum = 0.0;
        for (std::size_t i = 1; i < views_.size(); ++i)
            sum += (views_[i].position - views_[i - 1].position).norm();
        if (closed_ && views_.size() > 1) sum += (views_.front().position - views_.back().position).norm();
        return sum;
    }

private:
    std::vector<View> views_;
    bool closed_ = false;
};

} // namespace avrplan

#endif
