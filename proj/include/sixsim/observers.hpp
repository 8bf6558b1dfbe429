#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "sixsim/engine.hpp"
#include "sixsim/model.hpp"
#include "sixsim/occupation.hpp"

namespace sixsim {

// Samples an integer observable at fixed times (right-continuous convention).
// Grid must be sorted ascending and within the run span.
template <class State, class Extract>
class GridSampler : public NullObserver {
public:
    GridSampler(std::vector<double> grid, Extract extract)
        : grid_(std::move(grid)), extract_(std::move(extract)) {
        values_.reserve(grid_.size());
    }

    void segment(double t0, double t1, const State& s) {
        while (next_ < grid_.size() && grid_[next_] >= t0 && grid_[next_] < t1) {
            values_.push_back(extract_(s));
            ++next_;
        }
    }

    void end(double t_end, const State& s) {
        while (next_ < grid_.size() && grid_[next_] <= t_end) {
            values_.push_back(extract_(s));
            ++next_;
        }
    }

    const std::vector<std::int64_t>& values() const { return values_; }
    bool complete() const { return next_ == grid_.size(); }

private:
    std::vector<double> grid_;
    Extract extract_;
    std::vector<std::int64_t> values_;
    std::size_t next_ = 0;
};

// Dwell-time occupation of an integer observable over a window.
template <class State, class Extract>
class OccupationObserver : public NullObserver {
public:
    OccupationObserver(double window_start, double window_end, Extract extract)
        : acc_(window_start, window_end), extract_(std::move(extract)) {}

    void segment(double t0, double t1, const State& s) { acc_.add(t0, t1, extract_(s)); }

    const Occupation1D& measure() const { return acc_; }

private:
    Occupation1D acc_;
    Extract extract_;
};

// Dwell-time occupation of an integer pair over a window.
template <class State, class Extract>
class OccupationObserver2D : public NullObserver {
public:
    OccupationObserver2D(double window_start, double window_end, Extract extract)
        : acc_(window_start, window_end), extract_(std::move(extract)) {}

    void segment(double t0, double t1, const State& s) { acc_.add(t0, t1, extract_(s)); }

    const Occupation2D& measure() const { return acc_; }

private:
    Occupation2D acc_;
    Extract extract_;
};

// Time-binned joint occupation: one 2D measure per cell of a uniform grid
// over [start, end). Segments crossing a cell edge are split exactly.
template <class State, class Extract>
class CellOccupationObserver : public NullObserver {
public:
    CellOccupationObserver(double start, double end, int cells, Extract extract)
        : start_(start), end_(end), extract_(std::move(extract)) {
        const double width = (end - start) / cells;
        cells_.reserve(static_cast<std::size_t>(cells));
        for (int c = 0; c < cells; ++c)
            cells_.emplace_back(start + c * width, start + (c + 1) * width);
    }

    void segment(double t0, double t1, const State& s) {
        if (t1 <= start_ || t0 >= end_) return;
        const double lo = std::max(t0, start_);
        const double hi = std::min(t1, end_);
        const double width = (end_ - start_) / static_cast<double>(cells_.size());
        auto first = static_cast<std::size_t>((lo - start_) / width);
        if (first >= cells_.size()) first = cells_.size() - 1;
        const auto value = extract_(s);
        for (std::size_t c = first; c < cells_.size(); ++c) {
            cells_[c].add(lo, hi, value);
            if (cells_[c].window_end() >= hi) break;
        }
    }

    const std::vector<Occupation2D>& cells() const { return cells_; }

private:
    double start_, end_;
    Extract extract_;
    std::vector<Occupation2D> cells_;
};

// Samples several observables of one run on a shared grid.
template <class State>
class MultiGridSampler : public NullObserver {
public:
    using Extract = std::function<std::int64_t(const State&)>;

    MultiGridSampler() = default;
    MultiGridSampler(std::vector<double> grid, std::vector<Extract> extractors)
        : grid_(std::move(grid)), extractors_(std::move(extractors)),
          values_(extractors_.size()) {}

    void segment(double t0, double t1, const State& s) {
        while (next_ < grid_.size() && grid_[next_] >= t0 && grid_[next_] < t1) {
            for (std::size_t c = 0; c < extractors_.size(); ++c)
                values_[c].push_back(extractors_[c](s));
            ++next_;
        }
    }

    void end(double t_end, const State& s) {
        while (next_ < grid_.size() && grid_[next_] <= t_end) {
            for (std::size_t c = 0; c < extractors_.size(); ++c)
                values_[c].push_back(extractors_[c](s));
            ++next_;
        }
    }

    const std::vector<std::vector<std::int64_t>>& values() const { return values_; }
    std::vector<std::vector<std::int64_t>>&& take_values() { return std::move(values_); }

private:
    std::vector<double> grid_;
    std::vector<Extract> extractors_;
    std::vector<std::vector<std::int64_t>> values_;
    std::size_t next_ = 0;
};

// Re-validates the full-chain bookkeeping from scratch after every event:
// component bounds, promoter constraint, and mass conservation through psi.
class InvariantAuditor : public NullObserver {
public:
    explicit InvariantAuditor(const ModelParams& p) : p_(&p) {}

    void event(double, TransitionLabel, const FullState& x) {
        ++events_;
        try {
            validate_state(x, *p_);
        } catch (const invalid_state_error&) {
            ++violations_;
        }
    }

    std::uint64_t events() const { return events_; }
    std::uint64_t violations() const { return violations_; }

private:
    const ModelParams* p_;
    std::uint64_t events_ = 0;
    std::uint64_t violations_ = 0;
};

// Tracks the running maximum of an integer observable over the whole run.
template <class State, class Extract>
class MaxObserver : public NullObserver {
public:
    explicit MaxObserver(Extract extract) : extract_(std::move(extract)) {}

    void segment(double, double, const State& s) {
        max_ = std::max(max_, extract_(s));
    }
    void end(double, const State& s) { max_ = std::max(max_, extract_(s)); }

    std::int64_t max_value() const { return max_; }

private:
    Extract extract_;
    std::int64_t max_ = std::numeric_limits<std::int64_t>::min();
};

template <class State, class Extract>
class MinObserver : public NullObserver {
public:
    explicit MinObserver(Extract extract) : extract_(std::move(extract)) {}

    void segment(double, double, const State& s) {
        min_ = std::min(min_, extract_(s));
    }
    void end(double, const State& s) { min_ = std::min(min_, extract_(s)); }

    std::int64_t min_value() const { return min_; }

private:
    Extract extract_;
    std::int64_t min_ = std::numeric_limits<std::int64_t>::max();
};

// Fans one run out to two observers.
template <class A, class B>
struct PairObserver {
    A& a;
    B& b;
    template <class State>
    void segment(double t0, double t1, const State& s) {
        a.segment(t0, t1, s);
        b.segment(t0, t1, s);
    }
    template <class State>
    void event(double t, TransitionLabel label, const State& s) {
        a.event(t, label, s);
        b.event(t, label, s);
    }
    template <class State>
    void end(double t, const State& s) {
        a.end(t, s);
        b.end(t, s);
    }
};

template <class A, class B>
PairObserver<A, B> pair_observer(A& a, B& b) {
    return {a, b};
}

} // namespace sixsim
