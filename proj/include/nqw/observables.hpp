#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nqw/errors.hpp"
#include "nqw/lattice.hpp"
#include "nqw/nonlinear_step.hpp"

namespace nqw {

struct PositionStats {
    double mean_x = 0.0;
    double sigma = 0.0;
};

/// Charge-weighted mean and standard deviation of x, with p(x) = ρ(x)/Q.
inline PositionStats position_stats(const WalkerState& state) {
    const double q = total_charge(state);
    double m1 = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i)
        m1 += static_cast<double>(state.config().position(i)) * state[i].norm2();
    m1 /= q;
    // Second moment about the mean avoids cancellation in Σx²p − mean².
    double m2 = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double d = static_cast<double>(state.config().position(i)) - m1;
        m2 += d * d * state[i].norm2();
    }
    return {m1, std::sqrt(std::max(0.0, m2 / q))};
}

/// Fraction of the total charge within |x| ≤ radius.
inline double localization_fraction(const WalkerState& state, std::size_t radius) {
    const double q = total_charge(state);
    double inside = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const long x = state.config().position(i);
        if (static_cast<std::size_t>(std::abs(x)) <= radius) inside += state[i].norm2();
    }
    return std::clamp(inside / q, 0.0, 1.0);
}

struct PeakOptions {
    std::size_t min_separation = 4;
    double threshold_fraction = 0.1;
};

/// Local maxima of `density` above threshold_fraction × max, pruned greedily so that kept
/// peaks are at least min_separation apart. Higher peaks win; among equal heights the leftmost
/// wins. A plateau counts once, at its left end. Returned indices are ascending.
inline std::vector<std::size_t> peak_positions(std::span<const double> density,
                                               PeakOptions opt = {}) {
    std::vector<std::size_t> out;
    if (density.empty()) return out;
    const double top = *std::max_element(density.begin(), density.end());
    if (!(top > 0.0)) return out;
    const double floor = opt.threshold_fraction * top;
    const std::size_t n = density.size();

    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = density[i];
        if (d < floor) continue;
        const bool left_ok = i == 0 || d > density[i - 1];
        bool right_ok = true;
        std::size_t j = i + 1;
        while (j < n && density[j] == d) ++j;
        if (j < n && density[j] > d) right_ok = false;
        if (left_ok && right_ok) cand.push_back(i);
    }
    std::stable_sort(cand.begin(), cand.end(),
                     [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });
    for (std::size_t c : cand) {
        const bool clear = std::all_of(out.begin(), out.end(), [&](std::size_t k) {
            return (c > k ? c - k : k - c) >= opt.min_separation;
        });
        if (clear) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct DensitySnapshot {
    std::size_t t = 0;
    std::vector<double> density;
};

/// Time series of position statistics for one run.
struct RunRecord {
    WalkParams params;
    LatticeConfig lattice;
    std::vector<std::size_t> times;
    std::vector<double> mean_x;
    std::vector<double> sigma;
    std::vector<double> speed;  ///< σ(t)/t; NaN at t = 0
    std::vector<DensitySnapshot> snapshots;
    bool guard_ok = true;
    std::string failure;

    std::size_t size() const noexcept { return times.size(); }
    double final_speed() const {
        if (times.empty()) throw InvalidState("empty run record");
        return speed.back();
    }
};

/// σ(t)/t read from a record; t must be a recorded, nonzero time.
inline double ballistic_speed(const RunRecord& record, std::size_t t) {
    if (t == 0) throw DomainError("ballistic speed is undefined at t = 0");
    const auto it = std::find(record.times.begin(), record.times.end(), t);
    if (it == record.times.end())
        throw DomainError("time " + std::to_string(t) + " not in record");
    return record.sigma[static_cast<std::size_t>(it - record.times.begin())] /
           static_cast<double>(t);
}

/// Observer that appends every state it sees to a RunRecord. A snapshot stride of 0 keeps no
/// density snapshots; otherwise states with t % stride == 0 are kept.
class RunRecorder {
public:
    RunRecorder(RunRecord& record, std::size_t snapshot_stride = 0)
        : record_(&record), stride_(snapshot_stride) {}

    void operator()(const WalkerState& state) {
        const PositionStats s = position_stats(state);
        record_->times.push_back(state.t());
        record_->mean_x.push_back(s.mean_x);
        record_->sigma.push_back(s.sigma);
        record_->speed.push_back(state.t() == 0 ? std::numeric_limits<double>::quiet_NaN()
                                                : s.sigma / static_cast<double>(state.t()));
        if (stride_ != 0 && state.t() % stride_ == 0)
            record_->snapshots.push_back({state.t(), charge_density(state)});
    }

private:
    RunRecord* record_;
    std::size_t stride_;
};

/// Evolves `initial` for `steps` steps and records t = 0 and every step after it. `extra` sees
/// each state as well (including the initial one).
template <class Extra>
RunRecord record_run(const WalkerState& initial, const WalkParams& params, std::size_t steps,
                     std::size_t snapshot_stride, Extra&& extra) {
    RunRecord rec;
    rec.params = params;
    rec.lattice = initial.config();
    RunRecorder recorder(rec, snapshot_stride);
    recorder(initial);
    extra(initial);
    evolve(initial, params, steps, [&](const WalkerState& s) {
        recorder(s);
        extra(s);
    });
    return rec;
}

inline RunRecord record_run(const WalkerState& initial, const WalkParams& params,
                            std::size_t steps, std::size_t snapshot_stride = 0) {
    return record_run(initial, params, steps, snapshot_stride, [](const WalkerState&) {});
}

}  // namespace nqw
