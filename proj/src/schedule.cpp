#include "twolevel/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "twolevel/errors.hpp"

namespace twolevel {

namespace {
constexpr double two_pi = 2.0 * M_PI;
}

ScheduleKind schedule_kind_from_name(const std::string& name) {
    if (name == "linear") return ScheduleKind::linear;
    if (name == "smooth-sine") return ScheduleKind::smooth_sine;
    if (name == "table") return ScheduleKind::table;
    throw ValidationError("unknown schedule kind: " + name);
}

std::string schedule_kind_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::linear: return "linear";
        case ScheduleKind::smooth_sine: return "smooth-sine";
        case ScheduleKind::table: return "table";
    }
    return "?";
}

DriveSchedule DriveSchedule::linear(double T) {
    if (!(T > 0)) throw ValidationError("schedule: non-positive period");
    return DriveSchedule(ScheduleKind::linear, T);
}

DriveSchedule DriveSchedule::smooth_sine(double T) {
    if (!(T > 0)) throw ValidationError("schedule: non-positive period");
    return DriveSchedule(ScheduleKind::smooth_sine, T);
}

DriveSchedule DriveSchedule::from_table(double T, std::vector<std::pair<double, double>> samples) {
    if (!(T > 0)) throw ValidationError("schedule: non-positive period");
    if (samples.size() < 2) throw ValidationError("table schedule: need at least two samples");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].first > samples[i - 1].first))
            throw ValidationError("table schedule: time column not strictly increasing");
        if (samples[i].second < samples[i - 1].second)
            throw ValidationError("table schedule: phase column decreases");
    }
    const double slackT = 1e-9 * T;
    if (std::abs(samples.front().first) > slackT || std::abs(samples.front().second) > 1e-9)
        throw ValidationError("table schedule: must start at (0, 0)");
    if (std::abs(samples.back().first - T) > slackT)
        throw ValidationError("table schedule: last time must equal the period");
    if (std::abs(samples.back().second - two_pi) > 1e-9)
        throw ValidationError("table schedule: phase must end at 2 pi");
    samples.front() = {0.0, 0.0};
    samples.back() = {T, two_pi};
    DriveSchedule s(ScheduleKind::table, T);
    s.samples_ = std::move(samples);
    return s;
}

DriveSchedule DriveSchedule::from_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("table schedule: cannot open " + path);
    std::vector<std::pair<double, double>> samples;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double t, phi;
        if (ls >> t >> phi) samples.emplace_back(t, phi);
    }
    if (samples.empty()) throw ValidationError("table schedule: no samples in " + path);
    const double T = samples.back().first;
    return from_table(T, std::move(samples));
}

double DriveSchedule::phase(double t) const {
    const double slack = 1e-9 * T_;
    if (t < -slack || t > T_ + slack)
        throw ValidationError("phase: time outside [0, T]");
    t = std::clamp(t, 0.0, T_);
    switch (kind_) {
        case ScheduleKind::linear:
            return two_pi * t / T_;
        case ScheduleKind::smooth_sine: {
            const double u = std::sin(0.5 * M_PI * t / T_);
            return two_pi * u * u;
        }
        case ScheduleKind::table: {
            auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                       [](double v, const auto& s) { return v < s.first; });
            if (it == samples_.begin()) return samples_.front().second;
            if (it == samples_.end()) return samples_.back().second;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double f = (t - lo.first) / (hi.first - lo.first);
            return lo.second + f * (hi.second - lo.second);
        }
    }
    return 0.0;
}

DriveSchedule DriveSchedule::with_period(double T) const {
    if (!(T > 0)) throw ValidationError("schedule: non-positive period");
    if (kind_ != ScheduleKind::table) return DriveSchedule(kind_, T);
    auto scaled = samples_;
    const double f = T / T_;
    for (auto& s : scaled) s.first *= f;
    return from_table(T, std::move(scaled));
}

} // namespace twolevel
