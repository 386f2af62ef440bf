#pragma once

#include <string>
#include <utility>
#include <vector>

namespace twolevel {

enum class ScheduleKind { linear, smooth_sine, table };

ScheduleKind schedule_kind_from_name(const std::string& name);
std::string schedule_kind_name(ScheduleKind kind);

// Phase ramp phi(t) on [0, T] with phi(0) = 0 and phi(T) = 2 pi, continuous
// and non-decreasing: every kind traces the same closed path, only the
// parametrization differs.
class DriveSchedule {
public:
    static DriveSchedule linear(double T);
    static DriveSchedule smooth_sine(double T);
    static DriveSchedule from_table(double T, std::vector<std::pair<double, double>> samples);
    // Two whitespace-separated columns (time, phase), strictly increasing time.
    static DriveSchedule from_table_file(const std::string& path);

    ScheduleKind kind() const { return kind_; }
    double period() const { return T_; }

    // phi(t); throws for t outside [0, T] (up to a small roundoff slack).
    double phase(double t) const;

    // Same kind, retargeted to a new period. Table schedules rescale time
    // uniformly (same path, same parametrization shape).
    DriveSchedule with_period(double T) const;

    std::string name() const { return schedule_kind_name(kind_); }

private:
    DriveSchedule(ScheduleKind kind, double T) : kind_(kind), T_(T) {}

    ScheduleKind kind_;
    double T_;
    std::vector<std::pair<double, double>> samples_;  // table kind only
};

} // namespace twolevel
