#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "twolevel/density.hpp"
#include "twolevel/master.hpp"
#include "twolevel/params.hpp"
#include "twolevel/schedule.hpp"

namespace twolevel {

enum class Track { non_hermitian, master };

Track track_from_name(const std::string& name);
std::string track_name(Track track);

// Flat key = value experiment file, '#' comments. Every key maps one-to-one
// to a physics symbol; unknown keys are rejected. `T` doubles as the sweep's
// reference period: with delta_times_T given, Delta = delta_times_T / T is
// pinned once and held fixed across T_list.
struct ExperimentConfig {
    double E_a = 0.0;
    double E_b = 0.0;
    std::optional<double> nu;
    std::optional<double> delta_times_T;
    double gamma = 0.0;
    std::optional<double> gamma_a;  // override the gamma_a = 2 gamma mapping
    std::optional<double> gamma_b;
    double omega_c = 0.0;
    double dipole = 0.0;
    double E0 = 0.0;
    double T = 0.0;
    std::vector<double> T_list;
    std::optional<std::size_t> steps;
    ScheduleKind schedule = ScheduleKind::linear;
    std::string schedule_table;  // path, required for the table kind
    double rho_aa0 = 1.0;
    cx rho_ab0{};
    Track track = Track::master;
    MEForm form = MEForm::reduced;
    double tolerance = 1e-6;

    ModelParams model() const;          // validated
    NHParams nh() const;                // from overrides or nh_from_master
    DriveSchedule make_schedule(double period) const;
    DensityMatrix initial_density() const;
    AmplitudePair initial_amplitudes() const;  // requires a pure initial state
    std::vector<double> sweep_periods() const; // T_list, or the default grid
    std::size_t steps_for(double period, MEForm form) const;
    std::size_t nh_steps_for(double period) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

} // namespace twolevel
