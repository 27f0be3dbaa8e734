#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "heisenet/estimation.hpp"

namespace heisenet {

enum class RunMode {
    Fisher,
    Variance,
    Scaling,
    ScenarioTwoChannel,
    ScenarioLinearComb,
    PriorProbe,
};

struct SweepSpec {
    std::string axis;  // "theta" or "phi<i>"
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;
    double fixed_theta = 0.0;  // local-oscillator phase for phi sweeps
};

/// Fully-typed run request produced from a config file.
struct RunSpec {
    RunMode mode = RunMode::Scaling;
    ExperimentConfig experiment;
    double single_photons = 0.0;  // N for fisher / variance
    SweepSpec sweep;
    bool prior_fixed_error = false;
    Eigen::VectorXd phi_cl;  // empty = phi (perfect prior); fisher/variance/dumps only
};

/// Config-file diagnostic; line is 0 when no single line is at fault.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error(message), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

/// Parse the flat `key = value` config format ('#' comments, duplicate keys
/// resolve last-wins with a warning on `warnings`). Throws ConfigError.
RunSpec parse_config(const std::string& text, std::ostream& warnings);

/// Angle literal: decimal radians or a pi fraction such as `pi/2`, `-3pi/4`,
/// `2pi`. Throws std::invalid_argument on malformed input.
double parse_angle(const std::string& text);

}  // namespace heisenet
