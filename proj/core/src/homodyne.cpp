#include "heisenet/homodyne.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "heisenet/angles.hpp"
#include "heisenet/rng.hpp"

namespace heisenet {

HomodyneSetting select_theta(double f_ref, double k, double mean_photons, int sign) {
    if (mean_photons <= 0.0) {
        throw std::invalid_argument("select_theta: mean photon number must be > 0");
    }
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("select_theta: sign must be +1 or -1");
    }
    if (!std::isfinite(k)) {
        throw std::invalid_argument("select_theta: k must be finite");
    }
    return HomodyneSetting{wrap_angle(f_ref + sign * pi / 2.0 + k / mean_photons), k, sign};
}

MeasurementRecord sample_record(double variance, int count, std::uint64_t seed, double theta) {
    if (variance <= 0.0) {
        throw std::invalid_argument("sample_record: variance must be > 0");
    }
    if (count < 1) {
        throw std::invalid_argument("sample_record: need at least one sample");
    }
    MeasurementRecord record;
    record.theta = theta;
    record.seed = seed;
    record.samples.resize(static_cast<std::size_t>(count));
    Rng rng(seed);
    for (double& x : record.samples) {
        x = rng.normal_from_variance(variance);
    }
    return record;
}

double log_likelihood(std::span<const double> samples, double variance) {
    if (variance <= 0.0) {
        throw std::invalid_argument("log_likelihood: variance must be > 0");
    }
    double sum_sq = 0.0;
    for (double x : samples) {
        sum_sq += x * x;
    }
    double n = static_cast<double>(samples.size());
    return -sum_sq / (2.0 * variance) - 0.5 * n * std::log(2.0 * pi * variance);
}

double log_likelihood(const MeasurementRecord& record, double variance) {
    return log_likelihood(std::span<const double>(record.samples), variance);
}

void write_record_csv(const MeasurementRecord& record, std::ostream& out) {
    out << "index,x\n";
    char buf[40];
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", record.samples[i]);
        out << i << ',' << buf << '\n';
    }
}

}  // namespace heisenet
