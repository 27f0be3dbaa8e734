#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace heisenet {

/// Local-oscillator setting theta = f_ref + sign*pi/2 + k/N, wrapped to
/// (-pi, pi].
struct HomodyneSetting {
    double theta = 0.0;
    double k = 0.0;
    int sign = +1;
};

HomodyneSetting select_theta(double f_ref, double k, double mean_photons, int sign = +1);

/// A homodyne record: outcomes drawn from the centred Gaussian of the
/// measured quadrature. Identical (variance, count, seed, theta) reproduce
/// identical samples.
struct MeasurementRecord {
    std::vector<double> samples;
    double theta = 0.0;
    std::uint64_t seed = 0;
};

MeasurementRecord sample_record(double variance, int count, std::uint64_t seed,
                                double theta = 0.0);

/// Sum over samples of -x^2/(2 sigma^2) - log(2 pi sigma^2)/2.
double log_likelihood(std::span<const double> samples, double variance);
double log_likelihood(const MeasurementRecord& record, double variance);

/// One outcome per row, header "index,x".
void write_record_csv(const MeasurementRecord& record, std::ostream& out);

}  // namespace heisenet
