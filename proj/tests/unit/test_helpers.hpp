#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "heisenet/angles.hpp"
#include "heisenet/network.hpp"
#include "heisenet/rng.hpp"

namespace heisenet::test {

inline double std_normal(Rng& rng) {
    return rng.normal_from_variance(1.0);
}

/// Haar-ish random unitary via QR of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary_matrix(int dim, Rng& rng) {
    Eigen::MatrixXcd g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            g(i, j) = Complex(std_normal(rng), std_normal(rng));
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    // Fix the phase convention so Q is unitary with a deterministic gauge.
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        Complex d = r(j, j);
        if (std::abs(d) > 0) {
            q.col(j) *= d / std::abs(d);
        }
    }
    return q;
}

/// Random stack of beam splitters and phase shifts on `dim` channels.
inline std::vector<UnitaryMatrix> random_stage_stack(int dim, int count, Rng& rng,
                                                     bool include_raw = true) {
    std::vector<UnitaryMatrix> stages;
    stages.reserve(static_cast<std::size_t>(count));
    for (int e = 0; e < count; ++e) {
        int pick = static_cast<int>(rng.next_u64() % (include_raw && dim > 1 ? 3u : 2u));
        if (pick == 0 && dim > 1) {
            int i = 1 + static_cast<int>(rng.next_u64() % static_cast<unsigned>(dim));
            int j = i;
            while (j == i) {
                j = 1 + static_cast<int>(rng.next_u64() % static_cast<unsigned>(dim));
            }
            stages.push_back(beam_splitter(dim, std::min(i, j), std::max(i, j),
                                           rng.uniform(-pi, pi)));
        } else if (pick == 1 || dim == 1) {
            std::vector<double> lambdas(static_cast<std::size_t>(dim));
            for (double& l : lambdas) {
                l = rng.uniform(-pi, pi);
            }
            stages.push_back(phase_shift(lambdas));
        } else {
            stages.push_back(UnitaryMatrix::from_matrix(random_unitary_matrix(dim, rng)));
        }
    }
    return stages;
}

}  // namespace heisenet::test
