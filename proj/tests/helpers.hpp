#pragma once

#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qst/chain.hpp"
#include "qst/states.hpp"

namespace qst::testing {

// exp(-iHt) of the dense single-particle matrix, independent of the QL solver
inline Eigen::MatrixXcd dense_propagator(const ChainSpec& spec, double t) {
    const Eigen::MatrixXcd h = hamiltonian_matrix(spec).dense().cast<std::complex<double>>();
    const Eigen::MatrixXcd a = std::complex<double>(0.0, -t) * h;
    return a.exp();
}

struct RandomChain {
    int sites;
    int block;
    double field;
    double t;
};

inline RandomChain draw_chain(CounterRng& rng, int sites, int block, double h_max = 50.0, double t_max = 100.0) {
    return {sites, block, h_max * rng.uniform(), t_max * rng.uniform()};
}

}  // namespace qst::testing
