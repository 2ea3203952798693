// Copyright 2026 The catqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "catqec/errors.hpp"

namespace catqec {

using cdouble = std::complex<double>;

inline constexpr double kCoherentLeakageTol = 1e-6;

// P(n >= n0) for a Poisson distribution with mean lambda.
inline double poisson_tail(double lambda, int n0) {
    if (lambda <= 0.0) return n0 <= 0 ? 1.0 : 0.0;
    double pmf = std::exp(-lambda);
    double cdf = 0.0;
    for (int n = 0; n < n0; ++n) {
        cdf += pmf;
        pmf *= lambda / static_cast<double>(n + 1);
    }
    return cdf >= 1.0 ? 0.0 : 1.0 - cdf;
}

// Truncated coherent state |alpha> with c_n = e^{-|a|^2/2} a^n / sqrt(n!),
// renormalized after truncation. Rejects truncations whose Poisson tail
// exceeds kCoherentLeakageTol unless allow_leakage is set.
inline Eigen::VectorXcd coherent_state(cdouble alpha, int dim, bool allow_leakage = false) {
    if (dim < 2) throw ConfigError("coherent_state: dim must be >= 2");
    const double nbar = std::norm(alpha);
    const double tail = poisson_tail(nbar, dim);
    if (!allow_leakage && tail > kCoherentLeakageTol)
        throw NumericalError("coherent_state: truncation leakage " + std::to_string(tail) +
                             " exceeds tolerance at dim=" + std::to_string(dim));
    Eigen::VectorXcd v(dim);
    cdouble c = std::exp(-0.5 * nbar);
    for (int n = 0; n < dim; ++n) {
        v[n] = c;
        c *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    v.normalize();
    return v;
}

inline Eigen::VectorXcd fock_vacuum(int dim) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v[0] = 1.0;
    return v;
}

// Photon annihilation operator in the truncated Fock basis: a|n> = sqrt(n)|n-1>.
inline Eigen::MatrixXcd annihilation_operator(int dim) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Eigen::MatrixXcd number_operator(int dim) {
    Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

// D(alpha) = exp(alpha a† - alpha* a) on the truncated Fock space.
// The generator is anti-Hermitian, so we exponentiate through the
// eigendecomposition of its Hermitian counterpart.
inline Eigen::MatrixXcd displacement_matrix(cdouble alpha, int dim) {
    if (dim < 2) throw ConfigError("displacement_matrix: dim must be >= 2");
    Eigen::MatrixXcd a = annihilation_operator(dim);
    Eigen::MatrixXcd g = alpha * a.adjoint() - std::conj(alpha) * a;
    // exp(g) = exp(-i (i g)) with i g Hermitian.
    Eigen::MatrixXcd h = cdouble(0, 1) * g;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases(dim);
    for (int k = 0; k < dim; ++k)
        phases[k] = std::exp(cdouble(0, -es.eigenvalues()[k]));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace catqec
