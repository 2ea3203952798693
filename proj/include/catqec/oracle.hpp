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

// Closed-form reference results used as independent test oracles. This header
// intentionally depends on nothing but the standard library; keep it that way
// so the oracles stay independent of the simulation path they check.

#include <cmath>
#include <complex>

namespace catqec::oracle {

// sin(x)/x with the removable singularity handled by series.
inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// Cavity branch amplitude after free dispersive evolution against a qubit
// configuration with magnetization A: alpha * exp(-i chi t A).
inline std::complex<double> dispersive_branch_amplitude(std::complex<double> alpha, double chi,
                                                        double t, int magnetization) {
    return alpha * std::exp(std::complex<double>(0.0, -chi * t * magnetization));
}

struct KerrCorrection {
    double phase;    // rotation of the mean amplitude, radians (counterclockwise)
    double damping;  // multiplicative damping of the mean amplitude
};

// Leading-order effect of the self-Kerr term over a window delta_t on a
// coherent state with mean photon number n_bar. The -K n(n-1) Hamiltonian
// rotates the mean amplitude counterclockwise by 2 K n_bar dt and damps it
// by exp(-phase^2 / (2 n_bar)).
inline KerrCorrection kerr_correction(double n_bar, double kerr, double delta_t) {
    const double phase = 2.0 * kerr * n_bar * delta_t;
    const double damping = n_bar > 0.0 ? std::exp(-phase * phase / (2.0 * n_bar)) : 1.0;
    return {phase, damping};
}

// Branch amplitude produced by a resonant square drive of strength epsilon0
// and duration T against magnetization A:
//   -i epsilon0 T exp(-i chi A T / 2) sinc(chi A T / 2).
inline std::complex<double> square_pulse_displacement(double epsilon0, double T, double chi,
                                                      int magnetization) {
    const double x = chi * magnetization * T / 2.0;
    return std::complex<double>(0.0, -1.0) * epsilon0 * T *
           std::exp(std::complex<double>(0.0, -x)) * sinc(x);
}

// Worst-case overlap between the ideal displaced state and the maximally
// rotated branch: exp(-(|alpha| N chi T)^2 / 8). This is the N-qubit
// worst-case form; magnetization |A| <= N sets the maximal phase spread.
inline double displacement_fidelity_bound(double alpha_mag, int n_qubits, double chi, double T) {
    const double x = alpha_mag * n_qubits * chi * T;
    return std::exp(-x * x / 8.0);
}

// <alpha | -alpha> = exp(-2 |alpha|^2), independent of Kerr and subset size.
inline double cat_overlap(std::complex<double> alpha) { return std::exp(-2.0 * std::norm(alpha)); }

// Probability that one pump cycle converts a -1 eigenstate into +1.
inline double pump_probability(double theta) {
    const double s = std::sin(theta / 2.0);
    return s * s;
}

struct PhotonLossDamping {
    double exact;        // exp(-kappa pi / (4 chi))
    double first_order;  // 1 - (pi/4)(kappa/chi)
};

// Amplitude damping of the pointer states over one dispersive half-period.
inline PhotonLossDamping photon_loss_damping(double kappa, double chi) {
    const double x = kappa * M_PI / (4.0 * chi);
    return {std::exp(-x), 1.0 - x};
}

}  // namespace catqec::oracle
