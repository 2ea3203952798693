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

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "catqec/operators.hpp"
#include "catqec/state.hpp"

namespace catqec {

namespace units {
// Internal units: angular frequencies in rad/ns, times in ns, rates in 1/ns.
// Configuration files quote frequencies as f = omega/2pi.
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline double rad_per_ns_from_mhz(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }
inline double mhz_from_rad_per_ns(double w) { return w / kTwoPi * 1e3; }
inline double rad_per_ns_from_khz(double f_khz) { return kTwoPi * f_khz * 1e-6; }
inline double ns_from_us(double t_us) { return t_us * 1e3; }
}  // namespace units

// Physical parameters of the N-qubit / cavity / ancilla model.
//
// Sign conventions: chi multiplies sigma_z a†a with sigma_z = |e><e| - |g><g|;
// kerr is the positive magnitude of the -K a†a†aa term. The ancilla couples as
// chi_A (1 + sigma_A^z) a†a: in the simulation frame (cavity rotating at
// omega_c - chi_A) the ancilla shifts the cavity only when excited.
struct SystemSpec {
    int n_qubits = 0;
    std::vector<double> chi;     // rad/ns, one per qubit
    double kerr = 0.0;           // rad/ns
    double chi_ancilla = 0.0;    // rad/ns
    double kappa = 0.0;          // 1/ns
    double t1 = std::numeric_limits<double>::infinity();  // ns
    double t2 = std::numeric_limits<double>::infinity();  // ns
    int fock_dim = 40;
    bool has_ancilla = false;

    void validate() const {
        if (n_qubits < 1) throw ConfigError("SystemSpec: need at least one qubit");
        if (static_cast<int>(chi.size()) != n_qubits)
            throw ConfigError("SystemSpec: chi list size must equal n_qubits");
        if (kerr < 0 || kappa < 0 || t1 <= 0 || t2 <= 0)
            throw ConfigError("SystemSpec: rates and times must be nonnegative");
        if (fock_dim < 2) throw ConfigError("SystemSpec: fock_dim must be >= 2");
        if (has_ancilla && chi_ancilla < 0)
            throw ConfigError("SystemSpec: chi_ancilla must be nonnegative");
        if (std::isfinite(t2) && t2 > 2.0 * t1 + 1e-12)
            throw ConfigError("SystemSpec: t2 > 2*t1 implies a negative dephasing rate");
    }

    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (has_ancilla) {
            double max_chi = 0;
            for (double c : chi) max_chi = std::max(max_chi, c);
            if (chi_ancilla < 10.0 * n_qubits * max_chi)
                w.push_back("chi_ancilla < 10*N*max(chi): conditional ancilla pulses may not "
                            "be spectrally selective");
        }
        return w;
    }

    HilbertLayout layout() const {
        return HilbertLayout::qubits_cavity(n_qubits, fock_dim, has_ancilla);
    }

    bool equal_chi(double tol = 1e-12) const {
        for (double c : chi)
            if (std::abs(c - chi.front()) > tol) return false;
        return true;
    }

    // Gamma_phi = 1/T2 - 1/(2 T1); pure dephasing rate.
    double gamma_phi() const {
        const double g = inv(t2) - 0.5 * inv(t1);
        if (g < -1e-15) throw ConfigError("SystemSpec: negative dephasing rate");
        return std::max(0.0, g);
    }

    // Gamma_- = 1/T1 (zero-temperature relaxation).
    double gamma_minus() const { return inv(t1); }

    static double inv(double t) { return std::isfinite(t) ? 1.0 / t : 0.0; }
};

// Hamiltonian diagonal in the computational (x) Fock basis, rad/ns:
//   sum_i chi_i sigma_i^z n - K n(n-1) + chi_A (1 + sigma_A^z) n.
inline Eigen::VectorXd hamiltonian_diagonal(const SystemSpec& spec) {
    spec.validate();
    const HilbertLayout L = spec.layout();
    const long n = L.total_dim();
    const int cav = L.cavity_position();
    Eigen::VectorXd h(n);
    for (long idx = 0; idx < n; ++idx) {
        const double nph = static_cast<double>(L.digit(idx, cav));
        double v = -spec.kerr * nph * (nph - 1.0);
        for (int q = 0; q < spec.n_qubits; ++q) {
            const double sz = L.digit(idx, q) == 1 ? 1.0 : -1.0;
            v += spec.chi[static_cast<std::size_t>(q)] * sz * nph;
        }
        if (spec.has_ancilla) {
            const double sz = L.digit(idx, L.ancilla_position()) == 1 ? 1.0 : -1.0;
            v += spec.chi_ancilla * (1.0 + sz) * nph;
        }
        h[idx] = v;
    }
    return h;
}

inline Operator build_hamiltonian(const SystemSpec& spec) {
    const Eigen::VectorXd h = hamiltonian_diagonal(spec);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(h.size(), h.size());
    for (long i = 0; i < h.size(); ++i) m(i, i) = h[i];
    return Operator(std::move(m), spec.layout());
}

// Square-envelope drive term, either on the cavity or on a qubit subset.
//
// Cavity:  amplitude (exp(i(detuning t + phase)) a + h.c.), achieved
// displacement for a resonant pulse is -i amplitude T exp(-i phase).
// Qubits:  sum over targets of (rabi/2) sigma^x, co-rotating at the
// mean-photon-shifted line: the dispersive term for driven qubits runs with
// (a†a - nbar) during the pulse.
struct DriveTerm {
    enum class Target { Cavity, Qubits };
    Target target = Target::Cavity;
    std::set<int> qubits;  // 1-based labels
    double amplitude = 0.0;  // rad/ns (cavity) or Rabi rate (qubits)
    double phase = 0.0;      // carrier phase, radians
    double detuning = 0.0;   // rad/ns relative to the rotating frame
    double duration = 0.0;   // ns
    double nbar = 0.0;       // frame shift for qubit drives

    void validate(int n_qubits) const {
        if (duration <= 0) throw ConfigError("DriveTerm: duration must be positive");
        if (!std::isfinite(amplitude)) throw ConfigError("DriveTerm: amplitude must be finite");
        if (target == Target::Qubits) {
            if (qubits.empty()) throw ConfigError("DriveTerm: empty qubit target set");
            for (int q : qubits)
                if (q < 1 || q > n_qubits) throw ConfigError("DriveTerm: qubit label out of range");
        }
    }
};

inline DriveTerm build_cavity_drive(const SystemSpec& spec, double amplitude, double duration,
                                    double detuning, double phase = 0.0) {
    DriveTerm d;
    d.target = DriveTerm::Target::Cavity;
    d.amplitude = amplitude;
    d.duration = duration;
    d.detuning = detuning;
    d.phase = phase;
    d.validate(spec.n_qubits);
    return d;
}

// Resonant square pulse realizing the requested complex displacement alpha.
inline DriveTerm cavity_displacement_drive(const SystemSpec& spec, cdouble alpha,
                                           double duration) {
    // -i amplitude T e^{-i phase} = alpha.
    const double amplitude = std::abs(alpha) / duration;
    const double phase = -(std::arg(alpha) + M_PI / 2.0);
    return build_cavity_drive(spec, amplitude, duration, 0.0, phase);
}

inline DriveTerm build_qubit_drive(const SystemSpec& spec, const std::set<int>& targets,
                                   double rabi, double duration, double nbar = 0.0) {
    DriveTerm d;
    d.target = DriveTerm::Target::Qubits;
    d.qubits = targets;
    d.amplitude = rabi;
    d.duration = duration;
    d.nbar = nbar;
    d.validate(spec.n_qubits);
    return d;
}

// One Lindblad dissipator D[L] at a given rate. Structured so the integrator
// can exploit locality; dense() materializes sqrt(rate) * L for tests.
struct CollapseOp {
    enum class Kind { CavityDecay, QubitDephasing, QubitDecay };
    Kind kind;
    double rate;   // kappa, Gamma_phi/2, or Gamma_-
    int qubit;     // 1-based, for the qubit kinds

    Operator dense(const SystemSpec& spec) const {
        const HilbertLayout L = spec.layout();
        const double s = std::sqrt(rate);
        switch (kind) {
            case Kind::CavityDecay:
                return Operator(s * embed_operator(annihilation_operator(spec.fock_dim),
                                                   L.cavity_position(), L)
                                        .mat,
                                L);
            case Kind::QubitDephasing:
                return Operator(s * embed_operator(sigma_z(), L.qubit_position(qubit), L).mat, L);
            case Kind::QubitDecay:
                return Operator(s * embed_operator(sigma_minus(), L.qubit_position(qubit), L).mat,
                                L);
        }
        throw ConfigError("CollapseOp: unreachable");
    }
};

// D[a] at kappa, D[sigma_i^z] at Gamma_phi/2, D[sigma_i^-] at Gamma_- = 1/T1,
// with Gamma_+ = 0. Zero-rate entries are omitted.
inline std::vector<CollapseOp> collapse_operators(const SystemSpec& spec) {
    spec.validate();
    std::vector<CollapseOp> ops;
    if (spec.kappa > 0) ops.push_back({CollapseOp::Kind::CavityDecay, spec.kappa, 0});
    const double gphi = spec.gamma_phi();
    const double gminus = spec.gamma_minus();
    for (int q = 1; q <= spec.n_qubits; ++q) {
        if (gphi > 0) ops.push_back({CollapseOp::Kind::QubitDephasing, gphi / 2.0, q});
        if (gminus > 0) ops.push_back({CollapseOp::Kind::QubitDecay, gminus, q});
    }
    return ops;
}

// Advisory check of the physically accessible (chi, K) region; never blocks.
struct ValidityReport {
    bool kerr_bound_satisfied = true;
    double min_kerr = 0.0;  // chi^2 / (4 alpha_q) for the largest chi
    std::vector<std::string> warnings;
};

inline ValidityReport validate_parameters(const SystemSpec& spec, double alpha_q) {
    if (alpha_q <= 0) throw ConfigError("validate_parameters: alpha_q must be positive");
    spec.validate();
    ValidityReport r;
    double max_chi = 0;
    for (double c : spec.chi) max_chi = std::max(max_chi, c);
    r.min_kerr = max_chi * max_chi / (4.0 * alpha_q);
    r.kerr_bound_satisfied = spec.kerr >= r.min_kerr - 1e-15;
    r.warnings = spec.warnings();
    if (!r.kerr_bound_satisfied)
        r.warnings.push_back("K below chi^2/(4 alpha_q): parameter point is outside the "
                             "physically accessible region");
    return r;
}

}  // namespace catqec
