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

#include <set>

#include "catqec/dynamics.hpp"
#include "catqec/oracle.hpp"
#include "catqec/pauli.hpp"

namespace catqec {

struct PulseDurations {
    double displacement = 0.0;  // ns; 0 = instantaneous gate
    double pi_pulse = 0.0;      // ns; 0 = instantaneous flips
};

inline cdouble pow_minus_i(int m) {
    switch (((m % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, -1};
        case 2: return {-1, 0};
        default: return {0, 1};
    }
}

namespace detail {

inline void check_subset(const SystemSpec& spec, const std::set<int>& subset) {
    if (subset.empty()) throw ConfigError("encoding: subset must be nonempty");
    for (int q : subset)
        if (q < 1 || q > spec.n_qubits)
            throw ConfigError("encoding: qubit label out of range: " + std::to_string(q));
}

inline std::set<int> complement_of(const SystemSpec& spec, const std::set<int>& subset) {
    std::set<int> c;
    for (int q = 1; q <= spec.n_qubits; ++q)
        if (!subset.count(q)) c.insert(q);
    return c;
}

inline InstantGate instant_displacement(const SystemSpec& spec, cdouble alpha,
                                        const std::string& label) {
    InstantGate g;
    g.label = label;
    g.cavity_gate = displacement_matrix(alpha, spec.fock_dim);
    return g;
}

inline InstantGate instant_flips(const std::set<int>& qubits, const std::string& label) {
    InstantGate g;
    g.label = label;
    for (int q : qubits) g.qubit_gates.push_back({q, sigma_x()});
    return g;
}

inline void append_displacement(PulseSchedule& s, const SystemSpec& spec, cdouble alpha,
                                double duration, const std::string& label) {
    if (duration <= 0) {
        s.append(instant_displacement(spec, alpha, label), label);
        return;
    }
    const DriveTerm d = cavity_displacement_drive(spec, alpha, duration);
    s.append(CavityDrivePulse{d.amplitude, d.phase, d.detuning, d.duration}, label);
}

inline void append_pi_pulse(PulseSchedule& s, const std::set<int>& targets, double duration,
                            double nbar, const std::string& label) {
    if (targets.empty()) return;
    if (duration <= 0) {
        s.append(instant_flips(targets, label), label);
        return;
    }
    s.append(QubitDrivePulse{targets, M_PI / duration, duration, nbar}, label);
}

}  // namespace detail

// Subset-parity encoding for equal dispersive shifts:
//   D_alpha, free, pi_x on the complement, free, pi_x on the complement,
// with total dispersive phase pi/2 per photon for subset qubits.
//
// With `compensate` set, the free periods absorb the dispersive phase picked
// up during the finite pulses: the displacement contributes half its duration
// to the subset phase and precedes the echo asymmetrically, so the first free
// period is shortened by T_disp/2 + T_pi and the second by T_pi, which also
// cancels the complement's displacement-tail contribution.
inline PulseSchedule parity_encoding_schedule(const SystemSpec& spec, const std::set<int>& subset,
                                              cdouble alpha, const PulseDurations& pd,
                                              bool compensate = true) {
    spec.validate();
    detail::check_subset(spec, subset);
    if (!spec.equal_chi())
        throw ConfigError("parity_encoding_schedule: unequal dispersive shifts; "
                          "use unequal_chi_schedule");
    const double chi = spec.chi.front();
    if (chi <= 0) throw ConfigError("parity_encoding_schedule: chi must be positive");
    const double T = M_PI / (2.0 * chi);
    const std::set<int> comp = detail::complement_of(spec, subset);
    const double nbar = std::norm(alpha);

    PulseSchedule s;
    s.subset = subset;
    s.alpha = alpha;
    detail::append_displacement(s, spec, alpha, pd.displacement, "displace");
    if (comp.empty()) {
        const double free_t = compensate ? T - pd.displacement / 2.0 : T;
        if (free_t < 0) throw ConfigError("parity_encoding_schedule: pulses exceed free evolution");
        s.append(FreeEvolution{free_t}, "free");
        return s;
    }
    const double tp = compensate ? pd.displacement : 0.0;
    const double tpi = compensate ? pd.pi_pulse : 0.0;
    const double f1 = T / 2.0 - tp / 2.0 - tpi;
    const double f2 = T / 2.0 - tpi;
    if (f1 < 0 || f2 < 0)
        throw ConfigError("parity_encoding_schedule: pulses exceed free evolution at this chi");
    s.append(FreeEvolution{f1}, "free");
    detail::append_pi_pulse(s, comp, pd.pi_pulse, nbar, "echo");
    s.append(FreeEvolution{f2}, "free");
    detail::append_pi_pulse(s, comp, pd.pi_pulse, nbar, "echo");
    return s;
}

// Nested bit-flip sequence encoding the parity of `subset` when the
// dispersive shifts differ per qubit (instantaneous pulses). Subset qubit j
// gets flips separated by t_j = T/2 - pi/(4 chi_j); complement qubits get
// flips at T/2 and T. Events are emitted in increasing-t_j order.
inline PulseSchedule unequal_chi_schedule(const SystemSpec& spec, const std::set<int>& subset,
                                          double total_T) {
    spec.validate();
    detail::check_subset(spec, subset);
    double min_chi = std::numeric_limits<double>::infinity();
    for (int q : subset) min_chi = std::min(min_chi, spec.chi[static_cast<std::size_t>(q - 1)]);
    if (min_chi <= 0) throw ConfigError("unequal_chi_schedule: chi must be positive on subset");
    if (total_T < M_PI / (2.0 * min_chi) - 1e-12)
        throw ConfigError("unequal_chi_schedule: total_T below pi/(2 min chi)");

    struct Event {
        double time;
        int qubit;
    };
    std::vector<Event> events;
    for (int q : subset) {
        const double tj = total_T / 2.0 - M_PI / (4.0 * spec.chi[static_cast<std::size_t>(q - 1)]);
        events.push_back({(total_T - tj) / 2.0, q});
        events.push_back({(total_T + tj) / 2.0, q});
    }
    for (int q : detail::complement_of(spec, subset)) {
        events.push_back({total_T / 2.0, q});
        events.push_back({total_T, q});
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });

    PulseSchedule s;
    s.subset = subset;
    double cursor = 0.0;
    std::size_t i = 0;
    while (i < events.size()) {
        const double t = events[i].time;
        if (t > cursor + 1e-12) {
            s.append(FreeEvolution{t - cursor}, "free");
            cursor = t;
        }
        std::set<int> flips;
        std::vector<int> multi;
        while (i < events.size() && events[i].time <= cursor + 1e-12) {
            if (!flips.insert(events[i].qubit).second) multi.push_back(events[i].qubit);
            ++i;
        }
        // coincident flip pairs on one qubit cancel; emit both for honesty
        s.append(detail::instant_flips(flips, "flip"), "flip");
        if (!multi.empty()) {
            std::set<int> again(multi.begin(), multi.end());
            s.append(detail::instant_flips(again, "flip"), "flip");
        }
    }
    if (cursor < total_T - 1e-12) s.append(FreeEvolution{total_T - cursor}, "free");
    return s;
}

// Nominal pointer amplitude after an encoding window: (-i)^M alpha rotated by
// the Kerr phase accumulated over the window (counterclockwise for the
// -K a†a†aa Hamiltonian).
inline cdouble encoded_amplitude(const SystemSpec& spec, int subset_size, cdouble alpha,
                                 double window_duration) {
    const auto kc = oracle::kerr_correction(std::norm(alpha), spec.kerr, window_duration);
    return pow_minus_i(subset_size) * alpha * std::polar(1.0, kc.phase);
}

// Ideal encoded state |a~> P+ |psi> + |-a~> P- |psi> on the full layout
// (cavity branch amplitudes +-alpha_enc, ancilla in g when present).
inline QuantumState encoding_target_state(const SystemSpec& spec, const std::set<int>& subset,
                                          const Eigen::VectorXcd& qubit_state,
                                          cdouble alpha_enc) {
    const HilbertLayout L = spec.layout();
    const long nq_dim = 1L << spec.n_qubits;
    if (qubit_state.size() != nq_dim)
        throw ConfigError("encoding_target_state: qubit state dimension mismatch");
    PauliString zs(spec.n_qubits);
    std::string text;
    for (int q : subset) text += "Z" + std::to_string(q);
    zs = PauliString::parse(text, spec.n_qubits);
    const Eigen::MatrixXcd zd = zs.dense();
    const Eigen::VectorXcd plus = 0.5 * (qubit_state + zd * qubit_state);
    const Eigen::VectorXcd minus = 0.5 * (qubit_state - zd * qubit_state);
    const Eigen::VectorXcd cav_p = coherent_state(alpha_enc, spec.fock_dim);
    const Eigen::VectorXcd cav_m = coherent_state(-alpha_enc, spec.fock_dim);

    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(L.total_dim());
    const long cav_stride = L.stride(L.cavity_position());
    const long qubit_stride = L.total_dim() / nq_dim;
    for (long q = 0; q < nq_dim; ++q)
        for (int n = 0; n < spec.fock_dim; ++n)
            v[q * qubit_stride + n * cav_stride] =
                plus[q] * cav_p[n] + minus[q] * cav_m[n];
    v.normalize();
    return QuantumState::pure(std::move(v), L);
}

// Readout mapping: unconditional displacement by the encoded amplitude, a
// vacuum-conditioned ancilla flip, an ancilla-ground-conditioned displacement
// back, and an ancilla measurement.
inline PulseSchedule readout_mapping_schedule(const SystemSpec& spec, cdouble encoded_alpha,
                                              double displacement_duration = 0.0,
                                              const std::string& measure_label = "ancilla") {
    spec.validate();
    if (!spec.has_ancilla) throw ConfigError("readout_mapping_schedule: spec has no ancilla");
    if (std::abs(encoded_alpha) < 1e-12)
        throw ConfigError("readout_mapping_schedule: zero pointer amplitude is degenerate "
                          "(conditionality requires nbar > 1/4)");
    PulseSchedule s;
    s.alpha = encoded_alpha;
    detail::append_displacement(s, spec, encoded_alpha, displacement_duration, "readout_displace");
    s.append(ConditionalGateSeg{{GateCondition::CavityVacuum, FlipAncilla{}}, 0.0, "cond_flip"},
             "cond_flip");
    s.append(ConditionalGateSeg{{GateCondition::AncillaGround, DisplaceCavity{-2.0 * encoded_alpha}},
                                0.0,
                                "cond_displace"},
             "cond_displace");
    s.append(MeasureSeg{MeasureSeg::Kind::Ancilla, std::nullopt, measure_label}, measure_label);
    return s;
}

// Projector-controlled gate, either exact or sandwiched between two free
// halves that model the dispersive evolution during a real pulse.
struct ConditionalFidelityModel {
    double gate_duration = 0.0;  // 0 = ideal
};

inline QuantumState conditional_gate_apply(const QuantumState& state, const ConditionalGate& gate,
                                           const ConditionalFidelityModel& model,
                                           const SystemSpec& spec, bool noise = false,
                                           const EvolutionOptions& opts = {}) {
    if (model.gate_duration <= 0) return apply_conditional_ideal(state, gate);
    PulseSchedule s;
    s.append(ConditionalGateSeg{gate, model.gate_duration, "conditional"}, "conditional");
    Rng rng(0);  // no sampling happens in this schedule
    return run_schedule(state, s, spec, opts, noise, rng).state;
}

// Basis-change rotations mapping an arbitrary Pauli string to the Z-type
// string on its support: X sites rotate by -pi/2 about y, Y sites by +pi/2
// about x. Returns the forward gate; the inverse is its adjoint.
inline InstantGate pauli_basis_rotation(const PauliString& p, bool inverse,
                                        const std::string& label) {
    InstantGate g;
    g.label = label;
    for (int q = 1; q <= p.n(); ++q) {
        Eigen::Matrix2cd u;
        switch (p.letter(q)) {
            case 'X': u = qubit_rotation('y', -M_PI / 2.0); break;
            case 'Y': u = qubit_rotation('x', M_PI / 2.0); break;
            default: continue;
        }
        if (inverse) u = u.adjoint().eval();
        g.qubit_gates.push_back({q, u});
    }
    return g;
}

// Simulated rotation exp(-i theta Q) of an arbitrary Pauli string Q: basis
// rotations, parity encoding, displacement onto the {2a~, 0} configuration, a
// vacuum-conditioned branch phase of 2 theta, decoding with the opposite
// amplitude, a final displacement back to vacuum, and inverse rotations.
// Kerr phase corrections enter through the tracked branch amplitudes.
inline PulseSchedule simulated_pauli_rotation(const SystemSpec& spec, const PauliString& pauli,
                                              double theta, cdouble alpha,
                                              const PulseDurations& pd = {},
                                              bool compensate = true) {
    spec.validate();
    if (pauli.is_identity()) throw ConfigError("simulated_pauli_rotation: identity Pauli");
    if (!spec.has_ancilla)
        throw ConfigError("simulated_pauli_rotation: spec has no ancilla");
    const auto support = pauli.support();
    const std::set<int> subset(support.begin(), support.end());
    const int m = static_cast<int>(subset.size());

    PulseSchedule s;
    s.subset = subset;
    s.alpha = alpha;
    s.append(pauli_basis_rotation(pauli, false, "basis"), "basis");
    const PulseSchedule enc = parity_encoding_schedule(spec, subset, alpha, pd, compensate);
    s.append_all(enc);
    const cdouble a1 = encoded_amplitude(spec, m, alpha, enc.total_duration());
    detail::append_displacement(s, spec, a1, pd.displacement, "rotate_displace");
    s.append(ConditionalGateSeg{{GateCondition::CavityVacuum, BranchPhase{theta}}, 0.0, "phase"},
             "phase");
    const PulseSchedule dec = parity_encoding_schedule(spec, subset, -a1, pd, compensate);
    s.append_all(dec);
    const auto kc2 = oracle::kerr_correction(std::norm(alpha), spec.kerr, dec.total_duration());
    const cdouble gamma = pow_minus_i(m) * a1 * std::polar(1.0, kc2.phase);
    detail::append_displacement(s, spec, -gamma, pd.displacement, "final_displace");
    s.append(pauli_basis_rotation(pauli, true, "unbasis"), "unbasis");
    return s;
}

// One stabilizer-pumping cycle: encode, displace onto {2a~, 0}, rotate the
// pump qubit by theta about x conditioned on the cavity vacuum, reset the
// cavity. Realizes the Kraus pair E0 = P+ + cos(theta/2) P-,
// Ex = i sin(theta/2) sigma_x P-.
inline PulseSchedule stabilizer_pump_cycle(const SystemSpec& spec, const std::set<int>& subset,
                                           int pump_qubit, double theta, cdouble alpha,
                                           const PulseDurations& pd = {},
                                           bool compensate = true) {
    spec.validate();
    detail::check_subset(spec, subset);
    if (!subset.count(pump_qubit))
        throw ConfigError("stabilizer_pump_cycle: pump qubit must belong to the subset "
                          "(sigma_x must anticommute with the parity operator)");
    PulseSchedule s;
    s.subset = subset;
    s.alpha = alpha;
    const PulseSchedule enc = parity_encoding_schedule(spec, subset, alpha, pd, compensate);
    s.append_all(enc);
    const cdouble a1 =
        encoded_amplitude(spec, static_cast<int>(subset.size()), alpha, enc.total_duration());
    detail::append_displacement(s, spec, a1, pd.displacement, "pump_displace");
    s.append(ConditionalGateSeg{{GateCondition::CavityVacuum, RotateQubit{'x', theta, pump_qubit}},
                                0.0,
                                "pump_rotate"},
             "pump_rotate");
    s.append(ResetSeg{ResetTarget::Cavity}, "reset");
    return s;
}

// rho -> Tr_cavity(rho) (x) |0><0|; pure states with an unentangled cavity
// stay pure.
inline QuantumState cavity_reset(const QuantumState& state) {
    return reset_subsystem(state, state.layout().cavity_position());
}

}  // namespace catqec
