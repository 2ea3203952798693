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

#include <map>
#include <string>

#include "catqec/protocols.hpp"

namespace catqec {

// --- projectors and measurement ----------------------------------------------

// Dense (1 +- P)/2 embedded in the full layout (identity on cavity/ancilla).
inline Operator pauli_projector(const PauliString& p, int sign, const HilbertLayout& layout) {
    if (sign != +1 && sign != -1) throw ConfigError("pauli_projector: sign must be +-1");
    if (!p.squares_to_identity())
        throw ConfigError("pauli_projector: operator squares to -1 (phase +-i string)");
    const Operator pd = p.embedded(layout);
    const long n = layout.total_dim();
    Eigen::MatrixXcd m =
        0.5 * (Eigen::MatrixXcd::Identity(n, n) + static_cast<double>(sign) * pd.mat);
    return Operator(std::move(m), layout);
}

// Mode selector for measure_stabilizer: ideal projective measurement, or the
// full cavity-pointer protocol (encode, map to the ancilla, read out, reset).
struct MeasureMode {
    bool full_protocol = false;
    cdouble alpha{2.0, 0.0};
    PulseDurations durations{};
    bool compensate = true;
    bool noise = false;
    EvolutionOptions opts{};
};

struct StabilizerOutcome {
    int outcome;  // +1 / -1
    double probability;
    QuantumState state;
    MeasurementRecord record;
};

// Full-protocol measurement schedule: basis rotations, subset-parity encoding,
// readout mapping onto the ancilla, ancilla + cavity reset, inverse rotations.
inline PulseSchedule stabilizer_measurement_schedule(const SystemSpec& spec,
                                                     const PauliString& pauli,
                                                     const MeasureMode& mode,
                                                     const std::string& measure_label) {
    if (!spec.has_ancilla)
        throw ConfigError("stabilizer_measurement_schedule: spec has no ancilla");
    const auto support = pauli.support();
    const std::set<int> subset(support.begin(), support.end());
    PulseSchedule s;
    s.subset = subset;
    s.alpha = mode.alpha;
    s.append(pauli_basis_rotation(pauli, false, "basis"), "basis");
    const PulseSchedule enc =
        parity_encoding_schedule(spec, subset, mode.alpha, mode.durations, mode.compensate);
    s.append_all(enc);
    const cdouble a1 = encoded_amplitude(spec, static_cast<int>(subset.size()), mode.alpha,
                                         enc.total_duration());
    s.append_all(readout_mapping_schedule(spec, a1, mode.durations.displacement, measure_label));
    s.append(ResetSeg{ResetTarget::Ancilla}, "reset_ancilla");
    s.append(ResetSeg{ResetTarget::Cavity}, "reset_cavity");
    s.append(pauli_basis_rotation(pauli, true, "unbasis"), "unbasis");
    return s;
}

// Measures a multi-qubit Pauli operator. Ideal mode projects with Born
// probabilities; full-protocol mode runs the pointer-state protocol and
// returns the ancilla outcome (e maps to -1).
inline StabilizerOutcome measure_stabilizer(const QuantumState& state, const PauliString& p,
                                            const MeasureMode& mode, const SystemSpec& spec,
                                            Rng& rng) {
    if (!p.squares_to_identity())
        throw ConfigError("measure_stabilizer: operator must square to identity");
    if (!mode.full_protocol) {
        auto res = measure_pauli_ideal(state, p, rng);
        MeasurementRecord rec;
        rec.entries.push_back({p.str(), res.outcome, res.probability});
        return {res.outcome, res.probability, std::move(res.state), std::move(rec)};
    }
    const PulseSchedule s = stabilizer_measurement_schedule(spec, p, mode, "ancilla");
    auto run = run_schedule(state, s, spec, mode.opts, mode.noise, rng);
    const int ancilla = run.record.outcome_of("ancilla");
    const int outcome = ancilla == 0 ? +1 : -1;
    double prob = 0.0;
    for (const auto& e : run.record.entries)
        if (e.label == "ancilla") prob = e.probability;
    return {outcome, prob, std::move(run.state), std::move(run.record)};
}

// --- codes ---------------------------------------------------------------------

struct StabilizerCode {
    std::string name;
    int n_qubits = 0;
    std::vector<PauliString> generators;
    std::vector<std::pair<std::string, PauliString>> logicals;

    const PauliString& logical(const std::string& key) const {
        for (const auto& [k, p] : logicals)
            if (k == key) return p;
        throw ConfigError("StabilizerCode: no logical named " + key);
    }

    std::string to_json() const {
        std::string out = "{\n  \"name\": \"" + name + "\",\n  \"n_qubits\": " +
                          std::to_string(n_qubits) + ",\n  \"generators\": [";
        for (std::size_t i = 0; i < generators.size(); ++i)
            out += (i ? ", " : "") + std::string("\"") + generators[i].str() + "\"";
        out += "],\n  \"logicals\": {";
        for (std::size_t i = 0; i < logicals.size(); ++i)
            out += (i ? ", " : "") + std::string("\"") + logicals[i].first + "\": \"" +
                   logicals[i].second.str() + "\"";
        out += "}\n}\n";
        return out;
    }
};

// Projector onto the joint +1 eigenspace: product of (1+g)/2 over generators.
inline Eigen::MatrixXcd code_projector_dense(const StabilizerCode& code) {
    const long d = 1L << code.n_qubits;
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(d, d);
    for (const auto& g : code.generators)
        proj = (proj * 0.5 * (Eigen::MatrixXcd::Identity(d, d) + g.dense())).eval();
    return proj;
}

// Four-qubit erasure code: S = {Z1Z2, Z3Z4, X1X2X3X4}, logical Z = X1X2,
// logical X = Z1Z3, codewords |+-> = ((|gg> +- |ee>)/sqrt2)^(x2).
inline StabilizerCode erasure_code() {
    StabilizerCode c;
    c.name = "four-qubit-erasure";
    c.n_qubits = 4;
    c.generators = {PauliString::parse("Z1Z2", 4), PauliString::parse("Z3Z4", 4),
                    PauliString::parse("X1X2X3X4", 4)};
    c.logicals = {{"Z", PauliString::parse("X1X2", 4)},
                  {"X", PauliString::parse("Z1Z3", 4)},
                  {"Y", (PauliString::parse("Z1Z3", 4) * PauliString::parse("X1X2", 4)).times_i()}};
    return c;
}

// Dense codeword |+> or |-> of the erasure code (16-dim qubit space).
inline Eigen::VectorXcd erasure_codeword(int sign) {
    Eigen::VectorXcd pair(4);  // (|gg> + sign |ee>)/sqrt2 over indices {gg,ge,eg,ee}
    pair.setZero();
    pair[0] = 1.0 / std::sqrt(2.0);
    pair[3] = sign / std::sqrt(2.0);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) v[a * 4 + b] = pair[a] * pair[b];
    return v;
}

// 2N-qubit toric code on a rows x cols torus of vertices (2*rows*cols edge
// qubits). For rows = cols = 2 the qubit labeling follows the planar
// unfolding with the explicit 8-qubit generator set
//   P1=Z1Z4Z7Z8  P2=Z2Z3Z7Z8  P3=Z1Z4Z5Z6  P4=Z2Z3Z5Z6
//   S1=X1X2X5X7  S2=X3X4X5X7  S3=X1X2X6X8  S4=X3X4X6X8;
// larger lattices use row-major edge ordering: horizontal edge of vertex
// (r,c) first, then its vertical edge.
inline StabilizerCode toric_code_generators(int rows, int cols) {
    if (rows < 1 || cols < 1) throw ConfigError("toric_code_generators: bad lattice size");
    const int nv = rows * cols;
    const int nq = 2 * nv;

    // edge labels, 1-based
    auto h_edge = [&](int r, int c) {
        r = (r % rows + rows) % rows;
        c = (c % cols + cols) % cols;
        if (rows == 2 && cols == 2) {
            static const int table[2][2] = {{7, 5}, {8, 6}};
            return table[r][c];
        }
        return 2 * (r * cols + c) + 1;
    };
    auto u_edge = [&](int r, int c) {
        r = (r % rows + rows) % rows;
        c = (c % cols + cols) % cols;
        if (rows == 2 && cols == 2) {
            static const int table[2][2] = {{1, 4}, {2, 3}};
            return table[r][c];
        }
        return 2 * (r * cols + c) + 2;
    };

    StabilizerCode code;
    code.name = "toric-" + std::to_string(rows) + "x" + std::to_string(cols);
    code.n_qubits = nq;
    auto z_string = [&](std::vector<int> qs) {
        std::string t;
        std::sort(qs.begin(), qs.end());
        for (int q : qs) t += "Z" + std::to_string(q);
        return PauliString::parse(t, nq);
    };
    auto x_string = [&](std::vector<int> qs) {
        std::string t;
        std::sort(qs.begin(), qs.end());
        for (int q : qs) t += "X" + std::to_string(q);
        return PauliString::parse(t, nq);
    };
    // plaquettes (Z) then stars (X), row-major over vertices
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            code.generators.push_back(
                z_string({h_edge(r, c), h_edge(r + 1, c), u_edge(r, c), u_edge(r, c + 1)}));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            code.generators.push_back(
                x_string({h_edge(r, c), h_edge(r, c - 1), u_edge(r, c), u_edge(r - 1, c)}));

    // incontractible loops: Z along row-0 horizontal edges and column-0
    // vertical edges; X along row-0 vertical edges and column-0 horizontal.
    std::vector<int> zh, zu, xu, xh;
    for (int c = 0; c < cols; ++c) zh.push_back(h_edge(0, c));
    for (int r = 0; r < rows; ++r) zu.push_back(u_edge(r, 0));
    for (int c = 0; c < cols; ++c) xu.push_back(u_edge(0, c));
    for (int r = 0; r < rows; ++r) xh.push_back(h_edge(r, cols - 1));
    code.logicals = {{"Z1", z_string(zu)},
                     {"X1", x_string(xu)},
                     {"Z2", z_string(zh)},
                     {"X2", x_string(xh)}};
    return code;
}

// Cluster-state stabilizers on a simple graph: S_i = X_i prod_{j ~ i} Z_j.
inline StabilizerCode cluster_state_generators(int n_vertices,
                                               const std::vector<std::pair<int, int>>& edges) {
    if (n_vertices < 1) throw ConfigError("cluster_state_generators: need vertices");
    std::vector<std::set<int>> nn(static_cast<std::size_t>(n_vertices + 1));
    for (auto [a, b] : edges) {
        if (a == b) throw ConfigError("cluster_state_generators: self-loop rejected");
        if (a < 1 || b < 1 || a > n_vertices || b > n_vertices)
            throw ConfigError("cluster_state_generators: vertex out of range");
        nn[static_cast<std::size_t>(a)].insert(b);
        nn[static_cast<std::size_t>(b)].insert(a);
    }
    StabilizerCode code;
    code.name = "cluster-" + std::to_string(n_vertices);
    code.n_qubits = n_vertices;
    for (int i = 1; i <= n_vertices; ++i) {
        std::string t = "X" + std::to_string(i);
        for (int j : nn[static_cast<std::size_t>(i)]) t += "Z" + std::to_string(j);
        code.generators.push_back(PauliString::parse(t, n_vertices));
    }
    return code;
}

// --- erasure-code state preparation -------------------------------------------

struct PreparationResult {
    QuantumState state;
    MeasurementRecord record;
};

// Prepares exp(-i theta Xbar)|+> of the erasure code from |gggg>: measure
// X1X2 (apply Z1 on -1), measure X3X4 (apply Z3 on -1), reset the cavity,
// then run the simulated logical rotation.
inline PreparationResult prepare_erasure_logical(const SystemSpec& spec, const MeasureMode& mode,
                                                 double theta, Rng& rng) {
    spec.validate();
    if (spec.n_qubits != 4) throw ConfigError("prepare_erasure_logical: requires 4 qubits");
    const HilbertLayout L = spec.layout();
    QuantumState state = QuantumState::basis_product(L, {0, 0, 0, 0});
    MeasurementRecord record;

    const auto feedback = [&](const char* pauli_text, int correct_on) {
        auto res = measure_stabilizer(state, PauliString::parse(pauli_text, 4), mode, spec, rng);
        state = std::move(res.state);
        for (auto& e : res.record.entries) record.entries.push_back(e);
        record.max_norm_drift = std::max(record.max_norm_drift, res.record.max_norm_drift);
        record.max_trace_drift = std::max(record.max_trace_drift, res.record.max_trace_drift);
        record.max_purity_increase =
            std::max(record.max_purity_increase, res.record.max_purity_increase);
        record.max_leakage = std::max(record.max_leakage, res.record.max_leakage);
        record.promoted_to_density |= res.record.promoted_to_density;
        if (res.outcome == -1) {
            InstantGate g;
            g.label = std::string("feedback_Z") + std::to_string(correct_on);
            g.qubit_gates.push_back({correct_on, sigma_z()});
            state = apply_instant_gate(state, g);
            record.notes.push_back(g.label);
        }
    };
    feedback("X1X2", 1);
    feedback("X3X4", 3);
    state = cavity_reset(state);

    if (theta != 0.0) {
        const PauliString xbar = erasure_code().logical("X");
        const PulseSchedule rot = simulated_pauli_rotation(spec, xbar, theta, mode.alpha,
                                                           mode.durations, mode.compensate);
        auto run = run_schedule(state, rot, spec, mode.opts, mode.noise, rng);
        state = std::move(run.state);
        record.max_norm_drift = std::max(record.max_norm_drift, run.record.max_norm_drift);
        record.max_trace_drift = std::max(record.max_trace_drift, run.record.max_trace_drift);
        record.max_purity_increase =
            std::max(record.max_purity_increase, run.record.max_purity_increase);
        record.max_leakage = std::max(record.max_leakage, run.record.max_leakage);
        record.promoted_to_density |= run.record.promoted_to_density;
    }
    return {std::move(state), std::move(record)};
}

// --- tomography ----------------------------------------------------------------

// Expectations of all 256 four-qubit Pauli strings in lexicographic order
// over {I,X,Y,Z}^4 (qubit 1 most significant).
struct PauliBars {
    std::vector<std::string> labels;
    std::vector<double> values;
};

inline PauliBars pauli_bars(const Eigen::MatrixXcd& rho_qubits) {
    if (rho_qubits.rows() != 16 || rho_qubits.cols() != 16)
        throw ConfigError("pauli_bars: expected a 4-qubit density matrix");
    static const char letters[4] = {'I', 'X', 'Y', 'Z'};
    PauliBars out;
    out.labels.reserve(256);
    out.values.reserve(256);
    for (int code = 0; code < 256; ++code) {
        std::string label, text;
        for (int q = 0; q < 4; ++q) {
            const char c = letters[(code >> (2 * (3 - q))) & 3];
            label += c;
            if (c != 'I') text += std::string(1, c) + std::to_string(q + 1);
        }
        const PauliString p = text.empty() ? PauliString::identity(4) : PauliString::parse(text, 4);
        out.labels.push_back(label);
        out.values.push_back((p.dense() * rho_qubits).trace().real());
    }
    return out;
}

// Logical Bloch vector (<Xbar>, <Ybar>, <Zbar>) with Ybar = i Xbar Zbar.
inline std::array<double, 3> logical_bloch(const Eigen::MatrixXcd& rho_qubits,
                                           const StabilizerCode& code) {
    const auto ev = [&](const PauliString& p) {
        return (p.dense() * rho_qubits).trace().real();
    };
    return {ev(code.logical("X")), ev(code.logical("Y")), ev(code.logical("Z"))};
}

// --- single-qubit measurement via parity ratio ----------------------------------

// Two full-parity measurements: all qubits without echo (P_tot), then all
// qubits echoing out only qubit i (P_comp). The qubit's sigma_z value on a
// computational basis state is P_tot / P_comp.
inline StabilizerOutcome single_qubit_parity_via_ratio(const QuantumState& state, int qubit,
                                                       const SystemSpec& spec,
                                                       const MeasureMode& mode, Rng& rng) {
    std::string all_text, comp_text;
    for (int q = 1; q <= spec.n_qubits; ++q) {
        all_text += "Z" + std::to_string(q);
        if (q != qubit) comp_text += "Z" + std::to_string(q);
    }
    auto total = measure_stabilizer(state, PauliString::parse(all_text, spec.n_qubits), mode,
                                    spec, rng);
    auto comp = measure_stabilizer(total.state, PauliString::parse(comp_text, spec.n_qubits),
                                   mode, spec, rng);
    StabilizerOutcome out{total.outcome * comp.outcome, total.probability * comp.probability,
                          std::move(comp.state), std::move(total.record)};
    for (auto& e : comp.record.entries) out.record.entries.push_back(e);
    return out;
}

}  // namespace catqec
