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

#include "catqec/pauli.hpp"
#include "catqec/rng.hpp"
#include "catqec/schedule.hpp"
#include "catqec/state.hpp"

namespace catqec {

// Population of the top two Fock levels; the truncation-leakage figure.
inline double truncation_leakage(const QuantumState& state) {
    const HilbertLayout& L = state.layout();
    if (!L.has_cavity()) return 0.0;
    const int cav = L.cavity_position();
    const int d = L.dim(cav);
    double pop = 0.0;
    const long n = L.total_dim();
    if (state.is_pure()) {
        const auto& v = state.vector();
        for (long j = 0; j < n; ++j)
            if (L.digit(j, cav) >= d - 2) pop += std::norm(v[j]);
    } else {
        const auto& rho = state.rho();
        for (long j = 0; j < n; ++j)
            if (L.digit(j, cav) >= d - 2) pop += rho(j, j).real();
    }
    return pop;
}

namespace detail {

// Zeroes every amplitude whose digit at `pos` differs from `digit`.
inline void project_digit(Eigen::VectorXcd& v, const HilbertLayout& L, int pos, int digit) {
    for (long j = 0; j < v.size(); ++j)
        if (L.digit(j, pos) != digit) v[j] = cdouble(0, 0);
}

inline void zero_rows_not_digit(Eigen::MatrixXcd& m, const HilbertLayout& L, int pos, int digit) {
    const long n = m.rows();
    for (long k = 0; k < n; ++k) {
        cdouble* col = m.data() + k * n;
        for (long j = 0; j < n; ++j)
            if (L.digit(j, pos) != digit) col[j] = cdouble(0, 0);
    }
}

inline void zero_cols_not_digit(Eigen::MatrixXcd& m, const HilbertLayout& L, int pos, int digit) {
    const long n = m.rows();
    for (long k = 0; k < n; ++k) {
        if (L.digit(k, pos) == digit) continue;
        m.col(k).setZero();
    }
}

struct ResolvedConditional {
    int cond_pos;
    int action_pos;
    Eigen::MatrixXcd action;  // local unitary on action_pos
};

inline ResolvedConditional resolve_conditional(const ConditionalGate& g,
                                               const HilbertLayout& L) {
    ResolvedConditional r;
    r.cond_pos = g.condition == GateCondition::CavityVacuum ? L.cavity_position()
                                                            : L.ancilla_position();
    if (std::holds_alternative<FlipAncilla>(g.action)) {
        r.action_pos = L.ancilla_position();
        r.action = sigma_x();
    } else if (const auto* d = std::get_if<DisplaceCavity>(&g.action)) {
        r.action_pos = L.cavity_position();
        r.action = displacement_matrix(d->beta, L.dim(L.cavity_position()));
    } else if (const auto* rot = std::get_if<RotateQubit>(&g.action)) {
        r.action_pos = L.qubit_position(rot->qubit);
        r.action = qubit_rotation(rot->axis, rot->angle);
    } else if (const auto* p = std::get_if<BranchPhase>(&g.action)) {
        r.action_pos = r.cond_pos;
        Eigen::MatrixXcd m =
            Eigen::MatrixXcd::Identity(L.dim(r.cond_pos), L.dim(r.cond_pos));
        m(0, 0) = std::polar(1.0, 2.0 * p->theta);
        r.action = std::move(m);
    } else {
        throw ConfigError("conditional gate: unknown action");
    }
    if (r.action_pos == r.cond_pos && !std::holds_alternative<BranchPhase>(g.action))
        throw ConfigError("conditional gate: action on the condition subsystem");
    return r;
}

}  // namespace detail

// Ideal projector-controlled unitary U = Pi_cond (x) A + (1 - Pi_cond) (x) 1,
// conditioned on the cavity vacuum or the ancilla ground state.
inline QuantumState apply_conditional_ideal(const QuantumState& state,
                                            const ConditionalGate& gate) {
    const HilbertLayout& L = state.layout();
    const auto r = detail::resolve_conditional(gate, L);
    if (r.action_pos == r.cond_pos) {
        // diagonal conditioned phase: plain local unitary
        if (state.is_pure()) {
            Eigen::VectorXcd v = state.vector();
            apply_local(v, r.action, r.action_pos, L);
            return QuantumState::pure(std::move(v), L);
        }
        Eigen::MatrixXcd rho = state.rho();
        apply_local_conj(rho, r.action, r.action_pos, L);
        return QuantumState::density(std::move(rho), L);
    }
    if (state.is_pure()) {
        Eigen::VectorXcd v = state.vector();
        Eigen::VectorXcd w = v;
        detail::project_digit(w, L, r.cond_pos, 0);
        v -= w;
        apply_local(w, r.action, r.action_pos, L);
        v += w;
        return QuantumState::pure(std::move(v), L);
    }
    Eigen::MatrixXcd rho = state.rho();
    {
        Eigen::MatrixXcd w = rho;
        detail::zero_rows_not_digit(w, L, r.cond_pos, 0);
        rho -= w;
        apply_local_left(w, r.action, r.action_pos, L);
        rho += w;
    }
    {
        Eigen::MatrixXcd w = rho;
        detail::zero_cols_not_digit(w, L, r.cond_pos, 0);
        rho -= w;
        apply_local_right_adjoint(w, r.action, r.action_pos, L);
        rho += w;
    }
    rho = ((rho + rho.adjoint()) * 0.5).eval();
    return QuantumState::density(std::move(rho), L);
}

// Traces out the subsystem at `pos` and re-tensors it in its ground/vacuum
// state. Pure states with an unentangled subsystem stay pure.
inline QuantumState reset_subsystem(const QuantumState& state, int pos) {
    const HilbertLayout& L = state.layout();
    const int d = L.dim(pos);
    const long s = L.stride(pos);
    const long n = L.total_dim();
    if (state.is_pure()) {
        // Reduced density matrix of the subsystem; rank one means product.
        const auto& v = state.vector();
        Eigen::MatrixXcd sub = Eigen::MatrixXcd::Zero(d, d);
        for (long j = 0; j < n; ++j) {
            const int dj = L.digit(j, pos);
            const long base = j - dj * s;
            for (int i = 0; i <= dj; ++i) sub(dj, i) += v[j] * std::conj(v[base + i * s]);
        }
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) sub(a, b) = std::conj(sub(b, a));
        const double purity = sub.squaredNorm();
        if (purity > 1.0 - 1e-12) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
            Eigen::VectorXcd phi = es.eigenvectors().col(d - 1);  // leading eigenvector
            Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
            for (long j = 0; j < n; ++j) {
                const int dj = L.digit(j, pos);
                if (dj != 0) continue;
                cdouble acc(0, 0);
                for (int i = 0; i < d; ++i) acc += v[j + i * s] * std::conj(phi[i]);
                out[j] = acc;
            }
            out.normalize();
            return QuantumState::pure(std::move(out), L);
        }
        // entangled: fall through to the density path
    }
    const Eigen::MatrixXcd rho = state.as_density();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (long k = 0; k < n; ++k) {
        if (L.digit(k, pos) != 0) continue;
        for (long j = 0; j < n; ++j) {
            if (L.digit(j, pos) != 0) continue;
            cdouble acc(0, 0);
            for (int i = 0; i < d; ++i) acc += rho(j + i * s, k + i * s);
            out(j, k) = acc;
        }
    }
    return QuantumState::density(std::move(out), L);
}

// Projective measurement of a subsystem digit (0 vs rest), e.g. the ancilla
// in {g, e}. Returns the sampled digit and the collapsed state.
struct MeasurementOutcome {
    int outcome;
    double probability;
    QuantumState state;
};

inline MeasurementOutcome measure_subsystem_digit(const QuantumState& state, int pos, Rng& rng) {
    const HilbertLayout& L = state.layout();
    const int d = L.dim(pos);
    std::vector<double> probs(static_cast<std::size_t>(d), 0.0);
    const long n = L.total_dim();
    if (state.is_pure()) {
        const auto& v = state.vector();
        for (long j = 0; j < n; ++j) probs[static_cast<std::size_t>(L.digit(j, pos))] += std::norm(v[j]);
    } else {
        const auto& rho = state.rho();
        for (long j = 0; j < n; ++j)
            probs[static_cast<std::size_t>(L.digit(j, pos))] += rho(j, j).real();
    }
    double u = rng.uniform();
    int outcome = d - 1;
    for (int i = 0; i < d; ++i) {
        if (u < probs[static_cast<std::size_t>(i)]) {
            outcome = i;
            break;
        }
        u -= probs[static_cast<std::size_t>(i)];
    }
    const double p = probs[static_cast<std::size_t>(outcome)];
    if (p < 1e-12) throw NumericalError("measure_subsystem_digit: sampled zero-probability branch");
    if (state.is_pure()) {
        Eigen::VectorXcd v = state.vector();
        detail::project_digit(v, L, pos, outcome);
        v /= std::sqrt(p);
        return {outcome, p, QuantumState::pure(std::move(v), L)};
    }
    Eigen::MatrixXcd rho = state.rho();
    detail::zero_rows_not_digit(rho, L, pos, outcome);
    detail::zero_cols_not_digit(rho, L, pos, outcome);
    rho /= p;
    return {outcome, p, QuantumState::density(std::move(rho), L)};
}

// Ideal projective measurement of a Pauli string on the qubit register.
// Outcome is +-1; the state collapses onto (1 +- P)/2 and renormalizes.
inline MeasurementOutcome measure_pauli_ideal(const QuantumState& state, const PauliString& p,
                                              Rng& rng) {
    if (!p.squares_to_identity())
        throw ConfigError("measure_pauli_ideal: operator does not square to identity");
    const HilbertLayout& L = state.layout();
    const Eigen::MatrixXcd pd = p.dense();
    if (state.is_pure()) {
        Eigen::VectorXcd pv = state.vector();
        apply_qubit_block(pv, pd, L);
        Eigen::VectorXcd plus = 0.5 * (state.vector() + pv);
        Eigen::VectorXcd minus = 0.5 * (state.vector() - pv);
        const double pp = plus.squaredNorm();
        const double pm = minus.squaredNorm();
        const bool take_plus = rng.uniform() < pp;
        const double prob = take_plus ? pp : pm;
        if (prob < 1e-12)
            throw NumericalError("measure_pauli_ideal: sampled zero-probability branch");
        Eigen::VectorXcd& sel = take_plus ? plus : minus;
        sel /= std::sqrt(prob);
        return {take_plus ? +1 : -1, prob, QuantumState::pure(std::move(sel), L)};
    }
    const long n = L.total_dim();
    Eigen::MatrixXcd prho = state.rho();
    // P rho P computed via the qubit-block conjugation
    apply_qubit_block_conj(prho, pd, L);
    Eigen::MatrixXcd rp = state.rho();
    Eigen::MatrixXcd pr = rp;  // P rho (left only)
    {
        const long d = 1L << L.n_qubits();
        const long inner = n / d;
        for (long c = 0; c < n; ++c) {
            Eigen::Map<Eigen::MatrixXcd> block(pr.data() + c * n, inner, d);
            block = (block * pd.transpose()).eval();
        }
    }
    // rho P = (P† rho†)† = (P rho)† for Hermitian P and rho
    Eigen::MatrixXcd rhop = pr.adjoint();
    Eigen::MatrixXcd plus = 0.25 * (rp + pr + rhop + prho);
    Eigen::MatrixXcd minus = 0.25 * (rp - pr - rhop + prho);
    const double pp = plus.trace().real();
    const double pm = minus.trace().real();
    const bool take_plus = rng.uniform() < pp;
    const double prob = take_plus ? pp : pm;
    if (prob < 1e-12)
        throw NumericalError("measure_pauli_ideal: sampled zero-probability branch");
    Eigen::MatrixXcd& sel = take_plus ? plus : minus;
    sel /= prob;
    sel = ((sel + sel.adjoint()) * 0.5).eval();
    return {take_plus ? +1 : -1, prob, QuantumState::density(std::move(sel), L)};
}

// Zero-duration exact unitary gates.
inline QuantumState apply_instant_gate(const QuantumState& state, const InstantGate& g) {
    const HilbertLayout& L = state.layout();
    if (state.is_pure()) {
        Eigen::VectorXcd v = state.vector();
        for (const auto& [label, u] : g.qubit_gates) apply_local(v, u, L.qubit_position(label), L);
        if (g.cavity_gate) apply_local(v, *g.cavity_gate, L.cavity_position(), L);
        if (g.ancilla_gate) apply_local(v, *g.ancilla_gate, L.ancilla_position(), L);
        return QuantumState::pure(std::move(v), L);
    }
    Eigen::MatrixXcd rho = state.rho();
    for (const auto& [label, u] : g.qubit_gates)
        apply_local_conj(rho, u, L.qubit_position(label), L);
    if (g.cavity_gate) apply_local_conj(rho, *g.cavity_gate, L.cavity_position(), L);
    if (g.ancilla_gate) apply_local_conj(rho, *g.ancilla_gate, L.ancilla_position(), L);
    return QuantumState::density(std::move(rho), L);
}

}  // namespace catqec
