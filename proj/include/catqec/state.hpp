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
#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include "catqec/operators.hpp"

namespace catqec {

// Pure vector or density matrix over the composite space, with layout metadata.
// Values are immutable in spirit: operations return new states or mutate a
// locally owned copy inside an engine.
class QuantumState {
public:
    static QuantumState pure(Eigen::VectorXcd v, HilbertLayout layout) {
        if (v.size() != layout.total_dim())
            throw ConfigError("QuantumState: vector dimension does not match layout");
        const double n = v.norm();
        if (std::abs(n - 1.0) > 1e-9)
            throw NumericalError("QuantumState: pure vector norm deviates by " +
                                 std::to_string(std::abs(n - 1.0)));
        QuantumState s;
        s.layout_ = std::move(layout);
        s.vec_ = std::move(v);
        s.pure_ = true;
        return s;
    }

    static QuantumState density(Eigen::MatrixXcd rho, HilbertLayout layout) {
        if (rho.rows() != layout.total_dim() || rho.cols() != layout.total_dim())
            throw ConfigError("QuantumState: density dimension does not match layout");
        const double herm = max_abs(rho - rho.adjoint());
        if (herm > 1e-9)
            throw NumericalError("QuantumState: density non-Hermitian by " + std::to_string(herm));
        const double tr = rho.trace().real();
        if (std::abs(tr - 1.0) > 1e-7)
            throw NumericalError("QuantumState: density trace deviates by " +
                                 std::to_string(std::abs(tr - 1.0)));
        QuantumState s;
        s.layout_ = std::move(layout);
        s.rho_ = std::move(rho);
        s.pure_ = false;
        return s;
    }

    // Product state |q_1 ... q_N> |fock> (|g>_A), qubit bits 0 = g, 1 = e.
    static QuantumState basis_product(const HilbertLayout& layout,
                                      const std::vector<int>& qubit_bits, int fock = 0,
                                      int ancilla_bit = 0) {
        if (static_cast<int>(qubit_bits.size()) != layout.n_qubits())
            throw ConfigError("basis_product: wrong number of qubit bits");
        long idx = 0;
        int q = 0;
        for (int p = 0; p < layout.subsystem_count(); ++p) {
            int digit = 0;
            switch (layout.role(p)) {
                case SubsystemRole::Qubit: digit = qubit_bits[static_cast<std::size_t>(q++)]; break;
                case SubsystemRole::Cavity: digit = fock; break;
                case SubsystemRole::Ancilla: digit = ancilla_bit; break;
            }
            if (digit < 0 || digit >= layout.dim(p))
                throw ConfigError("basis_product: digit out of range");
            idx += digit * layout.stride(p);
        }
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(layout.total_dim());
        v[idx] = 1.0;
        return pure(std::move(v), layout);
    }

    bool is_pure() const { return pure_; }
    const HilbertLayout& layout() const { return layout_; }
    const Eigen::VectorXcd& vector() const {
        if (!pure_) throw ConfigError("QuantumState: not a pure state");
        return vec_;
    }
    const Eigen::MatrixXcd& rho() const {
        if (pure_) throw ConfigError("QuantumState: not a density matrix");
        return rho_;
    }

    Eigen::MatrixXcd as_density() const {
        return pure_ ? Eigen::MatrixXcd(vec_ * vec_.adjoint()) : rho_;
    }

    QuantumState to_density() const {
        return pure_ ? density(vec_ * vec_.adjoint(), layout_) : *this;
    }

    double trace() const { return pure_ ? vec_.squaredNorm() : rho_.trace().real(); }

    double purity() const { return pure_ ? 1.0 : rho_.squaredNorm(); }

private:
    QuantumState() = default;
    HilbertLayout layout_;
    bool pure_ = true;
    Eigen::VectorXcd vec_;
    Eigen::MatrixXcd rho_;
};

// Reduced layout over the kept subsystems (ascending positions).
inline HilbertLayout sub_layout(const HilbertLayout& layout, const std::vector<int>& keep) {
    std::vector<int> dims;
    std::vector<SubsystemRole> roles;
    for (int p : keep) {
        dims.push_back(layout.dim(p));
        roles.push_back(layout.role(p));
    }
    return HilbertLayout(std::move(dims), std::move(roles));
}

// Partial trace onto the kept subsystem positions (sorted ascending).
inline QuantumState partial_trace(const QuantumState& state, std::vector<int> keep) {
    if (keep.empty()) throw ConfigError("partial_trace: empty keep set");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    const HilbertLayout& L = state.layout();
    for (int p : keep)
        if (p < 0 || p >= L.subsystem_count()) throw ConfigError("partial_trace: bad position");

    HilbertLayout out_layout = sub_layout(L, keep);
    const long n = L.total_dim();
    const long m = out_layout.total_dim();

    // Map each full index to (kept compound index, traced compound index).
    std::vector<char> kept_mask(static_cast<std::size_t>(L.subsystem_count()), 0);
    for (int p : keep) kept_mask[static_cast<std::size_t>(p)] = 1;
    std::vector<long> kept_of(static_cast<std::size_t>(n)), traced_of(static_cast<std::size_t>(n));
    for (long idx = 0; idx < n; ++idx) {
        long k = 0, t = 0;
        for (int p = 0; p < L.subsystem_count(); ++p) {
            const int dg = L.digit(idx, p);
            if (kept_mask[static_cast<std::size_t>(p)])
                k = k * L.dim(p) + dg;
            else
                t = t * L.dim(p) + dg;
        }
        kept_of[static_cast<std::size_t>(idx)] = k;
        traced_of[static_cast<std::size_t>(idx)] = t;
    }

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
    if (state.is_pure()) {
        // Group amplitudes by traced index and accumulate outer products.
        const long tdim = n / m;
        std::vector<std::vector<std::pair<long, cdouble>>> groups(
            static_cast<std::size_t>(tdim));
        const auto& v = state.vector();
        for (long idx = 0; idx < n; ++idx)
            groups[static_cast<std::size_t>(traced_of[static_cast<std::size_t>(idx)])].push_back(
                {kept_of[static_cast<std::size_t>(idx)], v[idx]});
        for (const auto& g : groups)
            for (const auto& [ki, vi] : g)
                for (const auto& [kj, vj] : g) out(ki, kj) += vi * std::conj(vj);
    } else {
        const auto& rho = state.rho();
        for (long j = 0; j < n; ++j) {
            const long tj = traced_of[static_cast<std::size_t>(j)];
            const long kj = kept_of[static_cast<std::size_t>(j)];
            for (long i = 0; i < n; ++i) {
                if (traced_of[static_cast<std::size_t>(i)] != tj) continue;
                out(kept_of[static_cast<std::size_t>(i)], kj) += rho(i, j);
            }
        }
    }
    out = ((out + out.adjoint()) / 2.0).eval();
    return QuantumState::density(std::move(out), std::move(out_layout));
}

// <target| rho |target>; for pure rho this is |<target|psi>|^2.
inline double state_fidelity(const QuantumState& state, const QuantumState& target) {
    if (!target.is_pure()) throw ConfigError("state_fidelity: target must be pure");
    if (state.layout() != target.layout()) throw ConfigError("state_fidelity: layout mismatch");
    const auto& t = target.vector();
    if (state.is_pure()) return std::norm(t.dot(state.vector()));
    return (t.adjoint() * state.rho() * t)(0, 0).real();
}

// Magnitude of the overlap |<target|psi>| (pure) or sqrt(<t|rho|t>).
inline double overlap_magnitude(const QuantumState& state, const QuantumState& target) {
    return std::sqrt(std::max(0.0, state_fidelity(state, target)));
}

inline double expectation(const QuantumState& state, const Eigen::MatrixXcd& op) {
    if (state.is_pure()) {
        const auto& v = state.vector();
        return (v.adjoint() * op * v)(0, 0).real();
    }
    return (op * state.rho()).trace().real();
}

// Husimi Q on a grid of phase-space points; values in [0, 1/pi]. Points whose
// support exceeds the truncation-safe region are flagged.
struct HusimiResult {
    std::vector<cdouble> points;
    std::vector<double> values;
    std::vector<bool> truncation_flag;
};

inline HusimiResult husimi_q(const Eigen::MatrixXcd& rho_cavity,
                             const std::vector<cdouble>& grid) {
    const int dim = static_cast<int>(rho_cavity.rows());
    if (rho_cavity.cols() != dim || dim < 2) throw ConfigError("husimi_q: bad density matrix");
    HusimiResult out;
    out.points = grid;
    out.values.reserve(grid.size());
    out.truncation_flag.reserve(grid.size());
    constexpr double inv_pi = 0.3183098861837907;
    for (cdouble beta : grid) {
        const double nb = std::norm(beta);
        const bool flagged = nb + 5.0 * std::sqrt(nb) + 5.0 > static_cast<double>(dim);
        Eigen::VectorXcd cs = coherent_state(beta, dim, /*allow_leakage=*/true);
        const double q = std::max(0.0, (cs.adjoint() * rho_cavity * cs)(0, 0).real()) * inv_pi;
        out.values.push_back(q);
        out.truncation_flag.push_back(flagged);
    }
    return out;
}

}  // namespace catqec
