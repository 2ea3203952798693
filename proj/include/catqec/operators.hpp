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
#include <complex>
#include <vector>

#include "catqec/fock.hpp"
#include "catqec/layout.hpp"

namespace catqec {

// Dense operator on a composite Hilbert space.
struct Operator {
    Eigen::MatrixXcd mat;
    HilbertLayout layout;

    Operator() = default;
    Operator(Eigen::MatrixXcd m, HilbertLayout l) : mat(std::move(m)), layout(std::move(l)) {
        if (mat.rows() != mat.cols() || mat.rows() != layout.total_dim())
            throw ConfigError("Operator: matrix dimension does not match layout");
    }
};

// Single-qubit matrices in the fixed basis {|g>, |e>} (index 0 = g).
// sigma_z = |e><e| - |g><g|; Y is defined as iXZ.
inline Eigen::Matrix2cd sigma_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}
inline Eigen::Matrix2cd sigma_y() {
    Eigen::Matrix2cd m;
    m << 0, cdouble(0, 1), cdouble(0, -1), 0;
    return m;
}
inline Eigen::Matrix2cd sigma_z() {
    Eigen::Matrix2cd m;
    m << -1, 0, 0, 1;
    return m;
}
inline Eigen::Matrix2cd sigma_plus() {   // |e><g|
    Eigen::Matrix2cd m;
    m << 0, 0, 1, 0;
    return m;
}
inline Eigen::Matrix2cd sigma_minus() {  // |g><e|
    Eigen::Matrix2cd m;
    m << 0, 1, 0, 0;
    return m;
}
inline Eigen::Matrix2cd qubit_identity() { return Eigen::Matrix2cd::Identity(); }

// exp(-i angle/2 * sigma_axis), axis in {'x','y','z'}.
inline Eigen::Matrix2cd qubit_rotation(char axis, double angle) {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    Eigen::Matrix2cd m;
    switch (axis) {
        case 'x': m = c * qubit_identity() - cdouble(0, s) * sigma_x(); break;
        case 'y': m = c * qubit_identity() - cdouble(0, s) * sigma_y(); break;
        case 'z': m = c * qubit_identity() - cdouble(0, s) * sigma_z(); break;
        default: throw ConfigError("qubit_rotation: unknown axis");
    }
    return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Identity on all other subsystems, Kronecker-ordered per the layout.
inline Operator embed_operator(const Eigen::MatrixXcd& local, int position,
                               const HilbertLayout& layout) {
    const int d = layout.dim(position);
    if (local.rows() != d || local.cols() != d)
        throw ConfigError("embed_operator: local dimension mismatch");
    const long n = layout.total_dim();
    const long inner = layout.stride(position);
    const long outer = n / (inner * d);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (long o = 0; o < outer; ++o)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const cdouble v = local(i, j);
                if (v == cdouble(0, 0)) continue;
                const long row0 = (o * d + i) * inner;
                const long col0 = (o * d + j) * inner;
                for (long r = 0; r < inner; ++r) out(row0 + r, col0 + r) = v;
            }
    return Operator(std::move(out), layout);
}

// In-place |psi> -> (M on subsystem `position`) |psi>.
inline void apply_local(Eigen::VectorXcd& psi, const Eigen::MatrixXcd& m, int position,
                        const HilbertLayout& layout) {
    const int d = layout.dim(position);
    if (m.rows() != d || m.cols() != d) throw ConfigError("apply_local: dimension mismatch");
    const long inner = layout.stride(position);
    const long n = layout.total_dim();
    const long outer = n / (inner * d);
    // Block for fixed outer index o is an (inner x d) column-major view:
    // element (r, i) lives at (o*d + i)*inner + r.
    for (long o = 0; o < outer; ++o) {
        Eigen::Map<Eigen::MatrixXcd> block(psi.data() + o * d * inner, inner, d);
        block = (block * m.transpose()).eval();
    }
}

// rho -> (M on subsystem) rho  (left action on the row index).
inline void apply_local_left(Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& m, int position,
                             const HilbertLayout& layout) {
    const int d = layout.dim(position);
    const long inner = layout.stride(position);
    const long n = layout.total_dim();
    const long outer = n / (inner * d);
    for (long c = 0; c < n; ++c) {
        for (long o = 0; o < outer; ++o) {
            Eigen::Map<Eigen::MatrixXcd> block(rho.data() + c * n + o * d * inner, inner, d);
            block = (block * m.transpose()).eval();
        }
    }
}

// rho -> rho (M† on subsystem)  (right action on the column index).
inline void apply_local_right_adjoint(Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& m,
                                      int position, const HilbertLayout& layout) {
    const int d = layout.dim(position);
    const long inner = layout.stride(position);
    const long n = layout.total_dim();
    const long outer = n / (inner * d);
    for (long o = 0; o < outer; ++o) {
        for (long r = 0; r < inner; ++r) {
            const long col0 = o * d * inner + r;
            Eigen::Map<Eigen::MatrixXcd, 0, Eigen::OuterStride<>> cols(
                rho.data() + col0 * n, n, d, Eigen::OuterStride<>(inner * n));
            cols = (cols * m.adjoint()).eval();
        }
    }
}

// Unitary conjugation rho -> U rho U† with U local to one subsystem.
inline void apply_local_conj(Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& u, int position,
                             const HilbertLayout& layout) {
    apply_local_left(rho, u, position, layout);
    apply_local_right_adjoint(rho, u, position, layout);
}

// Applies M acting jointly on the full qubit register (positions 0..N-1).
// Qubits are the slowest indices, so the state reshapes as (rest x 2^N).
inline void apply_qubit_block(Eigen::VectorXcd& psi, const Eigen::MatrixXcd& m,
                              const HilbertLayout& layout) {
    const int nq = layout.n_qubits();
    const long d = 1L << nq;
    if (m.rows() != d || m.cols() != d) throw ConfigError("apply_qubit_block: dimension mismatch");
    const long inner = layout.total_dim() / d;
    Eigen::Map<Eigen::MatrixXcd> block(psi.data(), inner, d);
    block = (block * m.transpose()).eval();
}

// rho -> M rho M† with M on the full qubit register.
inline void apply_qubit_block_conj(Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& m,
                                   const HilbertLayout& layout) {
    const int nq = layout.n_qubits();
    const long d = 1L << nq;
    const long n = layout.total_dim();
    const long inner = n / d;
    for (long c = 0; c < n; ++c) {
        Eigen::Map<Eigen::MatrixXcd> block(rho.data() + c * n, inner, d);
        block = (block * m.transpose()).eval();
    }
    for (long r = 0; r < inner; ++r) {
        Eigen::Map<Eigen::MatrixXcd, 0, Eigen::OuterStride<>> cols(
            rho.data() + r * n, n, d, Eigen::OuterStride<>(inner * n));
        cols = (cols * m.adjoint()).eval();
    }
}

// e^{-i H t} for Hermitian H via eigendecomposition.
inline Eigen::MatrixXcd hermitian_propagator(const Eigen::MatrixXcd& h, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k)
        phases[k] = std::exp(cdouble(0, -es.eigenvalues()[k] * t));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Eigen::MatrixXcd& m, double tol = 1e-9) {
    return max_abs(m - m.adjoint()) <= tol;
}

}  // namespace catqec
