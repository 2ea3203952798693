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

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "catqec/rng.hpp"
#include "catqec/schedule.hpp"
#include "catqec/state.hpp"
#include "catqec/state_ops.hpp"
#include "catqec/system.hpp"

namespace catqec {

// --- options & records -------------------------------------------------------

struct EvolutionOptions {
    enum class Method { Adaptive45, FixedRK4 };
    Method method = Method::Adaptive45;
    double dt = 1e-3;        // fixed-step size, ns
    double rtol = 1e-8;
    double atol = 1e-10;
    int monitor_every = 25;  // trace/Hermiticity check cadence, in steps
    double norm_tol = 1e-8;  // allowed pure-state norm drift per segment
    double trace_tol = 1e-7; // allowed trace drift per segment
    double leakage_tol = 1e-6;

    void validate() const {
        if (method == Method::FixedRK4 && dt <= 0)
            throw ConfigError("EvolutionOptions: dt must be positive");
        if (method == Method::Adaptive45 && (rtol <= 0 || atol <= 0))
            throw ConfigError("EvolutionOptions: rtol/atol must be positive");
        if (monitor_every < 1) throw ConfigError("EvolutionOptions: bad monitor cadence");
    }
};

struct MeasurementRecord {
    struct Entry {
        std::string label;
        int outcome;        // +1/-1 for Pauli, 0(g)/1(e) for ancilla
        double probability; // Born probability of the sampled outcome
    };
    std::vector<Entry> entries;

    // run diagnostics
    double max_norm_drift = 0.0;
    double max_trace_drift = 0.0;
    double max_purity_increase = 0.0;  // across collapse-bearing segments
    double max_leakage = 0.0;          // top-two Fock population seen
    bool promoted_to_density = false;
    std::vector<std::string> notes;

    int outcome_of(const std::string& label) const {
        for (const auto& e : entries)
            if (e.label == label) return e.outcome;
        throw ConfigError("MeasurementRecord: no entry labeled " + label);
    }
};

// Constant Hamiltonian piece + active drives + optional collapse, over a
// fixed duration. The public segment-evolution API.
struct SegmentGenerator {
    SystemSpec spec;
    std::vector<DriveTerm> drives;
    bool with_collapse = false;
    double duration = 0.0;

    void validate() const {
        spec.validate();
        if (duration < 0) throw ConfigError("SegmentGenerator: negative duration");
        std::set<int> seen;
        for (const auto& d : drives) {
            d.validate(spec.n_qubits);
            if (d.target == DriveTerm::Target::Qubits)
                for (int q : d.qubits)
                    if (!seen.insert(q).second)
                        throw ConfigError("SegmentGenerator: overlapping drives on qubit " +
                                          std::to_string(q));
        }
    }
};

// --- internal engine ---------------------------------------------------------

namespace detail {

// Layout-static index tables shared by all segments of a run.
struct LayoutTables {
    long n = 0;
    int cav_pos = -1, cav_dim = 0;
    long cav_stride = 0;
    std::vector<double> nphoton;              // photon number per index
    std::vector<std::uint32_t> qbits;         // qubit occupation bits per index
    std::vector<double> ne;                   // excited-qubit count per index
    std::vector<long> cav_up, cav_down;       // index with cavity digit +-1 (clamped)
    std::vector<double> sq_up, sq_down;       // sqrt(n+1) / sqrt(n), 0 outside range
    std::vector<std::vector<long>> flip;      // [qubit pos][j]: qubit digit toggled
    std::vector<std::vector<double>> is_g;    // [qubit pos][j]: 1 when digit g
    int ancilla_pos = -1;

    static LayoutTables build(const HilbertLayout& L) {
        LayoutTables T;
        T.n = L.total_dim();
        T.cav_pos = L.cavity_position();
        T.cav_dim = L.dim(T.cav_pos);
        T.cav_stride = L.stride(T.cav_pos);
        if (L.has_ancilla()) T.ancilla_pos = L.ancilla_position();
        const int nq = L.n_qubits();
        T.nphoton.resize(T.n);
        T.qbits.resize(T.n);
        T.ne.resize(T.n);
        T.cav_up.resize(T.n);
        T.cav_down.resize(T.n);
        T.sq_up.resize(T.n);
        T.sq_down.resize(T.n);
        T.flip.assign(nq, std::vector<long>(T.n));
        T.is_g.assign(nq, std::vector<double>(T.n));
        for (long j = 0; j < T.n; ++j) {
            const int nph = L.digit(j, T.cav_pos);
            T.nphoton[j] = nph;
            std::uint32_t bits = 0;
            int excited = 0;
            for (int q = 0; q < nq; ++q) {
                const int b = L.digit(j, q);
                bits |= static_cast<std::uint32_t>(b) << q;
                excited += b;
                T.flip[q][j] = j + (b == 0 ? L.stride(q) : -L.stride(q));
                T.is_g[q][j] = b == 0 ? 1.0 : 0.0;
            }
            T.qbits[j] = bits;
            T.ne[j] = excited;
            const bool top = nph == T.cav_dim - 1;
            const bool bottom = nph == 0;
            T.cav_up[j] = top ? j : j + T.cav_stride;
            T.cav_down[j] = bottom ? j : j - T.cav_stride;
            T.sq_up[j] = top ? 0.0 : std::sqrt(static_cast<double>(nph + 1));
            T.sq_down[j] = bottom ? 0.0 : std::sqrt(static_cast<double>(nph));
        }
        return T;
    }
};

struct CavityDriveData {
    double amplitude, phase, detuning;
};

struct QubitDriveData {
    double half_rabi;
    std::vector<int> positions;  // 0-based qubit positions
};

// Per-segment model: shifted diagonal, resolved drives, collapse rates, and
// the frequency arrays of the interaction picture.
struct SegmentModel {
    Eigen::VectorXd h;
    std::vector<CavityDriveData> cav_drives;
    std::vector<QubitDriveData> qubit_drives;
    double kappa = 0, gphi = 0, gminus = 0;
    std::vector<double> damp;                  // (kappa/2) n + (gminus/2) ne
    std::vector<double> ucav;                  // h_j - h_{cav_up[j]}
    std::vector<std::vector<double>> wflip;    // per qubit pos: h_j - h_{flip[j]}
    std::vector<int> active_qubit_axes;        // positions needing flip phase vectors

    static SegmentModel build(const SystemSpec& spec, const LayoutTables& T,
                              const Eigen::VectorXd& base_h,
                              const std::vector<DriveTerm>& drives, bool with_collapse) {
        SegmentModel M;
        M.h = base_h;
        const int nq = spec.n_qubits;
        std::vector<char> axis_needed(static_cast<std::size_t>(nq), 0);
        for (const auto& d : drives) {
            if (d.target == DriveTerm::Target::Cavity) {
                M.cav_drives.push_back({d.amplitude, d.phase, d.detuning});
            } else {
                QubitDriveData qd;
                qd.half_rabi = d.amplitude / 2.0;
                for (int label : d.qubits) {
                    const int pos = label - 1;
                    qd.positions.push_back(pos);
                    axis_needed[static_cast<std::size_t>(pos)] = 1;
                    // Dispersive term runs with (n - nbar) for driven qubits:
                    // subtract chi_q * sz * nbar from the diagonal.
                    const double chi = spec.chi[static_cast<std::size_t>(pos)];
                    for (long j = 0; j < T.n; ++j) {
                        const double sz = (T.qbits[j] >> pos) & 1 ? 1.0 : -1.0;
                        M.h[j] -= chi * sz * d.nbar;
                    }
                }
                M.qubit_drives.push_back(std::move(qd));
            }
        }
        if (with_collapse) {
            M.kappa = spec.kappa;
            M.gphi = spec.gamma_phi();
            M.gminus = spec.gamma_minus();
            if (M.gminus > 0)
                for (int q = 0; q < nq; ++q) axis_needed[static_cast<std::size_t>(q)] = 1;
        }
        M.damp.assign(T.n, 0.0);
        if (M.kappa > 0 || M.gminus > 0)
            for (long j = 0; j < T.n; ++j)
                M.damp[j] = 0.5 * M.kappa * T.nphoton[j] + 0.5 * M.gminus * T.ne[j];
        const bool need_cav_axis = M.kappa > 0 || !M.cav_drives.empty();
        if (need_cav_axis) {
            M.ucav.resize(T.n);
            for (long j = 0; j < T.n; ++j) M.ucav[j] = M.h[j] - M.h[T.cav_up[j]];
        }
        M.wflip.assign(static_cast<std::size_t>(nq), {});
        for (int q = 0; q < nq; ++q) {
            if (!axis_needed[static_cast<std::size_t>(q)]) continue;
            M.active_qubit_axes.push_back(q);
            auto& w = M.wflip[static_cast<std::size_t>(q)];
            w.resize(T.n);
            for (long j = 0; j < T.n; ++j) w[j] = M.h[j] - M.h[T.flip[q][j]];
        }
        return M;
    }

    bool has_noise() const { return kappa > 0 || gphi > 0 || gminus > 0; }
};

inline int popcount32(std::uint32_t x) { return __builtin_popcount(x); }

// d|psi~>/dt in the interaction picture of the diagonal: only drive terms.
// psi = exp(-i h t) psi~ elementwise.
inline void pure_rhs(const SegmentModel& M, const LayoutTables& T, double t,
                     const Eigen::VectorXcd& y, Eigen::VectorXcd& dy,
                     std::vector<cdouble>& pc, std::vector<std::vector<cdouble>>& pf) {
    const long n = T.n;
    dy.setZero();
    for (const auto& d : M.cav_drives) {
        const cdouble c = d.amplitude * std::polar(1.0, d.detuning * t + d.phase);
        for (long j = 0; j < n; ++j)
            pc[j] = std::polar(1.0, M.ucav[j] * t);
        const cdouble mic = cdouble(0, -1) * c;
        const cdouble micbar = cdouble(0, -1) * std::conj(c);
        for (long j = 0; j < n; ++j) {
            // -i c a~ psi~ - i cbar a~† psi~
            dy[j] += mic * T.sq_up[j] * pc[j] * y[T.cav_up[j]];
            const long dn = T.cav_down[j];
            dy[j] += micbar * T.sq_down[j] * std::conj(pc[dn]) * y[dn];
        }
    }
    for (const auto& qd : M.qubit_drives) {
        for (int q : qd.positions) {
            auto& p = pf[static_cast<std::size_t>(q)];
            const auto& w = M.wflip[static_cast<std::size_t>(q)];
            for (long j = 0; j < n; ++j) p[j] = std::polar(1.0, w[j] * t);
            const cdouble mio = cdouble(0, -qd.half_rabi);
            const auto& flip = T.flip[static_cast<std::size_t>(q)];
            for (long j = 0; j < n; ++j) dy[j] += mio * p[j] * y[flip[j]];
        }
    }
}

// d rho~ /dt in the interaction picture: elementwise damping, transfer terms,
// and drive commutators, all with explicit phase vectors.
inline void density_rhs(const SegmentModel& M, const LayoutTables& T, double t,
                        const Eigen::MatrixXcd& y, Eigen::MatrixXcd& dy,
                        std::vector<cdouble>& pc, std::vector<std::vector<cdouble>>& pf) {
    const long n = T.n;
    const bool cav_axis = !M.ucav.empty();
    if (cav_axis)
        for (long j = 0; j < n; ++j) pc[j] = std::polar(1.0, M.ucav[j] * t);
    for (int q : M.active_qubit_axes) {
        auto& p = pf[static_cast<std::size_t>(q)];
        const auto& w = M.wflip[static_cast<std::size_t>(q)];
        for (long j = 0; j < n; ++j) p[j] = std::polar(1.0, w[j] * t);
    }
    std::vector<cdouble> drive_c(M.cav_drives.size());
    for (std::size_t i = 0; i < M.cav_drives.size(); ++i)
        drive_c[i] = M.cav_drives[i].amplitude *
                     std::polar(1.0, M.cav_drives[i].detuning * t + M.cav_drives[i].phase);

    const cdouble* Y = y.data();
    cdouble* D = dy.data();
    const double gphi = M.gphi;
    const bool dephase = gphi > 0;
    const bool damping = !M.damp.empty() && (M.kappa > 0 || M.gminus > 0);

    for (long k = 0; k < n; ++k) {
        const cdouble* colk = Y + k * n;
        cdouble* outk = D + k * n;
        const double dk = damping ? M.damp[k] : 0.0;
        const std::uint32_t bk = T.qbits[k];
        // elementwise: -(damp_j + damp_k + gphi * popcount) * y
        if (dephase) {
            for (long j = 0; j < n; ++j) {
                const double coeff = dk + (damping ? M.damp[j] : 0.0) +
                                     gphi * popcount32(T.qbits[j] ^ bk);
                outk[j] = -coeff * colk[j];
            }
        } else if (damping) {
            for (long j = 0; j < n; ++j) outk[j] = -(dk + M.damp[j]) * colk[j];
        } else {
            for (long j = 0; j < n; ++j) outk[j] = cdouble(0, 0);
        }
        // cavity decay transfer: kappa p_j conj(p_k) y(up j, up k)
        if (M.kappa > 0 && T.sq_up[k] != 0.0) {
            const cdouble ck = M.kappa * T.sq_up[k] * std::conj(pc[k]);
            const cdouble* cols = Y + T.cav_up[k] * n;
            for (long j = 0; j < n; ++j) {
                if (T.sq_up[j] == 0.0) continue;
                outk[j] += ck * T.sq_up[j] * pc[j] * cols[T.cav_up[j]];
            }
        }
        // qubit decay transfers
        if (M.gminus > 0) {
            for (int q = 0; q < static_cast<int>(T.flip.size()); ++q) {
                const auto& isg = T.is_g[static_cast<std::size_t>(q)];
                if (isg[k] == 0.0) continue;
                const auto& flip = T.flip[static_cast<std::size_t>(q)];
                const auto& p = pf[static_cast<std::size_t>(q)];
                const cdouble ck = M.gminus * std::conj(p[k]);
                const cdouble* cols = Y + flip[k] * n;
                for (long j = 0; j < n; ++j) {
                    if (isg[j] == 0.0) continue;
                    outk[j] += ck * p[j] * cols[flip[j]];
                }
            }
        }
        // cavity drive commutators
        for (std::size_t i = 0; i < M.cav_drives.size(); ++i) {
            const cdouble c = drive_c[i];
            const cdouble cbar = std::conj(c);
            const cdouble mic = cdouble(0, -1) * c;
            const cdouble micbar = cdouble(0, -1) * cbar;
            // row terms within column k
            for (long j = 0; j < n; ++j) {
                outk[j] += mic * T.sq_up[j] * pc[j] * colk[T.cav_up[j]];
                const long dn = T.cav_down[j];
                outk[j] += micbar * T.sq_down[j] * std::conj(pc[dn]) * colk[dn];
            }
            // column terms: +i c p[down k] col(down k)  and  +i cbar conj(p_k) col(up k)
            if (T.sq_down[k] != 0.0) {
                const cdouble a3 = cdouble(0, 1) * c * T.sq_down[k] * pc[T.cav_down[k]];
                const cdouble* cold = Y + T.cav_down[k] * n;
                for (long j = 0; j < n; ++j) outk[j] += a3 * cold[j];
            }
            if (T.sq_up[k] != 0.0) {
                const cdouble a4 = cdouble(0, 1) * cbar * T.sq_up[k] * std::conj(pc[k]);
                const cdouble* colu = Y + T.cav_up[k] * n;
                for (long j = 0; j < n; ++j) outk[j] += a4 * colu[j];
            }
        }
        // qubit drive commutators
        for (const auto& qd : M.qubit_drives) {
            for (int q : qd.positions) {
                const auto& flip = T.flip[static_cast<std::size_t>(q)];
                const auto& p = pf[static_cast<std::size_t>(q)];
                const cdouble mio = cdouble(0, -qd.half_rabi);
                for (long j = 0; j < n; ++j) outk[j] += mio * p[j] * colk[flip[j]];
                const cdouble pio = cdouble(0, qd.half_rabi) * std::conj(p[k]);
                const cdouble* colf = Y + flip[k] * n;
                for (long j = 0; j < n; ++j) outk[j] += pio * colf[j];
            }
        }
    }
}

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

// Generic adaptive/fixed RK driver over an Eigen-like flat array. F evaluates
// the RHS, Monitor is called after each accepted step.
template <typename State, typename Rhs, typename Monitor>
inline void integrate(State& y, double t0, double duration, const EvolutionOptions& opts,
                      Rhs&& rhs, Monitor&& monitor) {
    if (duration <= 0) return;
    const long n = y.size();
    State k1(y), k2(y), k3(y), k4(y), k5(y), k6(y), k7(y), ytmp(y), ynew(y);
    double t = t0;
    const double tend = t0 + duration;
    bool k1_fresh = false;

    if (opts.method == EvolutionOptions::Method::FixedRK4) {
        const long steps = std::max(1L, static_cast<long>(std::ceil(duration / opts.dt)));
        const double h = duration / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
            rhs(t, y, k1);
            ytmp = y + (h / 2) * k1;
            rhs(t + h / 2, ytmp, k2);
            ytmp = y + (h / 2) * k2;
            rhs(t + h / 2, ytmp, k3);
            ytmp = y + h * k3;
            rhs(t + h, ytmp, k4);
            y += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            monitor(t, y);
        }
        return;
    }

    using D = Dopri5;
    double h = std::min(duration, std::max(1e-6, duration / 50.0));
    int rejected_in_row = 0;
    while (t < tend - 1e-14) {
        h = std::min(h, tend - t);
        if (!k1_fresh) rhs(t, y, k1);
        ytmp = y + h * D::a21 * k1;
        rhs(t + D::c2 * h, ytmp, k2);
        ytmp = y + h * (D::a31 * k1 + D::a32 * k2);
        rhs(t + D::c3 * h, ytmp, k3);
        ytmp = y + h * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3);
        rhs(t + D::c4 * h, ytmp, k4);
        ytmp = y + h * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4);
        rhs(t + D::c5 * h, ytmp, k5);
        ytmp = y + h * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 + D::a64 * k4 + D::a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (D::b1 * k1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6);
        rhs(t + h, ynew, k7);
        // scaled error norm
        double err2 = 0.0;
        const auto* yk = y.data();
        const auto* ynk = ynew.data();
        const auto* e1p = k1.data();
        const auto* e3p = k3.data();
        const auto* e4p = k4.data();
        const auto* e5p = k5.data();
        const auto* e6p = k6.data();
        const auto* e7p = k7.data();
        for (long i = 0; i < n; ++i) {
            const cdouble e = h * (D::e1 * e1p[i] + D::e3 * e3p[i] + D::e4 * e4p[i] +
                                   D::e5 * e5p[i] + D::e6 * e6p[i] + D::e7 * e7p[i]);
            const double sc = opts.atol + opts.rtol * std::max(std::abs(yk[i]), std::abs(ynk[i]));
            const double r = std::abs(e) / sc;
            err2 += r * r;
        }
        const double err = std::sqrt(err2 / static_cast<double>(n));
        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            k1_fresh = true;
            monitor(t, y);
            rejected_in_row = 0;
        } else {
            k1_fresh = false;
            if (++rejected_in_row > 30)
                throw NumericalError("integrate: step size collapsed (err=" +
                                     std::to_string(err) + ", h=" + std::to_string(h) + " ns)");
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h = std::max(h * factor, 1e-9);
    }
}

// Elementwise phase mask: x -> exp(-i h t) x (vectors), rho -> E rho E†.
inline void apply_phase_mask(Eigen::VectorXcd& v, const Eigen::VectorXd& h, double t) {
    for (long j = 0; j < v.size(); ++j) v[j] *= std::polar(1.0, -h[j] * t);
}

inline void apply_phase_mask(Eigen::MatrixXcd& rho, const Eigen::VectorXd& h, double t) {
    const long n = rho.rows();
    Eigen::VectorXcd ph(n);
    for (long j = 0; j < n; ++j) ph[j] = std::polar(1.0, -h[j] * t);
    for (long k = 0; k < n; ++k) {
        const cdouble ck = std::conj(ph[k]);
        cdouble* col = rho.data() + k * n;
        for (long j = 0; j < n; ++j) col[j] *= ph[j] * ck;
    }
}

}  // namespace detail

// --- segment evolution ---------------------------------------------------------

namespace detail {

// Evolves a raw pure vector in place over one segment. Free diagonal segments
// propagate exactly; drive segments integrate in the interaction picture.
inline void evolve_pure_raw(Eigen::VectorXcd& psi, const SegmentModel& M, const LayoutTables& T,
                            double duration, const EvolutionOptions& opts,
                            MeasurementRecord* rec) {
    if (duration <= 0) return;
    if (M.cav_drives.empty() && M.qubit_drives.empty()) {
        Eigen::VectorXcd v = psi;
        apply_phase_mask(v, M.h, duration);
        psi = std::move(v);
        return;
    }
    std::vector<cdouble> pc(static_cast<std::size_t>(T.n));
    std::vector<std::vector<cdouble>> pf(T.flip.size());
    for (auto& p : pf) p.resize(static_cast<std::size_t>(T.n));
    const double norm0 = psi.norm();
    integrate(psi, 0.0, duration, opts,
              [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
                  pure_rhs(M, T, t, y, dy, pc, pf);
              },
              [](double, const Eigen::VectorXcd&) {});
    apply_phase_mask(psi, M.h, duration);
    const double drift = std::abs(psi.norm() - norm0);
    if (rec) rec->max_norm_drift = std::max(rec->max_norm_drift, drift);
    if (drift > opts.norm_tol)
        throw NumericalError("evolve_pure: norm drift " + std::to_string(drift) +
                             " exceeds tolerance; reduce dt or tighten rtol/atol");
    psi *= norm0 / psi.norm();
}

// Evolves a density matrix in place over one segment (interaction-picture
// Lindblad integration with exact diagonal propagation).
inline void evolve_density_raw(Eigen::MatrixXcd& rho, const SegmentModel& M,
                               const LayoutTables& T, double duration,
                               const EvolutionOptions& opts, MeasurementRecord* rec) {
    if (duration <= 0) return;
    const bool trivial = M.cav_drives.empty() && M.qubit_drives.empty() && !M.has_noise();
    if (trivial) {
        apply_phase_mask(rho, M.h, duration);
        return;
    }
    std::vector<cdouble> pc(static_cast<std::size_t>(T.n));
    std::vector<std::vector<cdouble>> pf(T.flip.size());
    for (int q : M.active_qubit_axes) pf[static_cast<std::size_t>(q)].resize(T.n);
    for (const auto& qd : M.qubit_drives)
        for (int q : qd.positions) pf[static_cast<std::size_t>(q)].resize(T.n);

    const double trace0 = rho.trace().real();
    const bool collapse = M.has_noise();
    double last_purity = rho.squaredNorm();
    long step_count = 0;

    integrate(rho, 0.0, duration, opts,
              [&](double t, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& dy) {
                  density_rhs(M, T, t, y, dy, pc, pf);
              },
              [&](double, Eigen::MatrixXcd& y) {
                  if (++step_count % opts.monitor_every != 0) return;
                  y = ((y + y.adjoint()) * 0.5).eval();
                  if (collapse && rec) {
                      const double p = y.squaredNorm();
                      rec->max_purity_increase =
                          std::max(rec->max_purity_increase, p - last_purity);
                      last_purity = p;
                  }
              });
    apply_phase_mask(rho, M.h, duration);
    rho = ((rho + rho.adjoint()) * 0.5).eval();
    const double drift = std::abs(rho.trace().real() - trace0);
    if (rec) {
        rec->max_trace_drift = std::max(rec->max_trace_drift, drift);
        if (collapse) {
            const double p = rho.squaredNorm();
            rec->max_purity_increase = std::max(rec->max_purity_increase, p - last_purity);
        }
    }
    if (drift > opts.trace_tol)
        throw NumericalError("evolve_density: trace drift " + std::to_string(drift) +
                             " exceeds tolerance");
    rho *= trace0 / rho.trace().real();
    // quick positivity guard: diagonal entries may not dip below -1e-6
    double min_diag = 0.0;
    for (long j = 0; j < rho.rows(); ++j) min_diag = std::min(min_diag, rho(j, j).real());
    if (min_diag < -1e-6)
        throw NumericalError("evolve_density: negative population " + std::to_string(min_diag) +
                             " indicates integrator failure");
}

}  // namespace detail

inline QuantumState evolve_unitary_segment(const QuantumState& state, const SegmentGenerator& gen,
                                           const EvolutionOptions& opts = {}) {
    gen.validate();
    opts.validate();
    if (gen.with_collapse)
        throw ConfigError("evolve_unitary_segment: segment carries collapse operators");
    if (!state.is_pure()) throw ConfigError("evolve_unitary_segment: state must be pure");
    const auto T = detail::LayoutTables::build(state.layout());
    const auto M = detail::SegmentModel::build(gen.spec, T, hamiltonian_diagonal(gen.spec),
                                               gen.drives, false);
    Eigen::VectorXcd psi = state.vector();
    detail::evolve_pure_raw(psi, M, T, gen.duration, opts, nullptr);
    return QuantumState::pure(std::move(psi), state.layout());
}

inline QuantumState evolve_lindblad_segment(const QuantumState& state, const SegmentGenerator& gen,
                                            const EvolutionOptions& opts = {}) {
    gen.validate();
    opts.validate();
    const auto T = detail::LayoutTables::build(state.layout());
    const auto M = detail::SegmentModel::build(gen.spec, T, hamiltonian_diagonal(gen.spec),
                                               gen.drives, gen.with_collapse);
    Eigen::MatrixXcd rho = state.as_density();
    detail::evolve_density_raw(rho, M, T, gen.duration, opts, nullptr);
    return QuantumState::density(std::move(rho), state.layout());
}

// --- schedule execution --------------------------------------------------------

struct RunResult {
    QuantumState state;
    MeasurementRecord record;
};

// Applies the schedule segment by segment. Pure states stay on the cheap
// vector path until a dissipative segment or an entangling reset forces
// promotion to a density matrix; the promotion is logged.
inline RunResult run_schedule(const QuantumState& initial, const PulseSchedule& schedule,
                              const SystemSpec& spec, const EvolutionOptions& opts, bool noise,
                              Rng& rng) {
    spec.validate();
    opts.validate();
    const HilbertLayout L = initial.layout();
    if (L != spec.layout()) throw ConfigError("run_schedule: state layout does not match spec");
    const auto T = detail::LayoutTables::build(L);
    const Eigen::VectorXd base_h = hamiltonian_diagonal(spec);
    const bool any_rate = spec.kappa > 0 || spec.gamma_phi() > 0 || spec.gamma_minus() > 0;
    const bool dissipative = noise && any_rate;

    RunResult out{initial, {}};
    auto& state = out.state;
    auto& rec = out.record;

    auto ensure_density = [&](const char* why) {
        if (!state.is_pure()) return;
        state = state.to_density();
        if (!rec.promoted_to_density) {
            rec.promoted_to_density = true;
            rec.notes.push_back(std::string("promoted to density matrix: ") + why);
        }
    };

    auto evolve = [&](double duration, const std::vector<DriveTerm>& drives) {
        if (duration <= 0) return;
        const auto M = detail::SegmentModel::build(spec, T, base_h, drives, dissipative);
        if (dissipative) ensure_density("dissipative segment");
        if (state.is_pure()) {
            Eigen::VectorXcd psi = state.vector();
            detail::evolve_pure_raw(psi, M, T, duration, opts, &rec);
            state = QuantumState::pure(std::move(psi), L);
        } else {
            Eigen::MatrixXcd rho = state.rho();
            detail::evolve_density_raw(rho, M, T, duration, opts, &rec);
            state = QuantumState::density(std::move(rho), L);
        }
    };

    const auto& segs = schedule.segments();
    for (std::size_t si = 0; si < segs.size(); ++si) {
        const Segment& seg = segs[si];
        if (const auto* f = std::get_if<FreeEvolution>(&seg)) {
            evolve(f->duration, {});
        } else if (const auto* c = std::get_if<CavityDrivePulse>(&seg)) {
            DriveTerm d;
            d.target = DriveTerm::Target::Cavity;
            d.amplitude = c->amplitude;
            d.phase = c->phase;
            d.detuning = c->detuning;
            d.duration = c->duration;
            evolve(c->duration, {d});
        } else if (const auto* q = std::get_if<QubitDrivePulse>(&seg)) {
            DriveTerm d;
            d.target = DriveTerm::Target::Qubits;
            d.qubits = q->targets;
            d.amplitude = q->rabi;
            d.duration = q->duration;
            d.nbar = q->nbar;
            evolve(q->duration, {d});
        } else if (const auto* g = std::get_if<InstantGate>(&seg)) {
            state = apply_instant_gate(state, *g);
        } else if (const auto* cg = std::get_if<ConditionalGateSeg>(&seg)) {
            if (cg->duration > 0) evolve(cg->duration / 2, {});
            state = apply_conditional_ideal(state, cg->gate);
            if (cg->duration > 0) evolve(cg->duration / 2, {});
        } else if (const auto* r = std::get_if<ResetSeg>(&seg)) {
            const int pos = r->target == ResetTarget::Cavity ? L.cavity_position()
                                                             : L.ancilla_position();
            const bool was_pure = state.is_pure();
            state = reset_subsystem(state, pos);
            if (was_pure && !state.is_pure() && !rec.promoted_to_density) {
                rec.promoted_to_density = true;
                rec.notes.push_back("promoted to density matrix: entangling reset");
            }
        } else if (const auto* m = std::get_if<MeasureSeg>(&seg)) {
            if (m->kind == MeasureSeg::Kind::Ancilla) {
                auto res = measure_subsystem_digit(state, L.ancilla_position(), rng);
                rec.entries.push_back({m->label.empty() ? "ancilla" : m->label, res.outcome,
                                       res.probability});
                state = std::move(res.state);
            } else {
                auto res = measure_pauli_ideal(state, *m->pauli, rng);
                rec.entries.push_back({m->label.empty() ? m->pauli->str() : m->label, res.outcome,
                                       res.probability});
                state = std::move(res.state);
            }
        }
        const double leak = truncation_leakage(state);
        rec.max_leakage = std::max(rec.max_leakage, leak);
        if (leak > opts.leakage_tol)
            throw NumericalError("run_schedule: truncation leakage " + std::to_string(leak) +
                                 " at segment " + std::to_string(si));
    }
    return out;
}

}  // namespace catqec
