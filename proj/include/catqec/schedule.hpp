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

#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "catqec/pauli.hpp"
#include "catqec/system.hpp"

namespace catqec {

// --- schedule segments -----------------------------------------------------

struct FreeEvolution {
    double duration;
};

struct CavityDrivePulse {
    double amplitude;  // rad/ns
    double phase;      // carrier phase
    double detuning;   // rad/ns
    double duration;   // ns
};

struct QubitDrivePulse {
    std::set<int> targets;  // 1-based labels
    double rabi;            // rad/ns
    double duration;        // ns
    double nbar;            // dispersive frame shift during the pulse
};

// Zero-duration exact unitary: a product of single-qubit gates, an optional
// cavity operator, and an optional ancilla gate, applied in one step.
struct InstantGate {
    std::string label;
    std::vector<std::pair<int, Eigen::Matrix2cd>> qubit_gates;  // (1-based label, U)
    std::optional<Eigen::MatrixXcd> cavity_gate;
    std::optional<Eigen::Matrix2cd> ancilla_gate;
};

enum class GateCondition { CavityVacuum, AncillaGround };

struct FlipAncilla {};
struct DisplaceCavity {
    cdouble beta;
};
struct RotateQubit {
    char axis = 'x';
    double angle = 0.0;
    int qubit = 1;  // 1-based
};
struct BranchPhase {
    double theta;  // conditioned branch acquires exp(2 i theta)
};

struct ConditionalGate {
    GateCondition condition;
    std::variant<FlipAncilla, DisplaceCavity, RotateQubit, BranchPhase> action;
};

// duration == 0 applies the ideal projector-controlled unitary; duration > 0
// sandwiches it between two free-evolution halves of duration/2 each,
// modeling the dispersive evolution neglected during the real pulse.
struct ConditionalGateSeg {
    ConditionalGate gate;
    double duration = 0.0;
    std::string label;
};

enum class ResetTarget { Cavity, Ancilla };

struct ResetSeg {
    ResetTarget target;
};

struct MeasureSeg {
    enum class Kind { Ancilla, PauliIdeal };
    Kind kind = Kind::Ancilla;
    std::optional<PauliString> pauli;  // for PauliIdeal
    std::string label;
};

using Segment = std::variant<FreeEvolution, CavityDrivePulse, QubitDrivePulse, InstantGate,
                             ConditionalGateSeg, ResetSeg, MeasureSeg>;

inline double segment_duration(const Segment& seg) {
    if (const auto* f = std::get_if<FreeEvolution>(&seg)) return f->duration;
    if (const auto* c = std::get_if<CavityDrivePulse>(&seg)) return c->duration;
    if (const auto* q = std::get_if<QubitDrivePulse>(&seg)) return q->duration;
    if (const auto* g = std::get_if<ConditionalGateSeg>(&seg)) return g->duration;
    return 0.0;
}

// --- schedule --------------------------------------------------------------

struct TimelineEntry {
    std::string label;
    double start;
    double duration;
};

// Ordered timeline of segments plus bookkeeping metadata: target subset,
// nominal displacement, and a label -> (start, duration) ledger.
class PulseSchedule {
public:
    void append(Segment seg, const std::string& label = "") {
        const double d = segment_duration(seg);
        ledger_.push_back({label.empty() ? kind_name(seg) : label, cursor_, d});
        segments_.push_back(std::move(seg));
        cursor_ += d;
    }

    void append_all(const PulseSchedule& other) {
        for (std::size_t i = 0; i < other.segments_.size(); ++i)
            append(other.segments_[i], other.ledger_[i].label);
    }

    const std::vector<Segment>& segments() const { return segments_; }
    const std::vector<TimelineEntry>& ledger() const { return ledger_; }
    double total_duration() const { return cursor_; }

    // Duration between the start of the ledger entry named `from` and the end
    // of the last entry named `to`. Used for nonlinear-phase bookkeeping.
    double window(const std::string& from, const std::string& to) const {
        double t0 = -1, t1 = -1;
        for (const auto& e : ledger_) {
            if (t0 < 0 && e.label == from) t0 = e.start;
            if (e.label == to) t1 = e.start + e.duration;
        }
        if (t0 < 0 || t1 < 0) throw ConfigError("PulseSchedule: unknown ledger window");
        return t1 - t0;
    }

    std::set<int> subset;   // encoded qubit subset (1-based), when applicable
    cdouble alpha{0, 0};    // nominal pointer amplitude, when applicable

    // Versioned plain-text timeline: one line per segment with start,
    // duration, kind, and parameters. Format documented in the README.
    std::string timeline() const {
        std::string out = "catqec-timeline v1\n";
        out += "# start_ns duration_ns kind parameters\n";
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            const auto& e = ledger_[i];
            out += fmt(e.start) + " " + fmt(e.duration) + " " + describe(segments_[i]);
            out += "\n";
        }
        return out;
    }

private:
    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return buf;
    }

    static std::string fmtc(cdouble v) {
        return fmt(v.real()) + (v.imag() < 0 ? "" : "+") + fmt(v.imag()) + "j";
    }

    static const char* kind_name(const Segment& seg) {
        struct Visitor {
            const char* operator()(const FreeEvolution&) const { return "free"; }
            const char* operator()(const CavityDrivePulse&) const { return "cavity_drive"; }
            const char* operator()(const QubitDrivePulse&) const { return "qubit_drive"; }
            const char* operator()(const InstantGate&) const { return "gate"; }
            const char* operator()(const ConditionalGateSeg&) const { return "conditional"; }
            const char* operator()(const ResetSeg&) const { return "reset"; }
            const char* operator()(const MeasureSeg&) const { return "measure"; }
        };
        return std::visit(Visitor{}, seg);
    }

    static std::string describe(const Segment& seg) {
        struct Visitor {
            std::string operator()(const FreeEvolution&) const { return "free"; }
            std::string operator()(const CavityDrivePulse& c) const {
                return "cavity_drive amplitude=" + fmt(c.amplitude) + " phase=" + fmt(c.phase) +
                       " detuning=" + fmt(c.detuning);
            }
            std::string operator()(const QubitDrivePulse& q) const {
                std::string t;
                for (int x : q.targets) t += (t.empty() ? "" : ",") + std::to_string(x);
                return "qubit_drive targets=" + t + " rabi=" + fmt(q.rabi) +
                       " nbar=" + fmt(q.nbar);
            }
            std::string operator()(const InstantGate& g) const { return "gate " + g.label; }
            std::string operator()(const ConditionalGateSeg& g) const {
                std::string cond = g.gate.condition == GateCondition::CavityVacuum
                                       ? "cavity_vacuum"
                                       : "ancilla_ground";
                std::string act;
                if (std::holds_alternative<FlipAncilla>(g.gate.action)) act = "flip_ancilla";
                else if (const auto* d = std::get_if<DisplaceCavity>(&g.gate.action))
                    act = "displace beta=" + fmtc(d->beta);
                else if (const auto* r = std::get_if<RotateQubit>(&g.gate.action))
                    act = std::string("rotate axis=") + r->axis + " angle=" + fmt(r->angle) +
                          " qubit=" + std::to_string(r->qubit);
                else if (const auto* p = std::get_if<BranchPhase>(&g.gate.action))
                    act = "branch_phase theta=" + fmt(p->theta);
                return "conditional " + cond + " -> " + act;
            }
            std::string operator()(const ResetSeg& r) const {
                return r.target == ResetTarget::Cavity ? "reset cavity" : "reset ancilla";
            }
            std::string operator()(const MeasureSeg& m) const {
                if (m.kind == MeasureSeg::Kind::Ancilla) return "measure ancilla " + m.label;
                return "measure pauli " + (m.pauli ? m.pauli->str() : std::string("?"));
            }
        };
        return std::visit(Visitor{}, seg);
    }

    std::vector<Segment> segments_;
    std::vector<TimelineEntry> ledger_;
    double cursor_ = 0.0;
};

}  // namespace catqec
