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

#include <optional>
#include <string>
#include <vector>

#include "catqec/errors.hpp"

namespace catqec {

enum class SubsystemRole { Qubit, Cavity, Ancilla };

// Tensor-product structure of the composite Hilbert space.
//
// Conventions fixed here and relied on everywhere else:
//  - subsystem order is qubit 1 ... qubit N, cavity, ancilla;
//  - the leftmost subsystem is the slowest-varying index;
//  - qubit basis index 0 is |g>, index 1 is |e>.
class HilbertLayout {
public:
    HilbertLayout() = default;

    HilbertLayout(std::vector<int> dims, std::vector<SubsystemRole> roles)
        : dims_(std::move(dims)), roles_(std::move(roles)) {
        if (dims_.size() != roles_.size())
            throw ConfigError("HilbertLayout: dims/roles size mismatch");
        int cavities = 0, ancillas = 0;
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (dims_[i] <= 0) throw ConfigError("HilbertLayout: nonpositive dimension");
            if (roles_[i] == SubsystemRole::Cavity) ++cavities;
            if (roles_[i] == SubsystemRole::Ancilla) ++ancillas;
            if (roles_[i] != SubsystemRole::Cavity && dims_[i] != 2)
                throw ConfigError("HilbertLayout: qubit/ancilla subsystems must have dimension 2");
        }
        if (cavities > 1) throw ConfigError("HilbertLayout: more than one cavity");
        if (ancillas > 1) throw ConfigError("HilbertLayout: more than one ancilla");
        strides_.assign(dims_.size(), 1);
        total_ = 1;
        for (int i = static_cast<int>(dims_.size()) - 1; i >= 0; --i) {
            strides_[i] = total_;
            total_ *= dims_[i];
        }
    }

    // Standard simulation layout: N qubits, one cavity, optional ancilla.
    static HilbertLayout qubits_cavity(int n_qubits, int fock_dim, bool with_ancilla = false) {
        if (n_qubits < 0) throw ConfigError("layout: negative qubit count");
        if (fock_dim < 2) throw ConfigError("layout: Fock truncation must be >= 2");
        std::vector<int> dims(static_cast<std::size_t>(n_qubits), 2);
        std::vector<SubsystemRole> roles(static_cast<std::size_t>(n_qubits), SubsystemRole::Qubit);
        dims.push_back(fock_dim);
        roles.push_back(SubsystemRole::Cavity);
        if (with_ancilla) {
            dims.push_back(2);
            roles.push_back(SubsystemRole::Ancilla);
        }
        return HilbertLayout(std::move(dims), std::move(roles));
    }

    // N qubits only (reduced states, stabilizer algebra on qubit registers).
    static HilbertLayout qubits_only(int n_qubits) {
        std::vector<int> dims(static_cast<std::size_t>(n_qubits), 2);
        std::vector<SubsystemRole> roles(static_cast<std::size_t>(n_qubits), SubsystemRole::Qubit);
        return HilbertLayout(std::move(dims), std::move(roles));
    }

    long total_dim() const { return total_; }
    int subsystem_count() const { return static_cast<int>(dims_.size()); }
    int dim(int pos) const { return dims_.at(static_cast<std::size_t>(pos)); }
    long stride(int pos) const { return strides_.at(static_cast<std::size_t>(pos)); }
    SubsystemRole role(int pos) const { return roles_.at(static_cast<std::size_t>(pos)); }
    const std::vector<int>& dims() const { return dims_; }

    int n_qubits() const {
        int n = 0;
        for (auto r : roles_) n += (r == SubsystemRole::Qubit);
        return n;
    }

    bool has_cavity() const { return find_role(SubsystemRole::Cavity).has_value(); }
    bool has_ancilla() const { return find_role(SubsystemRole::Ancilla).has_value(); }

    int cavity_position() const {
        auto p = find_role(SubsystemRole::Cavity);
        if (!p) throw ConfigError("layout has no cavity subsystem");
        return *p;
    }

    int ancilla_position() const {
        auto p = find_role(SubsystemRole::Ancilla);
        if (!p) throw ConfigError("layout has no ancilla subsystem");
        return *p;
    }

    // Position of qubit with 1-based label q (qubit q occupies position q-1).
    int qubit_position(int label) const {
        if (label < 1 || label > n_qubits())
            throw ConfigError("qubit label out of range: " + std::to_string(label));
        return label - 1;
    }

    int digit(long index, int pos) const {
        return static_cast<int>((index / strides_[static_cast<std::size_t>(pos)]) %
                                dims_[static_cast<std::size_t>(pos)]);
    }

    bool operator==(const HilbertLayout& o) const {
        return dims_ == o.dims_ && roles_ == o.roles_;
    }
    bool operator!=(const HilbertLayout& o) const { return !(*this == o); }

private:
    std::optional<int> find_role(SubsystemRole r) const {
        for (std::size_t i = 0; i < roles_.size(); ++i)
            if (roles_[i] == r) return static_cast<int>(i);
        return std::nullopt;
    }

    std::vector<int> dims_;
    std::vector<SubsystemRole> roles_;
    std::vector<long> strides_;
    long total_ = 0;
};

}  // namespace catqec
