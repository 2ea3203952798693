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
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "catqec/operators.hpp"

namespace catqec {

// N-qubit Pauli operator in symplectic form: i^k * prod_j X_j^{x_j} Z_j^{z_j}.
// The textual grammar is "X1X2Z4" with 1-based qubit labels and an optional
// leading sign/i prefix ("-", "i", "-i"). Y contributes x=z=1 and one factor
// of i (Y = iXZ).
class PauliString {
public:
    explicit PauliString(int n) : n_(n), x_(static_cast<std::size_t>(n), 0),
                                  z_(static_cast<std::size_t>(n), 0) {
        if (n < 1) throw ConfigError("PauliString: need at least one qubit");
    }

    static PauliString identity(int n) { return PauliString(n); }

    static PauliString parse(std::string_view text, int n) {
        PauliString p(n);
        std::size_t i = 0;
        // optional phase prefix
        int k = 0;
        if (i < text.size() && text[i] == '+') ++i;
        if (i < text.size() && text[i] == '-') { k = 2; ++i; }
        if (i < text.size() && (text[i] == 'i' || text[i] == 'j')) { k += 1; ++i; }
        p.phase_k_ = k % 4;
        if (i >= text.size()) throw ConfigError("PauliString: empty operator text");
        if (text.substr(i) == "I") return p;
        while (i < text.size()) {
            const char c = static_cast<char>(std::toupper(text[i]));
            if (c != 'X' && c != 'Y' && c != 'Z')
                throw ConfigError("PauliString: unexpected letter in '" + std::string(text) + "'");
            ++i;
            std::size_t j = i;
            while (j < text.size() && std::isdigit(text[j])) ++j;
            if (j == i) throw ConfigError("PauliString: missing qubit index");
            const int label = std::stoi(std::string(text.substr(i, j - i)));
            i = j;
            if (label < 1 || label > n)
                throw ConfigError("PauliString: qubit index out of range: " +
                                  std::to_string(label));
            p.apply_letter(label, c);
        }
        return p;
    }

    int n() const { return n_; }
    bool x_bit(int label) const { return x_[idx(label)] != 0; }
    bool z_bit(int label) const { return z_[idx(label)] != 0; }
    int phase_exponent() const { return phase_k_; }

    cdouble phase() const {
        static const cdouble table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return table[phase_k_];
    }

    char letter(int label) const {
        const bool x = x_bit(label), z = z_bit(label);
        if (x && z) return 'Y';
        if (x) return 'X';
        if (z) return 'Z';
        return 'I';
    }

    bool is_identity() const {
        for (int q = 1; q <= n_; ++q)
            if (letter(q) != 'I') return false;
        return true;
    }

    int weight() const {
        int w = 0;
        for (int q = 1; q <= n_; ++q) w += (letter(q) != 'I');
        return w;
    }

    std::vector<int> support() const {
        std::vector<int> s;
        for (int q = 1; q <= n_; ++q)
            if (letter(q) != 'I') s.push_back(q);
        return s;
    }

    PauliString operator*(const PauliString& rhs) const {
        if (n_ != rhs.n_) throw ConfigError("PauliString: size mismatch");
        PauliString out(n_);
        int k = phase_k_ + rhs.phase_k_;
        for (int q = 0; q < n_; ++q) {
            // Z^{z1} X^{x2} = (-1)^{z1 x2} X^{x2} Z^{z1}
            k += 2 * (z_[static_cast<std::size_t>(q)] & rhs.x_[static_cast<std::size_t>(q)]);
            out.x_[static_cast<std::size_t>(q)] =
                x_[static_cast<std::size_t>(q)] ^ rhs.x_[static_cast<std::size_t>(q)];
            out.z_[static_cast<std::size_t>(q)] =
                z_[static_cast<std::size_t>(q)] ^ rhs.z_[static_cast<std::size_t>(q)];
        }
        out.phase_k_ = k % 4;
        return out;
    }

    PauliString times_i() const {
        PauliString out = *this;
        out.phase_k_ = (out.phase_k_ + 1) % 4;
        return out;
    }

    bool commutes_with(const PauliString& rhs) const {
        if (n_ != rhs.n_) throw ConfigError("PauliString: size mismatch");
        int sym = 0;
        for (int q = 0; q < n_; ++q)
            sym ^= (x_[static_cast<std::size_t>(q)] & rhs.z_[static_cast<std::size_t>(q)]) ^
                   (z_[static_cast<std::size_t>(q)] & rhs.x_[static_cast<std::size_t>(q)]);
        return sym == 0;
    }

    // True when P^2 = +1 (Hermitian with +-1 eigenvalues).
    bool squares_to_identity() const {
        int xz = 0;
        for (int q = 0; q < n_; ++q)
            xz += x_[static_cast<std::size_t>(q)] & z_[static_cast<std::size_t>(q)];
        return (2 * phase_k_ + 2 * xz) % 4 == 0;
    }

    std::string str() const {
        // Factor Y letters out of the stored phase for printing.
        int k = phase_k_;
        std::string body;
        for (int q = 1; q <= n_; ++q) {
            const char c = letter(q);
            if (c == 'I') continue;
            if (c == 'Y') k = (k + 3) % 4;  // printed Y carries its own i
            body += c;
            body += std::to_string(q);
        }
        if (body.empty()) body = "I";
        static const char* prefix[4] = {"", "i", "-", "-i"};
        return std::string(prefix[k]) + body;
    }

    // Dense matrix on the 2^n qubit space (qubit 1 slowest).
    Eigen::MatrixXcd dense() const {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1) * phase();
        for (int q = 1; q <= n_; ++q) out = kron(out, site_matrix(q)).eval();
        return out;
    }

    // Dense operator embedded in a full layout (identity on cavity/ancilla).
    Operator embedded(const HilbertLayout& layout) const {
        if (layout.n_qubits() != n_) throw ConfigError("PauliString: layout qubit count mismatch");
        const long n = layout.total_dim();
        const long inner = n / (1L << n_);
        Eigen::MatrixXcd block = dense();
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
        for (long i = 0; i < block.rows(); ++i)
            for (long j = 0; j < block.cols(); ++j) {
                if (block(i, j) == cdouble(0, 0)) continue;
                for (long r = 0; r < inner; ++r) out(i * inner + r, j * inner + r) = block(i, j);
            }
        return Operator(std::move(out), layout);
    }

    // sigma_z eigenvalue of a computational basis assignment (bits, 1 = e)
    // under this Pauli, assuming a Z-type string (x bits all zero).
    int z_eigenvalue(const std::vector<int>& bits) const {
        int sign = 1;
        for (int q = 1; q <= n_; ++q) {
            if (!z_bit(q)) continue;
            sign *= bits[static_cast<std::size_t>(q - 1)] == 1 ? 1 : -1;
        }
        return sign;
    }

    bool operator==(const PauliString& o) const {
        return n_ == o.n_ && x_ == o.x_ && z_ == o.z_ && phase_k_ == o.phase_k_;
    }

private:
    std::size_t idx(int label) const {
        if (label < 1 || label > n_) throw ConfigError("PauliString: bad qubit label");
        return static_cast<std::size_t>(label - 1);
    }

    void apply_letter(int label, char c) {
        const std::size_t q = idx(label);
        if (x_[q] || z_[q]) throw ConfigError("PauliString: repeated qubit in text");
        switch (c) {
            case 'X': x_[q] = 1; break;
            case 'Z': z_[q] = 1; break;
            case 'Y':
                x_[q] = 1;
                z_[q] = 1;
                phase_k_ = (phase_k_ + 1) % 4;
                break;
            default: throw ConfigError("PauliString: bad letter");
        }
    }

    Eigen::Matrix2cd site_matrix(int label) const {
        const bool x = x_bit(label), z = z_bit(label);
        if (x && z) {
            Eigen::Matrix2cd m;  // X*Z (the i lives in the phase)
            m << 0, 1, -1, 0;
            return m;
        }
        if (x) return sigma_x();
        if (z) return sigma_z();
        return qubit_identity();
    }

    int n_;
    std::vector<uint8_t> x_, z_;
    int phase_k_ = 0;
};

}  // namespace catqec
