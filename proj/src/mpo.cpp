// Copyright 2026 The qmpso Authors
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


#include "qmpso/mpo.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "qmpso/errors.hpp"
#include "qmpso/log.hpp"
#include "qmpso/statevector.hpp"

namespace qmpso {

namespace {

constexpr char kMagic[8] = {'Q', 'M', 'P', 'S', 'O', 'M', 'A', 'T'};
constexpr std::uint32_t kDumpVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "dense matrix dumps assume a little-endian host");

// Two-site operator on the fused (out, in) legs of a pair of MPO sites.
// Fused index order is (out_a, in_a, out_b, in_b).
Matrix fused_gate(const Gate &g, Side side) {
  Matrix op = Matrix::Zero(16, 16);
  for (int oa = 0; oa < 2; ++oa)
    for (int ia = 0; ia < 2; ++ia)
      for (int ob = 0; ob < 2; ++ob)
        for (int ib = 0; ib < 2; ++ib) {
          const int row = ((oa * 2 + ia) * 2 + ob) * 2 + ib;
          for (int xa = 0; xa < 2; ++xa)
            for (int xb = 0; xb < 2; ++xb) {
              if (side == Side::left) {
                // (g U)[o', i] = sum_o g[o', o] U[o, i]
                const int col = ((xa * 2 + ia) * 2 + xb) * 2 + ib;
                op(row, col) = g(oa * 2 + ob, xa * 2 + xb);
              } else {
                // (U g)[o, i'] = sum_i U[o, i] g[i, i']
                const int col = ((oa * 2 + xa) * 2 + ob) * 2 + xb;
                op(row, col) = g(xa * 2 + xb, ia * 2 + ib);
              }
            }
        }
  return op;
}

}  // namespace

MatrixProductOperator MatrixProductOperator::identity(int L, std::size_t kappa_max) {
  if (L < 1) throw ValidationError("MPO needs L >= 1");
  std::vector<ComplexTensor> sites;
  sites.reserve(L);
  for (int n = 0; n < L; ++n) {
    ComplexTensor t({1, 4, 1});
    t[0] = 1.0;
    t[3] = 1.0;
    sites.push_back(std::move(t));
  }
  return {detail::Chain(std::move(sites), 4), kappa_max};
}

MatrixProductOperator MatrixProductOperator::from_dense(const Matrix &op, int L,
                                                        std::size_t kappa_max) {
  check_dense_limit(L, kDenseOperatorLimit);
  const Eigen::Index dim = Eigen::Index{1} << L;
  if (op.rows() != dim || op.cols() != dim) {
    throw DimensionError("dense operator is not 2^L x 2^L");
  }
  std::vector<cplx> v(static_cast<std::size_t>(dim * dim));
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      std::size_t fused = 0;
      for (int n = 0; n < L; ++n) {
        const int shift = L - 1 - n;
        fused = fused * 4 + static_cast<std::size_t>(((r >> shift) & 1) * 2 + ((c >> shift) & 1));
      }
      v[fused] = op(r, c);
    }
  }
  return {detail::chain_from_vector(v, L, 4, kappa_max), kappa_max};
}

MatrixProductOperator MatrixProductOperator::from_sites(
    const std::vector<ComplexTensor> &sites, std::size_t kappa_max) {
  std::vector<ComplexTensor> fused;
  fused.reserve(sites.size());
  for (const auto &s : sites) {
    if (s.rank() != 4 || s.extent(1) != 2 || s.extent(2) != 2) {
      throw DimensionError("MPO site tensors must have shape (l, 2, 2, r)");
    }
    fused.push_back(s.reshaped({s.extent(0), 4, s.extent(3)}));
  }
  detail::Chain c(std::move(fused), 4);
  for (auto k : c.bond_dims()) {
    if (k > kappa_max) throw ValidationError("MPO bond exceeds kappa_max");
  }
  return {std::move(c), kappa_max};
}

ComplexTensor MatrixProductOperator::site(int n) const {
  const auto &s = chain_.site(n);
  return s.reshaped({s.extent(0), 2, 2, s.extent(2)});
}

double MatrixProductOperator::apply_gate(int bond, const Gate &g, Side side,
                                         double cutoff) {
  detail::Truncation trunc{kappa_max_, cutoff, false};
  return chain_.apply_two_site(bond, fused_gate(g, side), trunc, detail::Absorb::right);
}

MatrixProductOperator MatrixProductOperator::adjoint() const {
  std::vector<ComplexTensor> sites;
  sites.reserve(length());
  for (int n = 0; n < length(); ++n) {
    const auto &s = chain_.site(n);
    ComplexTensor t(s.shape());
    const std::size_t l = s.extent(0), r = s.extent(2);
    for (std::size_t a = 0; a < l; ++a)
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t b = 0; b < r; ++b) {
            t.at({a, o * 2 + i, b}) = std::conj(s.at({a, i * 2 + o, b}));
          }
    sites.push_back(std::move(t));
  }
  detail::Chain c(std::move(sites), 4);
  if (chain_.center()) c.canonicalize(*chain_.center());
  return {std::move(c), kappa_max_};
}

Matrix MatrixProductOperator::to_dense(int dense_limit) const {
  const int L = length();
  check_dense_limit(L, dense_limit);
  const auto v = detail::chain_to_vector(chain_);
  const Eigen::Index dim = Eigen::Index{1} << L;
  Matrix out(dim, dim);
  for (std::size_t fused = 0; fused < v.size(); ++fused) {
    Eigen::Index r = 0, c = 0;
    std::size_t rest = fused;
    for (int n = L - 1; n >= 0; --n) {
      const std::size_t p = rest % 4;
      rest /= 4;
      const int shift = L - 1 - n;
      r |= static_cast<Eigen::Index>(p / 2) << shift;
      c |= static_cast<Eigen::Index>(p % 2) << shift;
    }
    out(r, c) = v[fused];
  }
  return out;
}

std::pair<MatrixProductOperator, double> apply_gate_to_mpo(MatrixProductOperator U,
                                                           int bond, const Gate &g,
                                                           Side side) {
  const double w = U.apply_gate(bond, g, side);
  return {std::move(U), w};
}

MatrixProductOperator trotter_propagator_mpo(const TfimParams &p, double t,
                                             std::size_t kappa_max) {
  p.validate();
  const int steps = steps_for(t, p.dt);
  const auto schedule = trotter_step_gates(p);
  auto U = MatrixProductOperator::identity(p.L, kappa_max);
  for (int s = 0; s < steps; ++s) {
    for (const auto &bg : schedule.gates) U.apply_gate(bg.bond, bg.gate, Side::left);
  }
  return U;
}

cplx frobenius_fidelity(const MatrixProductOperator &U, const MatrixProductOperator &V) {
  if (U.length() != V.length()) throw DimensionError("MPO length mismatch");
  return U.chain().inner(V.chain()) * std::ldexp(1.0, -U.length());
}

int max_useful_layers(int L) {
  if (L < 1) throw ValidationError("L must be positive");
  const int exponent = L / 2 - 1;
  const int layers = exponent > 0 ? exponent / 2 : 0;
  if (layers < 1) {
    warn("L = " + std::to_string(L) +
         " admits no useful MPO layer; using a single layer instead");
    return 1;
  }
  return layers;
}

std::size_t layer_kappa_budget(int num_layers) {
  if (num_layers < 0) throw ValidationError("layer count must be non-negative");
  if (num_layers >= 31) return std::numeric_limits<std::size_t>::max();
  return std::size_t{1} << (2 * num_layers);
}

void write_dense_matrix(std::ostream &os, const Matrix &m) {
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
  os.write(kMagic, sizeof kMagic);
  os.write(reinterpret_cast<const char *>(&kDumpVersion), sizeof kDumpVersion);
  os.write(reinterpret_cast<const char *>(&rows), sizeof rows);
  os.write(reinterpret_cast<const char *>(&cols), sizeof cols);
  // Matrix is row-major and std::complex<double> is layout-compatible with
  // double[2].
  os.write(reinterpret_cast<const char *>(m.data()),
           static_cast<std::streamsize>(m.size() * sizeof(cplx)));
  if (!os) throw IoError("failed to write dense matrix");
}

Matrix read_dense_matrix(std::istream &is) {
  char magic[sizeof kMagic];
  std::uint32_t version = 0;
  std::uint64_t rows = 0, cols = 0;
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ParseError("not a dense matrix dump (bad magic)");
  }
  is.read(reinterpret_cast<char *>(&version), sizeof version);
  if (!is || version != kDumpVersion) {
    throw ParseError("unsupported dense matrix dump version " + std::to_string(version));
  }
  is.read(reinterpret_cast<char *>(&rows), sizeof rows);
  is.read(reinterpret_cast<char *>(&cols), sizeof cols);
  if (!is || rows > (1u << 20) || cols > (1u << 20)) {
    throw ParseError("dense matrix dump has an invalid header");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  is.read(reinterpret_cast<char *>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(cplx)));
  if (!is) throw ParseError("dense matrix dump is truncated");
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) {
      throw ParseError("dense matrix dump contains non-finite entries");
    }
  }
  return m;
}

}  // namespace qmpso
