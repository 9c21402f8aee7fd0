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

#include "qmpso/statevector.hpp"

#include <cmath>
#include <string>

#include "qmpso/errors.hpp"

namespace qmpso {

namespace {

void check_length(const Statevector &psi, int L) {
  if (L < 1 || psi.size() != (Eigen::Index{1} << L)) {
    throw DimensionError("statevector length does not match 2^" + std::to_string(L));
  }
}

}  // namespace

void check_dense_limit(int L, int limit) {
  if (L > limit) {
    throw CapabilityError("dense backend limited to L <= " + std::to_string(limit) +
                          ", got L = " + std::to_string(L));
  }
}

Statevector product_statevector(std::span<const Spin> labels) {
  const int L = static_cast<int>(labels.size());
  if (L < 1) throw ValidationError("product state needs at least one site");
  check_dense_limit(L);
  Eigen::Index index = 0;
  for (auto s : labels) index = (index << 1) | static_cast<Eigen::Index>(s);
  Statevector psi = Statevector::Zero(Eigen::Index{1} << L);
  psi(index) = 1.0;
  return psi;
}

void apply_gate(Statevector &psi, int L, int bond, const Gate &g) {
  check_length(psi, L);
  if (bond < 0 || bond + 1 >= L) throw DimensionError("bond out of range");
  const Eigen::Index hi = Eigen::Index{1} << (L - 1 - bond);
  const Eigen::Index lo = hi >> 1;
  const Eigen::Index n = psi.size();
  for (Eigen::Index base = 0; base < n; ++base) {
    if (base & (hi | lo)) continue;
    const Eigen::Index idx[4] = {base, base | lo, base | hi, base | hi | lo};
    cplx in[4];
    for (int a = 0; a < 4; ++a) in[a] = psi(idx[a]);
    for (int a = 0; a < 4; ++a) {
      cplx acc = 0.0;
      for (int b = 0; b < 4; ++b) acc += g(a, b) * in[b];
      psi(idx[a]) = acc;
    }
  }
}

void apply_gate1(Statevector &psi, int L, int site, const Gate1 &g) {
  check_length(psi, L);
  if (site < 0 || site >= L) throw DimensionError("site out of range");
  const Eigen::Index bit = Eigen::Index{1} << (L - 1 - site);
  for (Eigen::Index base = 0; base < psi.size(); ++base) {
    if (base & bit) continue;
    const cplx a0 = psi(base), a1 = psi(base | bit);
    psi(base) = g(0, 0) * a0 + g(0, 1) * a1;
    psi(base | bit) = g(1, 0) * a0 + g(1, 1) * a1;
  }
}

Matrix embed(const Gate &g, int bond, int L) {
  if (bond < 0 || bond + 1 >= L) throw DimensionError("bond out of range");
  check_dense_limit(L);
  const Eigen::Index dim = Eigen::Index{1} << L;
  Matrix out(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Statevector e = Statevector::Unit(dim, col);
    apply_gate(e, L, bond, g);
    out.col(col) = e;
  }
  return out;
}

Matrix embed1(const Gate1 &g, int site, int L) {
  check_dense_limit(L);
  const Eigen::Index dim = Eigen::Index{1} << L;
  Matrix out(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Statevector e = Statevector::Unit(dim, col);
    apply_gate1(e, L, site, g);
    out.col(col) = e;
  }
  return out;
}

std::vector<double> schmidt_values(const Statevector &psi, int L, int cut) {
  check_length(psi, L);
  if (cut < 0 || cut > L) throw DimensionError("cut out of range");
  const Eigen::Index rows = Eigen::Index{1} << cut;
  const Eigen::Index cols = Eigen::Index{1} << (L - cut);
  Eigen::Map<const Matrix> m(psi.data(), rows, cols);
  Eigen::BDCSVD<Matrix> svd(m);
  const auto &s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double entropy_bits(std::span<const double> schmidt) {
  double s = 0.0;
  for (double lam : schmidt) {
    const double w = lam * lam;
    if (w < 1e-15) continue;
    s -= w * std::log2(w);
  }
  return s;
}

double expectation_z(const Statevector &psi, int L, int site) {
  check_length(psi, L);
  if (site < 0 || site >= L) throw DimensionError("site out of range");
  const Eigen::Index bit = Eigen::Index{1} << (L - 1 - site);
  double z = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    z += (i & bit ? -1.0 : 1.0) * std::norm(psi(i));
  }
  return z;
}

}  // namespace qmpso
