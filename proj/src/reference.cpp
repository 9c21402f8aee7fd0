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


#include "qmpso/reference.hpp"

#include <bit>
#include <cmath>
#include <mutex>

#include "qmpso/errors.hpp"

namespace qmpso {

struct DenseHamiltonian::Spectrum {
  std::once_flag once;
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

DenseHamiltonian DenseHamiltonian::tfim(const TfimParams &p, int dense_limit) {
  check_dense_limit(p.L, dense_limit);
  const auto terms = local_terms(p);
  const Eigen::Index n = Eigen::Index{1} << p.L;
  Matrix h = Matrix::Zero(n, n);
  for (int b = 0; b + 1 < p.L; ++b) {
    const Eigen::Index hi = Eigen::Index{1} << (p.L - 1 - b);
    const Eigen::Index lo = hi >> 1;
    for (Eigen::Index base = 0; base < n; ++base) {
      if (base & (hi | lo)) continue;
      const Eigen::Index idx[4] = {base, base | lo, base | hi, base | hi | lo};
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) h(idx[a], idx[c]) += terms[b](a, c);
    }
  }
  return DenseHamiltonian(std::move(h), p.L, dense_limit);
}

DenseHamiltonian::DenseHamiltonian(Matrix h, int L, int dense_limit)
    : L_(L), spectrum_(std::make_shared<Spectrum>()) {
  if (L < 1) throw ValidationError("Hamiltonian needs L >= 1");
  check_dense_limit(L, dense_limit);
  const Eigen::Index n = Eigen::Index{1} << L;
  if (h.rows() != n || h.cols() != n) throw DimensionError("Hamiltonian is not 2^L x 2^L");
  if (!is_hermitian(h, 1e-10)) throw ValidationError("Hamiltonian is not Hermitian");
  h_ = std::make_shared<const Matrix>(std::move(h));
}

const DenseHamiltonian::Spectrum &DenseHamiltonian::spectrum() const {
  std::call_once(spectrum_->once, [this] {
    const Matrix &h = *h_;
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
      spectrum_->values = es.eigenvalues();
      spectrum_->vectors = es.eigenvectors().cast<cplx>();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(h)};
      spectrum_->values = es.eigenvalues();
      spectrum_->vectors = es.eigenvectors();
    }
  });
  return *spectrum_;
}

const Eigen::VectorXd &DenseHamiltonian::eigenvalues() const { return spectrum().values; }

const Eigen::MatrixXcd &DenseHamiltonian::eigenvectors() const {
  return spectrum().vectors;
}

double DenseHamiltonian::energy(const Statevector &psi) const {
  if (psi.size() != h_->rows()) throw DimensionError("state length does not match H");
  return psi.dot(*h_ * psi).real();
}

Statevector exact_propagate(const Statevector &psi0, const DenseHamiltonian &H, double t) {
  if (psi0.size() != H.matrix().rows()) throw DimensionError("state length does not match H");
  const auto &v = H.eigenvectors();
  const auto &e = H.eigenvalues();
  Eigen::VectorXcd c = v.adjoint() * psi0;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -e(i) * t);
  return v * c;
}

std::vector<Statevector> fine_trotter_series(const TfimParams &p,
                                             std::span<const double> times) {
  p.validate();
  check_dense_limit(p.L);
  const auto schedule = trotter_step_gates(p);
  Statevector psi = product_statevector(neel_product_state(p.L));
  std::vector<Statevector> out;
  out.reserve(times.size());
  int done = 0;
  for (double t : times) {
    const int steps = steps_for(t, p.dt);
    if (steps < done) throw ValidationError("reference times must be ascending");
    for (; done < steps; ++done) {
      for (const auto &bg : schedule.gates) apply_gate(psi, p.L, bg.bond, bg.gate);
    }
    out.push_back(psi);
  }
  return out;
}

Statevector fine_trotter_reference(const TfimParams &p, double t) {
  const double times[] = {t};
  return fine_trotter_series(p, times).front();
}

std::vector<double> local_magnetization(const Statevector &psi) {
  const auto n = static_cast<std::uint64_t>(psi.size());
  if (n < 2 || !std::has_single_bit(n)) {
    throw DimensionError("statevector length is not a power of two");
  }
  const int L = std::countr_zero(n);
  std::vector<double> z(L);
  for (int i = 0; i < L; ++i) z[i] = expectation_z(psi, L, i);
  return z;
}

}  // namespace qmpso
