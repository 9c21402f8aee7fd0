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

#include "qmpso/tfim.hpp"

#include <cmath>
#include <string>

#include "qmpso/errors.hpp"

namespace qmpso {

void TfimParams::validate() const {
  if (L < 2) throw ValidationError("TFIM needs L >= 2, got " + std::to_string(L));
  if (!(dt > 0.0)) throw ValidationError("Trotter step dt must be positive");
  if (!std::isfinite(J) || !std::isfinite(h)) {
    throw ValidationError("couplings must be finite");
  }
}

std::vector<Gate> local_terms(const TfimParams &p) {
  p.validate();
  using namespace pauli;
  const Gate xx = kron(x(), x());
  const Gate zi = kron(z(), identity());
  const Gate iz = kron(identity(), z());

  const int bonds = p.L - 1;
  std::vector<Gate> terms;
  terms.reserve(bonds);
  for (int b = 0; b < bonds; ++b) {
    // Each site's field is shared between the bonds touching it.
    const double left_share = (b == 0) ? 1.0 : 0.5;
    const double right_share = (b == bonds - 1) ? 1.0 : 0.5;
    terms.push_back(-p.J * xx - p.h * (left_share * zi + right_share * iz));
  }
  return terms;
}

TrotterSchedule trotter_step_gates(const TfimParams &p) {
  const auto terms = local_terms(p);
  const int bonds = p.L - 1;
  TrotterSchedule schedule;
  schedule.gates.reserve(bonds);
  for (int parity = 0; parity < 2; ++parity) {
    for (int b = parity; b < bonds; b += 2) {
      schedule.gates.push_back({b, herm_exp(terms[b], cplx(0.0, -p.dt))});
    }
  }
  return schedule;
}

int steps_for(double t, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (t < 0.0) throw ValidationError("time must be non-negative");
  const double ratio = t / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, n)) {
    throw ValidationError("time " + std::to_string(t) +
                          " is not a multiple of dt = " + std::to_string(dt));
  }
  return static_cast<int>(n);
}

std::vector<Spin> neel_product_state(int L) {
  if (L < 1) throw ValidationError("Neel state needs L >= 1");
  std::vector<Spin> labels(L);
  for (int i = 0; i < L; ++i) labels[i] = (i % 2 == 0) ? Spin::up : Spin::down;
  return labels;
}

}  // namespace qmpso
