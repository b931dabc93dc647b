#pragma once

// Shared helpers for unit and acceptance tests: seeded random programs of
// unitaries and channels replayed on both an LPDO and the dense oracle.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lpdo/chain.hpp"
#include "lpdo/channel.hpp"
#include "lpdo/dense_oracle.hpp"

namespace lpdo::testing {

struct ProgramStep {
  enum class Kind { unitary1, unitary2, channel } kind;
  std::size_t site = 0;
  Matrix op;
  KrausChannel channel;
};

inline KrausChannel random_channel(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rate(0.0, 1.0);
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return bitflip(rate(rng));
    case 1: return dephasing(rate(rng));
    default: return amplitude_damping(rate(rng));
  }
}

inline std::vector<ProgramStep> random_program(std::size_t n_sites, int n_ops,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ProgramStep> prog;
  for (int j = 0; j < n_ops; ++j) {
    ProgramStep st;
    const int pick = std::uniform_int_distribution<int>(0, 2)(rng);
    if (pick == 1 && n_sites >= 2) {
      st.kind = ProgramStep::Kind::unitary2;
      st.site = std::uniform_int_distribution<std::size_t>(0, n_sites - 2)(rng);
      st.op = random_unitary(4, rng);
    } else if (pick == 2) {
      st.kind = ProgramStep::Kind::channel;
      st.site = std::uniform_int_distribution<std::size_t>(0, n_sites - 1)(rng);
      st.channel = random_channel(rng);
    } else {
      st.kind = ProgramStep::Kind::unitary1;
      st.site = std::uniform_int_distribution<std::size_t>(0, n_sites - 1)(rng);
      st.op = random_unitary(2, rng);
    }
    prog.push_back(std::move(st));
  }
  return prog;
}

/// Exact replay: no truncation beyond numerically zero values.
inline LpdoChain run_on_chain(LpdoChain chain, const std::vector<ProgramStep>& prog) {
  TruncationPolicy exact = TruncationPolicy::l2(0.0);
  exact.zero_floor = 1e-15;
  for (const auto& st : prog) {
    switch (st.kind) {
      case ProgramStep::Kind::unitary1: chain = apply_unitary(chain, st.site, st.op); break;
      case ProgramStep::Kind::unitary2:
        chain = apply_unitary(chain, st.site, st.site + 1, st.op, exact);
        break;
      case ProgramStep::Kind::channel:
        chain = apply_channel(chain, st.site, st.channel, default_kraus_policy());
        break;
    }
  }
  return chain;
}

inline oracle::DenseRho run_on_oracle(oracle::DenseRho rho,
                                      const std::vector<ProgramStep>& prog) {
  for (const auto& st : prog) {
    switch (st.kind) {
      case ProgramStep::Kind::unitary1: rho = oracle::dense_apply(rho, st.op, {st.site}); break;
      case ProgramStep::Kind::unitary2:
        rho = oracle::dense_apply(rho, st.op, {st.site, st.site + 1});
        break;
      case ProgramStep::Kind::channel: rho = oracle::dense_apply(rho, st.channel, st.site); break;
    }
  }
  return rho;
}

struct BlockDims {
  std::int64_t d1, d2, l, r, k1, k2;
};

inline DenseTensor random_block(const BlockDims& b, std::mt19937_64& rng) {
  std::vector<Index> ix{Index::make(b.d1, IndexRole::physical), Index::make(b.d2, IndexRole::physical),
                        Index::make(b.l, IndexRole::bond),      Index::make(b.r, IndexRole::bond),
                        Index::make(b.k1, IndexRole::kraus),    Index::make(b.k2, IndexRole::kraus)};
  const std::int64_t n = b.d1 * b.d2 * b.l * b.r * b.k1 * b.k2;
  const Matrix g = random_gaussian(n, 1, rng);
  return DenseTensor(ix, std::vector<cplx>(g.data(), g.data() + n));
}

inline DenseTensor planted(double p1, double p2) {
  // s1 = s2 = 2, every other leg 1: M = diag(sqrt p1, sqrt p2).
  std::vector<Index> ix{Index::make(2, IndexRole::physical), Index::make(2, IndexRole::physical),
                        Index::make(1, IndexRole::bond),     Index::make(1, IndexRole::bond),
                        Index::make(1, IndexRole::kraus),    Index::make(1, IndexRole::kraus)};
  return DenseTensor(ix, {std::sqrt(p1), 0.0, 0.0, std::sqrt(p2)});
}


inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline Matrix cnot() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
  return u;
}

inline Matrix swap_gate() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = u(1, 2) = u(2, 1) = u(3, 3) = 1.0;
  return u;
}

inline Matrix hadamard() {
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  return h / std::sqrt(2.0);
}

}  // namespace lpdo::testing
