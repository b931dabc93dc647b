#include <doctest.h>

#include <cmath>
#include <random>

#include "lpdo/chain.hpp"
#include "lpdo/channel.hpp"
#include "lpdo/dense_oracle.hpp"
#include "lpdo/measures.hpp"
#include "support.hpp"

using namespace lpdo;
using lpdo::testing::max_abs_diff;

namespace {

Matrix dense(const LpdoChain& c) { return oracle::lpdo_to_dense(c).matrix; }

// Left-isometry over (s, left, kraus) rows for sites before the center.
double left_iso_error(const LpdoChain& c, std::size_t i) {
  const auto& t = c.site(i);
  return isometry_error(matricize(t, {t.index(0), t.index(1), t.index(3)}).matrix);
}

double right_iso_error(const LpdoChain& c, std::size_t i) {
  const auto& t = c.site(i);
  return isometry_error(matricize(t, {t.index(0), t.index(2), t.index(3)}).matrix);
}

}  // namespace

TEST_SUITE("chain") {
  TEST_CASE("optimal LPMM construction") {
    const auto one = build_optimal_lpmm(1);
    const double a = 1.0 / std::sqrt(2.0);
    CHECK(one.site(0).at({0, 0, 0, 0}) == cplx(a));
    CHECK(one.site(0).at({1, 0, 0, 1}) == cplx(a));
    CHECK(one.site(0).at({0, 0, 0, 1}) == cplx(0.0));
    CHECK(one.site(0).at({1, 0, 0, 0}) == cplx(0.0));

    const auto three = build_optimal_lpmm(3);
    CHECK(three.bond_dims() == std::vector<std::int64_t>{1, 1});
    CHECK(three.kraus_dims() == std::vector<std::int64_t>{2, 2, 2});
    CHECK(trace(three) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t n : {1u, 2u, 5u})
      CHECK(purity(build_optimal_lpmm(n)) == doctest::Approx(std::pow(2.0, -double(n))));
    CHECK_THROWS(build_optimal_lpmm(0));
    CHECK(max_abs_diff(dense(build_optimal_lpmm(2)), Matrix::Identity(4, 4) / 4.0) < 1e-15);
  }

  TEST_CASE("random pure chains") {
    const auto prod = build_random_pure(2, 1, 4);
    CHECK(prod.bond_dims() == std::vector<std::int64_t>{1});
    CHECK(purity(prod) == doctest::Approx(1.0).epsilon(1e-12));

    const auto c = build_random_pure(8, 8, 7);
    CHECK(std::abs(purity(c) - 1.0) < 1e-10);
    CHECK(std::abs(trace(c) - 1.0) < 1e-10);
    CHECK(c.bond_dims() == std::vector<std::int64_t>{2, 4, 8, 8, 8, 4, 2});
    for (auto k : c.kraus_dims()) CHECK(k == 1);
    CHECK(c.same_values(build_random_pure(8, 8, 7)));
    CHECK_FALSE(c.same_values(build_random_pure(8, 8, 8)));

    const Matrix rho = dense(build_random_pure(5, 4, 2));
    CHECK(std::abs((rho * rho).trace().real() - 1.0) < 1e-10);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
  }

  TEST_CASE("canonicalize keeps rho and builds isometries") {
    const auto base = depolarize_to_lpmm(build_random_pure(6, 4, 3));
    const Matrix rho = dense(base);
    for (std::size_t center = 0; center < 6; ++center) {
      const auto c = canonicalize(base, center);
      CHECK(c.center() == center);
      CHECK(max_abs_diff(dense(c), rho) < 1e-12);
      for (std::size_t i = 0; i < center; ++i) CHECK(left_iso_error(c, i) < 1e-10);
      for (std::size_t i = center + 1; i < 6; ++i) CHECK(right_iso_error(c, i) < 1e-10);
    }
    const auto moved = move_center(move_center(canonicalize(base, 2), 3), 2);
    CHECK(max_abs_diff(dense(moved), rho) < 1e-10);
    const auto opt = canonicalize(build_optimal_lpmm(4), 1);
    CHECK(max_abs_diff(dense(opt), Matrix::Identity(16, 16) / 16.0) < 1e-14);
    const auto pure = build_random_pure(7, 4, 1);
    CHECK(std::abs(purity(canonicalize(pure, 3)) - purity(pure)) < 1e-12);
  }

  TEST_CASE("two-site block") {
    const auto c = build_optimal_lpmm(3);
    const DenseTensor b = two_site_block(c, 0);
    REQUIRE(b.rank() == 6);
    CHECK(b.norm() == doctest::Approx(1.0).epsilon(1e-14));
    // (1/sqrt2)^2 delta(s1, k1) delta(s2, k2)
    for (std::int64_t s1 = 0; s1 < 2; ++s1)
      for (std::int64_t s2 = 0; s2 < 2; ++s2)
        for (std::int64_t k1 = 0; k1 < 2; ++k1)
          for (std::int64_t k2 = 0; k2 < 2; ++k2)
            CHECK(std::abs(b.at({s1, s2, 0, 0, k1, k2}) -
                           ((s1 == k1 && s2 == k2) ? 0.5 : 0.0)) < 1e-15);
    CHECK_THROWS_AS(two_site_block(c, 1), PreconditionError);

    const auto sub = canonicalize(depolarize_to_lpmm(build_random_pure(5, 4, 9)), 2);
    const auto split = split_block(sub, 2, two_site_block(sub, 2), TruncationPolicy::l2(0.0));
    CHECK(max_abs_diff(dense(split.chain), dense(sub)) < 1e-10);
  }

  TEST_CASE("unitaries") {
    const auto c = canonicalize(depolarize_to_lpmm(build_random_pure(4, 4, 2)), 0);
    const Matrix rho = dense(c);
    CHECK(max_abs_diff(dense(apply_unitary(c, 1, Matrix::Identity(2, 2))), rho) < 1e-14);
    CHECK(max_abs_diff(dense(apply_unitary(c, 1, 2, Matrix::Identity(4, 4),
                                           TruncationPolicy::l2(1e-14))),
                       rho) < 1e-12);

    Vector zero(2);
    zero << 1.0, 0.0;
    const auto z = build_product_pure({zero});
    const Matrix flipped = dense(apply_unitary(z, 0, pauli_x()));
    CHECK(std::abs(flipped(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(flipped(0, 0)) < 1e-15);

    // One-site update leaves all dims alone.
    const auto one = apply_unitary(c, 2, lpdo::testing::hadamard());
    CHECK(one.bond_dims() == c.bond_dims());
    CHECK(one.kraus_dims() == c.kraus_dims());

    const auto lpmm = build_optimal_lpmm(4);
    const auto grown = apply_unitary(lpmm, 1, 2, lpdo::testing::cnot(), TruncationPolicy::l2(1e-10));
    CHECK(grown.bond_dim(1) == 2);
    CHECK(max_abs_diff(dense(grown), Matrix::Identity(16, 16) / 16.0) < 1e-12);

    CHECK_THROWS_AS(apply_unitary(c, 0, 2, lpdo::testing::cnot(), TruncationPolicy::l2(0.0)),
                    PreconditionError);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(apply_unitary(c, 0, bad), PreconditionError);
  }

  TEST_CASE("unitaries match the dense oracle") {
    std::mt19937_64 rng(17);
    auto c = build_random_pure(5, 4, 5);
    auto rho = oracle::lpdo_to_dense(c);
    for (int j = 0; j < 10; ++j) {
      const std::size_t a = static_cast<std::size_t>(j % 4);
      const Matrix u = random_unitary(4, rng);
      c = apply_unitary(c, a, a + 1, u, TruncationPolicy::l2(0.0));
      rho = oracle::dense_apply(rho, u, {a, a + 1});
    }
    CHECK(max_abs_diff(dense(c), rho.matrix) < 1e-10);
  }
}

TEST_SUITE("channel") {
  TEST_CASE("kraus completeness") {
    for (double g : {0.0, 0.3, 0.5, 1.0}) {
      CHECK(bitflip(g).completeness_error() < 1e-14);
      CHECK(dephasing(g).completeness_error() < 1e-14);
      CHECK(amplitude_damping(g).completeness_error() < 1e-14);
    }
    CHECK_THROWS(bitflip(1.5));
    KrausChannel broken{{Matrix::Identity(2, 2) * 0.9}, "broken"};
    CHECK_THROWS_AS(apply_channel(build_optimal_lpmm(2), 0, broken, default_kraus_policy()),
                    PreconditionError);
    CHECK_THROWS(apply_channel(build_optimal_lpmm(2), 0, bitflip(0.1), TruncationPolicy::l2(0.0)));
  }

  TEST_CASE("full dephasing and bitflip give the identity over two") {
    Vector plus(2), zero(2);
    plus << 1.0, 1.0;
    zero << 1.0, 0.0;
    const Matrix half = Matrix::Identity(2, 2) / 2.0;
    const auto deph = apply_channel(build_product_pure({plus}), 0, dephasing(0.5),
                                    default_kraus_policy());
    CHECK(max_abs_diff(dense(deph), half) < 1e-14);
    const auto flip = apply_channel(build_product_pure({zero}), 0, bitflip(0.5),
                                    default_kraus_policy());
    CHECK(max_abs_diff(dense(flip), half) < 1e-14);
  }

  TEST_CASE("identity channel keeps rho and kappa") {
    const auto c = depolarize_to_lpmm(build_random_pure(4, 4, 6));
    const auto same = apply_channel(c, 2, bitflip(0.0), default_kraus_policy());
    CHECK(same.kraus_dims() == c.kraus_dims());
    CHECK(max_abs_diff(dense(same), dense(c)) < 1e-12);
  }

  TEST_CASE("dephasing scales coherences by 1 - 2 gamma") {
    Vector plus(2);
    plus << 1.0, 1.0;
    const auto c = apply_channel(build_product_pure({plus}), 0, dephasing(0.2),
                                 default_kraus_policy());
    CHECK(std::abs(dense(c)(0, 1) - 0.5 * 0.6) < 1e-14);
    const auto r = oracle::dense_apply(oracle::lpdo_to_dense(build_product_pure({plus})),
                                       dephasing(0.2), 0);
    CHECK(std::abs(r.matrix(0, 1) - 0.3) < 1e-14);
  }

  TEST_CASE("depolarization reaches the maximally mixed state with bonds unchanged") {
    const auto pure = build_random_pure(8, 8, 3);
    const auto sub = depolarize_to_lpmm(pure);
    CHECK(sub.bond_dims() == pure.bond_dims());
    CHECK(sub.chi_mean() == pure.chi_mean());
    CHECK(std::abs(fidelity_p(sub, build_optimal_lpmm(8)).fidelity - 1.0) < 1e-10);
    CHECK(std::abs(purity(sub) - std::pow(2.0, -8)) < 1e-10);
    CHECK(std::abs(trace(sub) - 1.0) < 1e-10);

    const auto fixed = depolarize_to_lpmm(build_optimal_lpmm(5));
    CHECK(fixed.kraus_dims() == std::vector<std::int64_t>(5, 2));
    CHECK(fixed.bond_dims() == std::vector<std::int64_t>(4, 1));
    CHECK(max_abs_diff(dense(fixed), Matrix::Identity(32, 32) / 32.0) < 1e-14);
  }

  TEST_CASE("random programs agree with the oracle") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const std::size_t n = 2 + seed % 5;
      const auto prog = lpdo::testing::random_program(n, 15, seed);
      const auto start = build_random_pure(n, 4, seed);
      const auto chain = lpdo::testing::run_on_chain(start, prog);
      const auto rho = lpdo::testing::run_on_oracle(oracle::lpdo_to_dense(start), prog);
      CHECK(max_abs_diff(dense(chain), rho.matrix) < 1e-9);
      CHECK(std::abs(trace(chain) - 1.0) < 1e-10);
      CHECK(oracle::lpdo_to_dense(chain).min_eigenvalue() >= -1e-10);
    }
  }
}

TEST_SUITE("measures") {
  TEST_CASE("transfer contractions match the oracle") {
    const auto a = depolarize_to_lpmm(build_random_pure(6, 4, 1));
    const auto b = lpdo::testing::run_on_chain(
        build_random_pure(6, 4, 2), lpdo::testing::random_program(6, 12, 2));
    const auto m = oracle::dense_measures(oracle::lpdo_to_dense(b), oracle::lpdo_to_dense(a));
    CHECK(std::abs(trace(b) - m.trace_a) < 1e-10);
    CHECK(std::abs(purity(b) - m.purity_a) < 1e-10);
    CHECK(std::abs(purity(a) - std::pow(2.0, -6)) < 1e-10);
    const auto f = fidelity_p(b, a);
    CHECK(std::abs(f.overlap - m.overlap) < 1e-10);
    CHECK(std::abs(f.fidelity - m.fidelity) < 1e-10);
    CHECK(f.fidelity <= 1.0 + 1e-9);
    CHECK(std::abs(fidelity_p(b, b).fidelity - 1.0) < 1e-10);
  }

  TEST_CASE("pure state against the maximally mixed qubit") {
    Vector zero(2);
    zero << 1.0, 0.0;
    // Tr[|0><0| 1/2] / max(1, 1/2) = 1/2
    const auto f = fidelity_p(build_product_pure({zero}), build_optimal_lpmm(1));
    CHECK(f.fidelity == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(fidelity_p(build_optimal_lpmm(2), build_optimal_lpmm(3)), DimensionError);
  }

  TEST_CASE("weak symmetry of the maximally mixed state") {
    std::mt19937_64 rng(4);
    const auto lpmm = build_optimal_lpmm(5);
    auto c = lpmm;
    for (int j = 0; j < 6; ++j) {
      const std::size_t a = static_cast<std::size_t>(j % 4);
      c = apply_unitary(c, a, a + 1, random_unitary(4, rng), TruncationPolicy::l2(1e-14));
    }
    CHECK(std::abs(fidelity_p(c, lpmm).fidelity - 1.0) < 1e-10);
  }

  TEST_CASE("kraus gauge invariance") {
    std::mt19937_64 rng(8);
    const auto c = canonicalize(depolarize_to_lpmm(build_random_pure(6, 4, 4)), 0);
    auto g = c;
    for (std::size_t i = 0; i < 6; ++i) {
      const auto& t = g.site(i);
      const std::int64_t k = t.index(3).dim;
      const Matrix v = random_unitary(k, rng);
      const std::int64_t rows = static_cast<std::int64_t>(t.size()) / k;
      const Matrix out = Eigen::Map<const Matrix>(t.data().data(), rows, k) * v;
      g.set_site(i, DenseTensor(t.indices(), std::vector<cplx>(out.data(), out.data() + out.size())));
    }
    CHECK(std::abs(trace(g) - trace(c)) < 1e-10);
    CHECK(std::abs(purity(g) - purity(c)) < 1e-10);
    CHECK(std::abs(fidelity_p(g, c).fidelity - 1.0) < 1e-10);
  }

  TEST_CASE("oracle basics") {
    const auto mm = oracle::maximally_mixed(3);
    const auto m = oracle::dense_measures(mm, mm);
    CHECK(m.purity_a == doctest::Approx(1.0 / 8.0));
    CHECK(m.fidelity == doctest::Approx(1.0));
    std::mt19937_64 rng(2);
    const auto rot = oracle::dense_apply(mm, random_unitary(4, rng), {1, 2});
    CHECK(max_abs_diff(rot.matrix, mm.matrix) < 1e-14);
    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    CHECK(oracle::bipartite_entropy(bell, 2) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(oracle::lpdo_to_dense(build_optimal_lpmm(13)), ResourceError);
    // Qubit 0 is the most significant bit.
    Vector one(2), zero(2);
    one << 0.0, 1.0;
    zero << 1.0, 0.0;
    const Matrix r = dense(build_product_pure({one, zero}));
    CHECK(std::abs(r(2, 2) - 1.0) < 1e-15);
  }
}
