#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>

#include "fockdec/fock.hpp"
#include "fockdec/random.hpp"
#include "oracle.hpp"

using namespace fockdec;

namespace {

double max_abs_diff(const FockVector& a, const FockVector& b) {
  return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("basis anchor: e2 * e0 = +f5 at d = 4") {
  const ModeSpace ms(4);
  const FockVector p = psi_product(FockVector::single_mode(ms, 2), FockVector::single_mode(ms, 0));
  for (std::uint32_t mask = 0; mask < ms.mask_limit(); ++mask) {
    CHECK(p[mask] == (mask == 5u ? Complex(1.0) : Complex(0.0)));
  }
}

TEST_CASE("vacuum is the multiplicative identity") {
  const ModeSpace ms(3);
  const FockVector u = oracle::random_vector(ms, 11);
  const FockVector one = FockVector::vacuum_unit(ms);
  CHECK(max_abs_diff(psi_product(one, u), u) == 0.0);
  CHECK(max_abs_diff(psi_product(u, one), u) == 0.0);
}

TEST_CASE("repeated mode annihilates") {
  const ModeSpace ms(2);
  const FockVector e0 = FockVector::single_mode(ms, 0);
  CHECK(psi_product(e0, e0).norm() == 0.0);
}

TEST_CASE("odd states anticommute, graded sign in general") {
  const ModeSpace ms(4);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (int p = 0; p <= 3; ++p) {
      for (int q = 0; q <= 3; ++q) {
        const FockVector a = oracle::random_grade_state(ms, p, 100 + seed * 7 + p);
        const FockVector b = oracle::random_grade_state(ms, q, 200 + seed * 13 + q);
        const double sign = (p * q) % 2 ? -1.0 : 1.0;
        CHECK(max_abs_diff(psi_product(a, b), sign * psi_product(b, a)) < 1e-13);
      }
    }
  }
}

TEST_CASE("psi product is associative") {
  for (int d = 2; d <= 6; d += 2) {
    const ModeSpace ms(d);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const FockVector a = oracle::random_vector(ms, 300 + seed);
      const FockVector b = oracle::random_vector(ms, 310 + seed);
      const FockVector c = oracle::random_vector(ms, 320 + seed);
      CHECK(max_abs_diff(psi_product(psi_product(a, b), c),
                         psi_product(a, psi_product(b, c))) < 1e-12);
    }
  }
}

TEST_CASE("bitmask product matches the dense antisymmetrized construction") {
  for (int d = 1; d <= 4; ++d) {
    const ModeSpace ms(d);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const FockVector a = oracle::random_vector(ms, 400 + 2 * seed);
      const FockVector b = oracle::random_vector(ms, 401 + 2 * seed);
      CHECK(oracle::product_mismatch(a, b) < 1e-12);
    }
  }
}

TEST_CASE("even/odd split partitions by parity") {
  const ModeSpace ms(3);
  const FockVector u = oracle::random_vector(ms, 5);
  const auto [even, odd] = even_odd_split(u);
  CHECK(max_abs_diff(even + odd, u) == 0.0);
  CHECK(even[0] == u[0]);
  CHECK(odd[1] == u[1]);
  CHECK(even[1] == Complex(0.0));

  const FockVector vac = FockVector::vacuum_unit(ms);
  CHECK(even_part(vac).norm() == 1.0);
  CHECK(odd_part(vac).norm() == 0.0);
  CHECK(even_part(FockVector::single_mode(ms, 0)).norm() == 0.0);

  // Product of two odd states has even grade.
  const FockVector prod = psi_product(odd, odd_part(oracle::random_vector(ms, 6)));
  CHECK(odd_part(prod).norm() == 0.0);
}

TEST_CASE("symmetrized product: identity, associator, inverse pairing") {
  const ModeSpace ms(5);
  const FockVector one = FockVector::vacuum_unit(ms);
  const FockVector a = oracle::random_vector(ms, 21);
  CHECK(max_abs_diff(symmetrized_product(a, one), a) < 1e-15);

  const FockVector b = oracle::random_vector(ms, 22);
  const FockVector c = oracle::random_vector(ms, 23);
  CHECK(max_abs_diff(symmetrized_product(a, symmetrized_product(b, c)),
                     symmetrized_product(symmetrized_product(a, b), c)) < 1e-12);

  const FockVector u = oracle::random_invertible(ms, 24);
  CHECK(max_abs_diff(symmetrized_product(u, creator_inverse(u)), one) < 1e-12);
}

TEST_CASE("commutator: even factors drop out, equals twice the odd product") {
  const ModeSpace ms(4);
  const FockVector a = oracle::random_vector(ms, 31);
  const FockVector b = oracle::random_vector(ms, 32);

  CHECK(creator_commutator(even_part(a), b).norm() < 1e-14);
  CHECK(creator_commutator(a, a).norm() < 1e-14);
  CHECK(max_abs_diff(creator_commutator(a, b),
                     2.0 * psi_product(odd_part(a), odd_part(b))) < 1e-13);

  const FockVector e0 = FockVector::single_mode(ms, 0);
  const FockVector e1 = FockVector::single_mode(ms, 1);
  CHECK(max_abs_diff(creator_commutator(e0, e1), 2.0 * psi_product(e0, e1)) < 1e-15);
}

TEST_CASE("exponential: zero exponent, inverse pairing, sum rule") {
  const ModeSpace ms(4);
  CHECK(max_abs_diff(creator_exp(FockVector(ms)), FockVector::vacuum_unit(ms)) == 0.0);

  const FockVector x = oracle::random_vector(ms, 41, 0.7);
  CHECK(max_abs_diff(psi_product(creator_exp(x), creator_exp(-x)),
                     FockVector::vacuum_unit(ms)) < 1e-12);

  const FockVector y = oracle::random_vector(ms, 42, 0.7);
  CHECK(max_abs_diff(creator_exp(x + y),
                     symmetrized_product(creator_exp(x), creator_exp(y))) < 1e-12);
}

TEST_CASE("exponential matches the dense matrix series") {
  for (int d = 2; d <= 5; ++d) {
    const ModeSpace ms(d);
    const FockVector x = oracle::random_vector(ms, 50 + d, 0.6);
    const CreatorMatrix xm = creator_matrix(x);
    const FockVector via_matrix =
        state_from_graded_column(ms, oracle::dense_matrix_exp(xm.entries), xm.basis);
    CHECK(max_abs_diff(creator_exp(x), via_matrix) < 1e-12);
  }
}

TEST_CASE("logarithm: identity, round trip, dense series, failure on c0 = 0") {
  const ModeSpace ms(4);
  CHECK(creator_log(FockVector::vacuum_unit(ms)).norm() == 0.0);

  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const FockVector u = oracle::random_invertible(ms, 60 + seed);
    CHECK(max_abs_diff(creator_exp(creator_log(u)), u) < 1e-10);

    const CreatorMatrix um = creator_matrix(u);
    const FockVector via_matrix =
        state_from_graded_column(ms, oracle::dense_matrix_log(um.entries), um.basis);
    CHECK(max_abs_diff(creator_log(u), via_matrix) < 1e-10);
  }

  FockVector bad = oracle::random_vector(ms, 66);
  bad[0] = 0.0;
  CHECK_THROWS_AS(creator_log(bad), NonInvertibleError);
  CHECK_THROWS_AS(creator_inverse(bad), NonInvertibleError);
  CHECK_FALSE(is_invertible(bad));
}

TEST_CASE("inverse: scalars, the d = 2 top-state example, dense inverse oracle") {
  const ModeSpace ms2(2);
  FockVector scalar(ms2);
  scalar[0] = Complex(2.0, -1.0);
  const FockVector sinv = creator_inverse(scalar);
  CHECK(std::abs(sinv[0] - Complex(1.0) / Complex(2.0, -1.0)) < 1e-15);

  FockVector top = FockVector::vacuum_unit(ms2);
  top[3] = Complex(0.3, 0.4);
  const FockVector tinv = creator_inverse(top);
  CHECK(std::abs(tinv[0] - 1.0) < 1e-15);
  CHECK(std::abs(tinv[3] + Complex(0.3, 0.4)) < 1e-15);

  for (int d = 2; d <= 5; ++d) {
    const ModeSpace ms(d);
    const FockVector u = oracle::random_invertible(ms, 70 + d);
    const CreatorMatrix um = creator_matrix(u);
    const FockVector via_matrix =
        state_from_graded_column(ms, oracle::dense_matrix_inverse(um.entries), um.basis);
    CHECK(max_abs_diff(creator_inverse(u), via_matrix) < 1e-10);
    CHECK(max_abs_diff(psi_product(u, creator_inverse(u)), FockVector::vacuum_unit(ms)) < 1e-12);
  }
}

TEST_CASE("nilpotency: vacuum-free powers vanish beyond ceil(d/2)") {
  for (int d = 2; d <= 6; d += 2) {
    const ModeSpace ms(d);
    FockVector z = oracle::random_vector(ms, 80 + d);
    z[0] = 0.0;
    FockVector power = z;
    const int order = (d + 1) / 2;
    for (int n = 1; n < order; ++n) power = psi_product(z, power);
    CHECK(power.norm() > 0.0);  // order is tight
    power = psi_product(z, power);
    CHECK(power.max_abs() < 1e-14);
  }
}

TEST_CASE("creator matrix: d = 2 layout, triangularity, homomorphism") {
  const ModeSpace ms(2);
  FockVector u(ms);
  u[0] = Complex(1.0, 0.5);
  u[1] = Complex(-0.25, 2.0);
  u[2] = Complex(0.75, -1.0);
  u[3] = Complex(0.1, 0.2);
  const CreatorMatrix m = creator_matrix(u);

  // Graded order at d = 2 is (0, 1, 2, 3), so rows read
  // (c0,0,0,0), (c1,c0,0,0), (c2,0,c0,0), (c3,c2,-c1,c0).
  Eigen::MatrixXcd expected(4, 4);
  expected << u[0], 0, 0, 0,
              u[1], u[0], 0, 0,
              u[2], 0, u[0], 0,
              u[3], u[2], -u[1], u[0];
  CHECK((m.entries - expected).cwiseAbs().maxCoeff() == 0.0);

  CHECK((creator_matrix(FockVector::vacuum_unit(ms)).entries -
         Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  for (int d = 2; d <= 5; ++d) {
    const ModeSpace msd(d);
    const FockVector a = oracle::random_vector(msd, 90 + d);
    const FockVector b = oracle::random_vector(msd, 95 + d);
    const CreatorMatrix ma = creator_matrix(a);
    const CreatorMatrix mb = creator_matrix(b);
    const CreatorMatrix mab = creator_matrix(psi_product(a, b));
    CHECK((ma.entries * mb.entries - mab.entries).cwiseAbs().maxCoeff() < 1e-12);

    // Exactly lower triangular with the vacuum amplitude on the diagonal.
    for (int r = 0; r < msd.dim(); ++r) {
      CHECK(ma.entries(r, r) == a[0]);
      for (int c = r + 1; c < msd.dim(); ++c) CHECK(ma.entries(r, c) == Complex(0.0));
    }
  }
}

TEST_CASE("inner product: orthonormal basis, positivity, cluster factorization") {
  const ModeSpace ms(4);
  for (std::uint32_t i = 0; i < ms.mask_limit(); ++i) {
    for (std::uint32_t j = 0; j < ms.mask_limit(); ++j) {
      const Complex val = inner_product(FockVector::basis_state(ms, i),
                                        FockVector::basis_state(ms, j));
      CHECK(val == (i == j ? Complex(1.0) : Complex(0.0)));
    }
  }

  const FockVector u = oracle::random_vector(ms, 101);
  CHECK(inner_product(u, u).real() > 0.0);
  CHECK(std::abs(inner_product(u, u).imag()) < 1e-15);
  CHECK_THROWS_AS(FockVector(ms).normalized(), Error);

  // States supported on complementary mode sets have factorizing overlaps.
  const ModeSpace ms6(6);
  const std::uint32_t low = 0b000111, high = 0b111000;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    FockVector s(ms6), t(ms6), uu(ms6), vv(ms6);
    RandomSource rng(700 + seed);
    for (std::uint32_t mask = 0; mask < ms6.mask_limit(); ++mask) {
      if ((mask & ~low) == 0) {
        s[mask] = rng.complex_gaussian();
        uu[mask] = rng.complex_gaussian();
      }
      if ((mask & ~high) == 0) {
        t[mask] = rng.complex_gaussian();
        vv[mask] = rng.complex_gaussian();
      }
    }
    const Complex lhs = inner_product(psi_product(s, t), psi_product(uu, vv));
    const Complex rhs = inner_product(s, uu) * inner_product(t, vv);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("mode mismatch is rejected") {
  const FockVector a{ModeSpace(2)};
  const FockVector b{ModeSpace(3)};
  CHECK_THROWS_AS(psi_product(a, b), ModeMismatchError);
  CHECK_THROWS_AS(inner_product(a, b), ModeMismatchError);
}

TEST_CASE("mode space bounds") {
  CHECK_THROWS_AS(ModeSpace(0), Error);
  CHECK_THROWS_AS(ModeSpace(17), Error);
  CHECK(ModeSpace(16).dim() == 65536);
  CHECK_THROWS_AS(FockVector::basis_state(ModeSpace(2), 4), Error);
  CHECK_THROWS_AS(FockVector::single_mode(ModeSpace(2), 2), Error);
}

TEST_CASE("relative invertibility tolerance is scale free") {
  const ModeSpace ms(3);
  FockVector u = oracle::random_vector(ms, 120);
  u[0] = Complex(1e-6, 0.0);  // small but resolvable vacuum amplitude
  CHECK(is_invertible(u));
  CHECK(is_invertible(Complex(1e-30) * u));
  CHECK(is_invertible(Complex(1e+30) * u));

  u[0] = Complex(1e-15, 0.0);  // below the relative threshold
  CHECK_FALSE(is_invertible(u));
  CHECK_FALSE(is_invertible(Complex(1e+30) * u));
}
