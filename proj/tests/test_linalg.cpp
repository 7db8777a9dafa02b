#include <doctest.h>

#include "crprecoder/errors.hpp"
#include "crprecoder/linalg.hpp"
#include "support.hpp"

using namespace crp;
using testing::random_cmat;
using testing::random_hpd;

TEST_CASE("logdet of an HPD matrix matches an LU determinant") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 6; ++n) {
    const CMat a = random_hpd(rng, n, 0.05, 5.0);
    CHECK(logdet_hpd(a) == doctest::Approx(testing::logdet_lu(a)).epsilon(1e-12));
  }
}

TEST_CASE("logdet rejects indefinite input") {
  CMat a(2, 2);
  a << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(logdet_hpd(a), Error);
  CHECK_FALSE(is_positive_definite(a));
}

TEST_CASE("inverse and roots of HPD matrices") {
  std::mt19937_64 rng(12);
  const CMat a = random_hpd(rng, 5);
  CHECK((inverse_hpd(a) * a - CMat::Identity(5, 5)).norm() < 1e-12);
  const HermitianRoots r = hpd_roots(a);
  CHECK((r.sqrt * r.sqrt - a).norm() < 1e-12);
  CHECK((r.sqrt * r.inv_sqrt - CMat::Identity(5, 5)).norm() < 1e-12);
  CHECK((psd_sqrt(a) * psd_sqrt(a) - a).norm() < 1e-12);
}

TEST_CASE("psd_sqrt clamps tiny negative eigenvalues") {
  std::mt19937_64 rng(13);
  const CMat v = random_cmat(rng, 4, 2);
  CMat a = v * v.adjoint();
  a -= 1e-15 * CMat::Identity(4, 4);
  const CMat s = psd_sqrt(a);
  CHECK(hermitian_defect(s) < 1e-14);
  CHECK((s * s - a).norm() < 1e-10);
}

TEST_CASE("numerical rank of a constructed low-rank matrix") {
  std::mt19937_64 rng(14);
  for (int r = 0; r <= 4; ++r) {
    const CMat v = random_cmat(rng, 5, r);
    CHECK(psd_rank(v * v.adjoint(), 1e-8) == r);
  }
  CHECK(min_eigenvalue(CMat::Identity(3, 3) * 2.0) == doctest::Approx(2.0));
}

TEST_CASE("vstack concatenates rows and keeps column count for empty input") {
  std::mt19937_64 rng(15);
  const CMat a = random_cmat(rng, 2, 3), b = random_cmat(rng, 1, 3);
  const CMat s = vstack({a, b}, 3);
  CHECK(s.rows() == 3);
  CHECK((s.topRows(2) - a).norm() == 0.0);
  CHECK((s.bottomRows(1) - b).norm() == 0.0);
  CHECK(vstack({}, 4).rows() == 0);
  CHECK(vstack({}, 4).cols() == 4);
  CHECK_THROWS_AS(vstack({a, random_cmat(rng, 1, 2)}, 3), Error);
}
