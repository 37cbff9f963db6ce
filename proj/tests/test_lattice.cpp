#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "bdf/errors.hpp"
#include "bdf/lattice.hpp"

using namespace bdf;

namespace {

// Count ball modes by brute force over the axis box.
int count_ball(int points, double spacing, double cutoff) {
  const int span = points / 2;
  int n = 0;
  for (int x = -span; x <= span; ++x)
    for (int y = -span; y <= span; ++y)
      for (int z = -span; z <= span; ++z)
        if (spacing * std::sqrt(double(x * x + y * y + z * z)) <=
            cutoff * (1.0 + 1e-12))
          ++n;
  return n;
}

DensityField random_field(const LatticePtr& lat, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DensityField f(lat);
  for (int d = 0; d < lat->diff_count(); ++d) f[d] = cxd(g(rng), g(rng));
  return f;
}

}  // namespace

TEST_CASE("energy scale") {
  CHECK(energy_scale(0.0) == 1.0);
  CHECK(energy_scale(Vec3(3.0, 0.0, 4.0)) == doctest::Approx(std::sqrt(26.0)));
  CHECK(energy_scale(2.0) * energy_scale(2.0) == doctest::Approx(5.0));
}

TEST_CASE("mode counts match brute force") {
  for (auto [p, s, c] : {std::tuple{2, 1.0, 1.0}, {4, 1.0, 2.0}, {6, 1.0, 3.0},
                         {6, 0.7, 1.4}, {8, 0.5, 2.0}}) {
    const auto lat = Lattice::create({p, s, c});
    CHECK(lat->mode_count() == count_ball(p, s, c));
  }
  CHECK(Lattice::create({2, 1.0, 1.0})->mode_count() == 7);
  CHECK(Lattice::create({4, 1.0, 2.0})->mode_count() == 33);
  CHECK(Lattice::create({6, 1.0, 3.0})->mode_count() == 123);
  CHECK(Lattice::create({8, 1.0, 4.0})->mode_count() == 257);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(Lattice::create({3, 1.0, 1.0}), ConfigError);   // odd
  CHECK_THROWS_AS(Lattice::create({0, 1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(Lattice::create({4, -1.0, 1.0}), ConfigError);  // bad spacing
  CHECK_THROWS_AS(Lattice::create({4, 1.0, 0.0}), ConfigError);   // bad cutoff
  CHECK_THROWS_AS(Lattice::create({4, 1.0, 5.0}), ConfigError);   // ball exceeds box
  CHECK_NOTHROW(Lattice::create({4, 1.0, 2.0 * (1.0 + 5e-13)}));  // tie slack
}

TEST_CASE("mode indexing and negation") {
  const auto lat = Lattice::create({6, 0.7, 2.1});
  for (int i = 0; i < lat->mode_count(); ++i) {
    const auto& c = lat->mode_coords(i);
    CHECK(lat->mode_index(c[0], c[1], c[2]) == i);
    CHECK((lat->mode(i) - 0.7 * Vec3(c[0], c[1], c[2])).norm() == 0.0);
    const int j = lat->mode_negation(i);
    CHECK(lat->mode_negation(j) == i);
    CHECK((lat->mode(j) + lat->mode(i)).norm() == 0.0);
  }
  CHECK(lat->mode_index(99, 0, 0) == -1);
}

TEST_CASE("modes are lexicographically ordered") {
  const auto lat = Lattice::create({4, 1.0, 2.0});
  for (int i = 1; i < lat->mode_count(); ++i)
    CHECK(lat->mode_coords(i - 1) < lat->mode_coords(i));
}

TEST_CASE("difference set covers all pairs exactly once") {
  const auto lat = Lattice::create({4, 1.0, 2.0});
  const int m = lat->mode_count();
  // every pair difference is a valid diff mode and diff_of agrees with coords
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const int d = lat->diff_of(a, b);
      REQUIRE(d >= 0);
      CHECK((lat->diff(d) - (lat->mode(a) - lat->mode(b))).norm() == 0.0);
    }
  // pair lists partition the full index square
  long total = 0;
  std::set<std::pair<int, int>> seen;
  for (int d = 0; d < lat->diff_count(); ++d) {
    for (auto [a, b] : lat->pairs(d)) {
      CHECK(lat->diff_of(a, b) == d);
      seen.insert({a, b});
    }
    total += static_cast<long>(lat->pairs(d).size());
  }
  CHECK(total == static_cast<long>(m) * m);
  CHECK(seen.size() == static_cast<size_t>(total));
  // zero diff holds the diagonal
  CHECK(static_cast<int>(lat->pairs(lat->zero_diff()).size()) == m);
  CHECK(lat->diff(lat->zero_diff()).norm() == 0.0);
  // negation is an involution on diffs
  for (int d = 0; d < lat->diff_count(); ++d) {
    CHECK(lat->diff_negation(lat->diff_negation(d)) == d);
    CHECK((lat->diff(lat->diff_negation(d)) + lat->diff(d)).norm() == 0.0);
  }
}

TEST_CASE("gaussian source density") {
  const auto lat = Lattice::create({6, 0.5, 1.5});
  const SourceSpec src{SourceSpec::Profile::gaussian, 2.0, 1.3};
  const DensityField n = source_density(lat, src);
  const double zero_mode = 2.0 * std::pow(2.0 * M_PI, -1.5);
  CHECK(std::abs(n[lat->zero_diff()] - zero_mode) < 1e-15);
  for (int d = 0; d < lat->diff_count(); ++d) {
    const double expected =
        2.0 * std::pow(2.0 * M_PI, -1.5) *
        std::exp(-0.5 * 1.3 * 1.3 * lat->diff(d).squaredNorm());
    CHECK(n[d].real() == doctest::Approx(expected).epsilon(1e-14));
    CHECK(n[d].imag() == 0.0);
    // real even profile: the hat is even
    CHECK(n[lat->diff_negation(d)] == n[d]);
  }
}

TEST_CASE("coulomb product") {
  const auto lat = Lattice::create({4, 0.8, 1.6});
  std::mt19937_64 rng(7);
  const DensityField f = random_field(lat, rng);
  const DensityField g = random_field(lat, rng);

  // oracle: 4 pi dv sum_{k != 0} conj(f) g / k^2, real part
  cxd acc = 0.0;
  for (int d = 0; d < lat->diff_count(); ++d) {
    if (d == lat->zero_diff()) continue;
    acc += std::conj(f[d]) * g[d] / lat->diff(d).squaredNorm();
  }
  CHECK(coulomb_product(f, g) ==
        doctest::Approx(4.0 * M_PI * lat->dv() * acc.real()).epsilon(1e-12));

  CHECK(coulomb_product(f, f) > 0.0);  // positive definite off the zero mode
  // symmetry of the real part
  CHECK(coulomb_product(f, g) == doctest::Approx(coulomb_product(g, f)).epsilon(1e-12));
  // zero mode is excluded: shifting it changes nothing
  DensityField f2 = f;
  f2[lat->zero_diff()] += cxd(3.0, -1.0);
  CHECK(coulomb_product(f2, g) == doctest::Approx(coulomb_product(f, g)).epsilon(1e-12));
}

TEST_CASE("norms and the potential isometry") {
  const auto lat = Lattice::create({4, 0.8, 1.6});
  std::mt19937_64 rng(11);
  const DensityField rho = random_field(lat, rng);

  // c_norm oracle
  double acc = 0.0;
  for (int d = 0; d < lat->diff_count(); ++d) {
    if (d == lat->zero_diff()) continue;
    const double k2 = lat->diff(d).squaredNorm();
    acc += (1.0 + k2) / k2 * std::norm(rho[d]);
  }
  CHECK(c_norm(rho) == doctest::Approx(std::sqrt(lat->dv() * acc)).epsilon(1e-12));

  // ||4 pi rho / k^2||_Y = 4 pi ||rho||_C exactly
  const DensityField phi = coulomb_potential(rho);
  CHECK(y_norm(phi) == doctest::Approx(4.0 * M_PI * c_norm(rho)).epsilon(1e-12));

  // dual pairing bound: |<zeta, rho>_dv| <= ||zeta||_C' ||rho||_C  (k != 0)
  const DensityField zeta = random_field(lat, rng);
  cxd pair = 0.0;
  for (int d = 0; d < lat->diff_count(); ++d) {
    if (d == lat->zero_diff()) continue;
    pair += std::conj(zeta[d]) * rho[d];
  }
  CHECK(std::abs(pair) * lat->dv() <= c_dual_norm(zeta) * c_norm(rho) * (1.0 + 1e-12));
}

TEST_CASE("field arithmetic") {
  const auto lat = Lattice::create({2, 1.0, 1.0});
  std::mt19937_64 rng(3);
  const DensityField a = random_field(lat, rng);
  const DensityField b = random_field(lat, rng);
  DensityField c = a;
  c += b;
  c -= a;
  for (int d = 0; d < lat->diff_count(); ++d) CHECK(std::abs(c[d] - b[d]) < 1e-14);
  const DensityField s = 2.0 * a;
  for (int d = 0; d < lat->diff_count(); ++d) CHECK(std::abs(s[d] - 2.0 * a[d]) < 1e-14);
  const DensityField m = -a;
  for (int d = 0; d < lat->diff_count(); ++d) CHECK(std::abs(m[d] + a[d]) == 0.0);
}

TEST_CASE("lattice identity checks") {
  const auto l1 = Lattice::create({4, 1.0, 2.0});
  const auto l2 = Lattice::create({4, 1.0, 2.0});
  const auto l3 = Lattice::create({4, 0.5, 1.0});
  CHECK_NOTHROW(require_same_lattice(l1, l1, "t"));
  CHECK_NOTHROW(require_same_lattice(l1, l2, "t"));  // equal specs suffice
  CHECK_THROWS_AS(require_same_lattice(l1, l3, "t"), LatticeMismatch);
}
