#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "tsvflab/bell.hpp"
#include "tsvflab/errors.hpp"

using namespace tsvf;
using tsvf_test::random_state;
using tsvf_test::seeded_rng;

namespace {

constexpr double kPi = std::numbers::pi;
const double kTsirelson = 2.0 * std::numbers::sqrt2;

const MeasurementSetting kZ{0.0, 0.0};
const MeasurementSetting kX{kPi / 2.0, 0.0};
const MeasurementSetting kY{kPi / 2.0, kPi / 2.0};

MeasurementSetting random_setting(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Uniform over the sphere: cosθ uniform in [−1, 1].
  const double theta = std::acos(2.0 * u01(rng) - 1.0);
  const double phi = 2.0 * kPi * u01(rng);
  return MeasurementSetting{theta, phi};
}

}  // namespace

TEST_CASE("settings map to unit Bloch directions") {
  CHECK(kZ.direction()[2] == doctest::Approx(1.0));
  CHECK(kX.direction()[0] == doctest::Approx(1.0));
  CHECK(kY.direction()[1] == doctest::Approx(1.0));
  auto rng = seeded_rng(11);
  for (int i = 0; i < 10; ++i) {
    const auto n = random_setting(rng).direction();
    CHECK(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("observable along a direction squares to the identity") {
  auto rng = seeded_rng(22);
  for (int i = 0; i < 5; ++i) {
    const Operator o = observable(random_setting(rng));
    CHECK(o.structure().hermitian);
    CHECK(o.structure().unitary);
    CHECK((o.entries() * o.entries() - Eigen::MatrixXcd::Identity(2, 2))
              .norm() < 1e-12);
  }
}

TEST_CASE("axis correlators of the two maximally entangled pairs") {
  const StateVector phi = phi_plus();
  CHECK(correlator(phi, kZ, kZ) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(correlator(phi, kX, kX) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(correlator(phi, kY, kY) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(correlator(phi, kZ, kX)) < 1e-12);

  const StateVector psi = psi_plus();
  CHECK(correlator(psi, kZ, kZ) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(correlator(psi, kX, kX) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(correlator(psi, kY, kY) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlators ignore a global phase") {
  const StateVector phi = phi_plus();
  const StateVector rotated(Complex(std::polar(1.0, 1.234)) *
                            phi.amplitudes());
  auto rng = seeded_rng(33);
  for (int i = 0; i < 10; ++i) {
    const MeasurementSetting a = random_setting(rng);
    const MeasurementSetting b = random_setting(rng);
    CHECK(correlator(phi, a, b) ==
          doctest::Approx(correlator(rotated, a, b)).epsilon(1e-12));
  }
}

TEST_CASE("chsh is exactly the three-plus-one correlator combination") {
  auto rng = seeded_rng(44);
  const StateVector state = random_state(rng, 4);
  const MeasurementSetting a = random_setting(rng);
  const MeasurementSetting ap = random_setting(rng);
  const MeasurementSetting b = random_setting(rng);
  const MeasurementSetting bp = random_setting(rng);

  const ChshResult r = chsh(state, a, ap, b, bp);
  CHECK(r.correlators[0] == doctest::Approx(correlator(state, a, b)));
  CHECK(r.correlators[1] == doctest::Approx(correlator(state, a, bp)));
  CHECK(r.correlators[2] == doctest::Approx(correlator(state, ap, b)));
  CHECK(r.correlators[3] == doctest::Approx(correlator(state, ap, bp)));
  CHECK(r.s == doctest::Approx(r.correlators[0] + r.correlators[1] +
                               r.correlators[2] - r.correlators[3]));
}

TEST_CASE("textbook settings reach the quantum maximum") {
  // a = ẑ, a′ = x̂, b = (ẑ+x̂)/√2, b′ = (ẑ−x̂)/√2.
  const MeasurementSetting b{kPi / 4.0, 0.0};
  const MeasurementSetting bp{kPi / 4.0, kPi};  // (ẑ−x̂)/√2
  const ChshResult r = chsh(phi_plus(), kZ, kX, b, bp);
  CHECK(r.s == doctest::Approx(kTsirelson).epsilon(1e-12));
}

TEST_CASE("degenerate and factorized settings cannot violate") {
  // All four settings equal: S = 2E(a,a) ≤ 2.
  auto rng = seeded_rng(55);
  for (int i = 0; i < 10; ++i) {
    const MeasurementSetting a = random_setting(rng);
    const ChshResult r = chsh(phi_plus(), a, a, a, a);
    CHECK(r.s == doctest::Approx(2.0 * r.correlators[0]).epsilon(1e-12));
    CHECK(std::abs(r.s) <= 2.0 + 1e-12);
  }

  // Product state, the classical pattern E = (1,1,1,1): S = 2 exactly.
  const StateVector product =
      tensor(StateVector::basis(2, 0), StateVector::basis(2, 0));
  const ChshResult aligned = chsh(product, kZ, kZ, kZ, kZ);
  CHECK(aligned.s == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("optimizer reaches the Tsirelson maximum on both pairs") {
  const ChshResult phi = optimize_chsh(phi_plus());
  CHECK(std::abs(phi.s) == doctest::Approx(kTsirelson).epsilon(1e-6));
  for (double e : phi.correlators) {
    CHECK(std::abs(e) == doctest::Approx(std::numbers::sqrt2 / 2.0)
                             .epsilon(1e-5));
  }

  const ChshResult psi = optimize_chsh(psi_plus());
  CHECK(std::abs(psi.s) == doctest::Approx(kTsirelson).epsilon(1e-6));

  // The two states are local-unitary equivalent, so their achieved
  // maxima agree even though the optimal planes differ.
  CHECK(std::abs(phi.s) == doctest::Approx(std::abs(psi.s)).epsilon(1e-6));
}

TEST_CASE("optimizer dominates random settings and is deterministic") {
  auto rng = seeded_rng(66);
  for (int rep = 0; rep < 5; ++rep) {
    const StateVector state = random_state(rng, 4);
    const double best = std::abs(optimize_chsh(state).s);
    for (int i = 0; i < 20; ++i) {
      const double sampled =
          std::abs(chsh(state, random_setting(rng), random_setting(rng),
                        random_setting(rng), random_setting(rng))
                       .s);
      CHECK(best >= sampled - 1e-9);
    }
  }

  const ChshResult once = optimize_chsh(psi_plus());
  const ChshResult again = optimize_chsh(psi_plus());
  CHECK(once.s == again.s);
  CHECK(once.a.theta == again.a.theta);
  CHECK(once.b_prime.phi == again.b_prime.phi);
}

TEST_CASE("product states never beat the classical bound") {
  auto rng = seeded_rng(77);
  for (int i = 0; i < 20; ++i) {
    const StateVector product =
        tensor(random_state(rng, 2), random_state(rng, 2));
    CHECK(std::abs(optimize_chsh(product).s) <= 2.0 + 1e-9);
  }
}

TEST_CASE("partially entangled pairs follow the closed-form maximum") {
  // For α|e,g⟩ + β|g,e⟩ the correlation matrix is diag(2αβ, 2αβ, −1),
  // so the largest achievable S is 2·sqrt(1 + 4α²β²).
  for (double beta : {0.1, 0.3, 0.5, 1.0 / std::numbers::sqrt2, 0.9}) {
    const StateVector state = excited_ground_superposition(beta);
    const double alpha = std::sqrt(1.0 - beta * beta);
    const double expected =
        2.0 * std::sqrt(1.0 + 4.0 * alpha * alpha * beta * beta);
    CHECK(std::abs(optimize_chsh(state).s) ==
          doctest::Approx(expected).epsilon(1e-6));
  }

  // The edges of the weight range are product states: no violation.
  CHECK(std::abs(optimize_chsh(excited_ground_superposition(0.0)).s) <=
        2.0 + 1e-9);
  CHECK(std::abs(optimize_chsh(excited_ground_superposition(1.0)).s) <=
        2.0 + 1e-9);
  CHECK_THROWS_AS(excited_ground_superposition(-0.1), ValidationError);
  CHECK_THROWS_AS(excited_ground_superposition(1.1), ValidationError);

  // β = 1/√2 is exactly the symmetric pair.
  const StateVector even =
      excited_ground_superposition(1.0 / std::numbers::sqrt2);
  CHECK((even.amplitudes() - psi_plus().amplitudes()).norm() < 1e-12);
}

TEST_CASE("no state and settings exceed the quantum bound") {
  auto rng = seeded_rng(88);
  for (int i = 0; i < 10000; ++i) {
    const StateVector state = random_state(rng, 4);
    const ChshResult r = chsh(state, random_setting(rng),
                              random_setting(rng), random_setting(rng),
                              random_setting(rng));
    REQUIRE(std::abs(r.s) <= kTsirelson + 1e-9);
  }
}

TEST_CASE("bell functions require two qubits") {
  auto rng = seeded_rng(99);
  const StateVector wrong = random_state(rng, 3);
  CHECK_THROWS_AS(correlator(wrong, kZ, kX), DimensionError);
  CHECK_THROWS_AS(chsh(wrong, kZ, kX, kZ, kX), DimensionError);
  CHECK_THROWS_AS(optimize_chsh(wrong), DimensionError);
}
