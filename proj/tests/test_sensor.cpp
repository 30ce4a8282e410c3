#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "clam/geom.hpp"
#include "clam/sensor.hpp"

using namespace clam;
using sensor::BeamModelParams;
using sensor::CauseProfile;

namespace {

BeamModelParams paper_params() { return BeamModelParams{}; }

// Trapezoid quadrature of the continuous density at 1e-4 m steps.
double quadrature_mass(double z_star, const BeamModelParams& p) {
  const double h = 1e-4;
  const int n = static_cast<int>(std::round(p.z_max_range / h));
  double sum = 0.5 * (sensor::beam_density_continuous(0.0, z_star, p) +
                      sensor::beam_density_continuous(p.z_max_range, z_star, p));
  for (int i = 1; i < n; ++i)
    sum += sensor::beam_density_continuous(i * h, z_star, p);
  return sum * h;
}

geom::RayTrace straight_trace(int cells, double resolution,
                              double first_entry) {
  geom::RayTrace t;
  t.resolution = resolution;
  for (int i = 0; i < cells; ++i) {
    t.cells.push_back(i);
    t.entry.push_back(first_entry + i * resolution);
  }
  t.terminal = first_entry + cells * resolution;
  return t;
}

}  // namespace

TEST_CASE("beam density normalizes to one") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    BeamModelParams p = paper_params();
    if (trial > 0) {
      double w[4] = {unit(rng), unit(rng), unit(rng), unit(rng)};
      const double sum = w[0] + w[1] + w[2] + w[3];
      p.z_hit = w[0] / sum;
      p.z_short = w[1] / sum;
      p.z_max = w[2] / sum;
      p.z_rand = w[3] / sum;
      p.sigma_hit = 0.02 + 0.2 * unit(rng);
      p.lambda_short = 0.1 + 2.0 * unit(rng);
    }
    const double z_star = 0.3 + (p.z_max_range - 0.4) * unit(rng);
    const double total = quadrature_mass(z_star, p) + p.z_max;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("max-range atom carries the z_max weight") {
  const BeamModelParams p = paper_params();
  const double hybrid = sensor::beam_density(p.z_max_range, 2.0, p);
  const double cont = sensor::beam_density_continuous(p.z_max_range, 2.0, p);
  CHECK(hybrid - cont == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("truncated gaussian peak matches the quadrature oracle") {
  BeamModelParams p = paper_params();
  p.z_hit = 1.0;
  p.z_short = p.z_max = p.z_rand = 0.0;
  const double z_star = 4.9;  // close to the limit so truncation matters
  // Oracle: untruncated peak divided by the numerically integrated mass of
  // the untruncated gaussian inside [0, z_max_range].
  const double h = 1e-4;
  double mass = 0.0;
  const int n = static_cast<int>(std::round(p.z_max_range / h));
  const auto untruncated = [&](double z) {
    const double u = (z - z_star) / p.sigma_hit;
    return std::exp(-0.5 * u * u) /
           (p.sigma_hit * std::sqrt(2.0 * geom::kPi));
  };
  mass += 0.5 * (untruncated(0.0) + untruncated(p.z_max_range));
  for (int i = 1; i < n; ++i) mass += untruncated(i * h);
  mass *= h;
  const double expected = untruncated(z_star) / mass;
  CHECK(sensor::beam_density(z_star, z_star, p) ==
        doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("short component has support only before the expected return") {
  BeamModelParams p = paper_params();
  p.z_short = 1.0;
  p.z_hit = p.z_max = p.z_rand = 0.0;
  CHECK(sensor::beam_density(3.0, 2.0, p) == 0.0);
  CHECK(sensor::beam_density(1.0, 2.0, p) > 0.0);
}

TEST_CASE("beam density domain errors") {
  const BeamModelParams p = paper_params();
  CHECK_THROWS_AS(sensor::beam_density(-0.1, 1.0, p), std::domain_error);
  CHECK_THROWS_AS(sensor::beam_density(5.1, 1.0, p), std::domain_error);
  CHECK_THROWS_AS(sensor::beam_density(1.0, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(sensor::beam_density(1.0, 6.0, p), std::domain_error);
}

TEST_CASE("cause profile hand cases") {
  const geom::RayTrace t = straight_trace(2, 0.2, 0.1);

  const double free_cells[] = {0.0, 0.0};
  const CauseProfile a = sensor::cause_profile(t, free_cells);
  CHECK(a.no_hit == 1.0);
  CHECK(a.cause[0] == 0.0);
  CHECK(a.cause[1] == 0.0);

  const double opaque_first[] = {1.0, 0.3};
  const CauseProfile b = sensor::cause_profile(t, opaque_first);
  CHECK(b.cause[0] == 1.0);
  CHECK(b.cause[1] == 0.0);
  CHECK(b.no_hit == 0.0);

  const double half[] = {0.5, 0.5};
  const CauseProfile c = sensor::cause_profile(t, half);
  CHECK(c.cause[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.cause[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c.no_hit == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c.range[0] == doctest::Approx(0.2));
  CHECK(c.range[1] == doctest::Approx(0.4));
}

TEST_CASE("cause profile of an empty trace is pure no-hit") {
  geom::RayTrace t;
  t.resolution = 0.2;
  const CauseProfile p = sensor::cause_profile(t, {});
  CHECK(p.no_hit == 1.0);
  CHECK(p.cause.empty());
}

TEST_CASE("cause profile matches the product-expansion oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 30);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    const geom::RayTrace t = straight_trace(n, 0.2, 0.1);
    std::vector<double> occ(n);
    for (double& e : occ) e = unit(rng);
    const CauseProfile profile = sensor::cause_profile(t, occ);

    double sum = profile.no_hit;
    for (int i = 0; i < n; ++i) {
      // Independent product expansion, from scratch per cell.
      double transparent = 1.0;
      for (int j = 0; j < i; ++j) transparent *= 1.0 - occ[j];
      CHECK(profile.cause[i] == occ[i] * transparent);
      sum += profile.cause[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("beam likelihood positivity and bound") {
  const BeamModelParams p = paper_params();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(unit(rng) * 20);
    const geom::RayTrace t = straight_trace(n, 0.2, 0.1);
    std::vector<double> occ(n);
    for (double& e : occ) e = unit(rng);
    const CauseProfile profile = sensor::cause_profile(t, occ);
    const double z = unit(rng) * p.z_max_range;
    const double lik = sensor::beam_likelihood(z, profile, p);
    CHECK(lik > 0.0);
    // Convex combination of component densities.
    double max_component = sensor::beam_density(z, p.z_max_range, p);
    for (double r : profile.range)
      max_component = std::max(
          max_component, sensor::beam_density(z, std::min(r, p.z_max_range), p));
    CHECK(lik <= max_component + 1e-12);
  }
}

TEST_CASE("likelihood peaks at the cell the profile is concentrated on") {
  const BeamModelParams p = paper_params();
  const geom::RayTrace t = straight_trace(10, 0.2, 0.1);
  std::vector<double> occ(10, 0.0);
  occ[4] = 1.0;  // r_4 = 1.1 m
  const CauseProfile profile = sensor::cause_profile(t, occ);
  const double r4 = profile.range[4];
  double best_z = 0.0, best = -1.0;
  for (double z = 0.05; z < p.z_max_range; z += 0.1) {
    const double lik = sensor::beam_likelihood(z, profile, p);
    if (lik > best) {
      best = lik;
      best_z = z;
    }
  }
  CHECK(std::abs(best_z - r4) < 0.1);
}

TEST_CASE("beam_likelihood_given_cell reductions") {
  const BeamModelParams p = paper_params();
  const geom::RayTrace t = straight_trace(5, 0.2, 0.1);
  std::vector<double> occ = {0.2, 0.4, 0.6, 0.1, 0.5};
  const double z = 0.74;

  // Substituting the current expected value reproduces beam_likelihood.
  const CauseProfile profile = sensor::cause_profile(t, occ);
  const double base = sensor::beam_likelihood(z, profile, p);
  for (std::size_t i = 0; i < occ.size(); ++i)
    CHECK(sensor::beam_likelihood_given_cell(z, t, occ, i, occ[i], p) ==
          doctest::Approx(base).epsilon(1e-12));

  // Opaque first cell reduces to the plain density at its range.
  CHECK(sensor::beam_likelihood_given_cell(z, t, occ, 0, 1.0, p) ==
        doctest::Approx(sensor::beam_density(z, profile.range[0], p))
            .epsilon(1e-12));

  // Transparent single cell forces the no-hit density.
  const geom::RayTrace one = straight_trace(1, 0.2, 0.1);
  const std::vector<double> one_occ = {0.7};
  CHECK(sensor::beam_likelihood_given_cell(z, one, one_occ, 0, 0.0, p) ==
        doctest::Approx(sensor::beam_density(z, p.z_max_range, p))
            .epsilon(1e-12));

  CHECK_THROWS_AS(sensor::beam_likelihood_given_cell(z, t, occ, 9, 0.5, p),
                  std::domain_error);
}

TEST_CASE("belief-averaged likelihood equals expected-occupancy likelihood "
          "for single-cell traces") {
  const BeamModelParams p = paper_params();
  const geom::RayTrace t = straight_trace(1, 0.2, 0.1);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> mass(10);
    double sum = 0.0;
    for (double& m : mass) {
      m = unit(rng);
      sum += m;
    }
    for (double& m : mass) m /= sum;
    double expectation = 0.0;
    for (int b = 0; b < 10; ++b) expectation += mass[b] * (b + 0.5) / 10.0;
    const double z = unit(rng) * p.z_max_range;

    double averaged = 0.0;
    for (int b = 0; b < 10; ++b)
      averaged += mass[b] * sensor::beam_likelihood_given_cell(
                                z, t, std::vector<double>{expectation}, 0,
                                (b + 0.5) / 10.0, p);
    const std::vector<double> occ = {expectation};
    const double direct =
        sensor::beam_likelihood(z, sensor::cause_profile(t, occ), p);
    CHECK(averaged == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("affine evaluation agrees with beam_likelihood_given_cell") {
  const BeamModelParams p = paper_params();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(unit(rng) * 15);
    const geom::RayTrace t = straight_trace(n, 0.2, 0.1);
    std::vector<double> occ(n);
    for (double& e : occ) e = unit(rng);
    const double z = unit(rng) * p.z_max_range;
    const sensor::BeamAffine aff = sensor::beam_affine(z, t, occ, p);
    const CauseProfile profile = sensor::cause_profile(t, occ);
    CHECK(aff.at_expected ==
          doctest::Approx(sensor::beam_likelihood(z, profile, p))
              .epsilon(1e-12));
    for (int i = 0; i < n; ++i) {
      const double v = unit(rng);
      CHECK(aff.offset[i] + aff.slope[i] * v ==
            doctest::Approx(
                sensor::beam_likelihood_given_cell(z, t, occ, i, v, p))
                .epsilon(1e-11));
    }
  }
}

TEST_CASE("uniform bearings are strictly increasing and symmetric") {
  const std::vector<double> b = sensor::uniform_bearings(2.0 * geom::kPi, 10);
  REQUIRE(b.size() == 10);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i] > b[i - 1]);
  CHECK(b.front() == doctest::Approx(-geom::kPi + geom::kPi / 10.0));
  CHECK(b.back() == doctest::Approx(geom::kPi - geom::kPi / 10.0));
}
