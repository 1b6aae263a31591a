#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "helixqd/errors.hpp"
#include "helixqd/spectral.hpp"

using namespace helixqd;
using std::numbers::pi;

namespace {

std::vector<double> harmonic_samples(double half_width, int n) {
  std::vector<double> v(n);
  const double d = 2.0 * half_width / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double s = -half_width + i * d;
    v[i] = 0.5 * s * s;
  }
  return v;
}

SpectrumResult harmonic(int n, int order, double half_width = 12.0, double window = 15.0) {
  const double d = 2.0 * half_width / (n - 1);
  return eigen_spectrum(assemble_hamiltonian(harmonic_samples(half_width, n), 1.0, d, order),
                        window);
}

}  // namespace

TEST_CASE("stencil weights") {
  for (int order : {2, 4, 6, 8, 10, 12}) {
    const std::vector<double> c = second_derivative_stencil(order);
    REQUIRE(c.size() == static_cast<std::size_t>(order / 2 + 1));
    double constant = c[0];
    double quadratic = 0.0;
    double quartic = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      constant += 2.0 * c[k];
      quadratic += 2.0 * c[k] * k * k;
      quartic += 2.0 * c[k] * std::pow(k, 4);
    }
    CAPTURE(order);
    CHECK(std::abs(constant) < 1e-13);
    CHECK(quadratic == doctest::Approx(2.0).epsilon(1e-13));
    if (order >= 4) {
      CHECK(std::abs(quartic) < 1e-12);
    }
  }
  const std::vector<double> c2 = second_derivative_stencil(2);
  CHECK(c2[0] == -2.0);
  CHECK(c2[1] == 1.0);
  CHECK_THROWS_AS(second_derivative_stencil(3), InvalidArgument);
  CHECK_THROWS_AS(second_derivative_stencil(0), InvalidArgument);
}

TEST_CASE("stencil is exact on quadratics") {
  const int n = 41;
  const double d = 0.1;
  std::vector<double> zero(n, 0.0);
  const BandedSymmetricMatrix h = assemble_hamiltonian(zero, 1.0, d, 10);
  std::vector<double> ones(n, 1.0);
  std::vector<double> square(n);
  for (int i = 0; i < n; ++i) {
    square[i] = (i * d) * (i * d);
  }
  const std::vector<double> h1 = h.multiply(ones);
  const std::vector<double> h2 = h.multiply(square);
  for (int i = 5; i < n - 5; ++i) {
    CHECK(std::abs(h1[i]) < 1e-10);
    CHECK(h2[i] == doctest::Approx(-2.0).epsilon(1e-9));  // -(1/M) d^2/ds^2 of s^2
  }
}

TEST_CASE("banded matrix storage") {
  BandedSymmetricMatrix m(5, 2);
  m.at(0, 0) = 1.0;
  m.at(2, 1) = 3.0;
  CHECK(m.at(1, 2) == 3.0);
  CHECK(m.at(2, 1) == 3.0);
  CHECK_THROWS_AS(m.at(0, 4), InvalidArgument);
  CHECK_THROWS_AS(BandedSymmetricMatrix(0, 1), InvalidArgument);
  const std::vector<double> y = m.multiply(std::vector<double>{1, 1, 1, 1, 1});
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 3.0);
  CHECK(y[2] == 3.0);
  CHECK_THROWS_AS(m.multiply(std::vector<double>{1, 2}), InvalidArgument);
}

TEST_CASE("harmonic oscillator with kinetic p^2/M") {
  const SpectrumResult r = harmonic(1201, 10);
  REQUIRE(r.eigenvalues.size() >= 10);
  for (int n = 0; n < 10; ++n) {
    CAPTURE(n);
    CHECK(std::abs(r.eigenvalues[n] / (std::sqrt(2.0) * (n + 0.5)) - 1.0) < 1e-6);
  }
  CHECK(r.eigenvalues[0] == doctest::Approx(0.70711).epsilon(1e-5));
  for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) {
    CHECK(r.eigenvalues[i] > r.eigenvalues[i - 1]);
  }
  CHECK(spacing_profile(r).increase_ratio == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("error falls off with the stencil order") {
  // Halving the spacing divides the error by about 2^order.
  for (int order : {2, 4}) {
    const double e1 = std::abs(harmonic(121, order).eigenvalues[3] - std::sqrt(2.0) * 3.5);
    const double e2 = std::abs(harmonic(241, order).eigenvalues[3] - std::sqrt(2.0) * 3.5);
    const double rate = std::log2(e1 / e2);
    CAPTURE(order);
    CHECK(rate == doctest::Approx(order).epsilon(0.1));
  }
}

TEST_CASE("particle in a box") {
  // Zero padding only approximates the wall for wide stencils, so check the
  // approach to the continuum ground state c + (1/M)(pi/L)^2.
  const double c = 0.3;
  const double mass = 2.0;
  double last_error = 1.0;
  for (int n : {401, 801, 1601}) {
    std::vector<double> flat(n, c);
    const double d = 10.0 / (n - 1);
    const SpectrumResult r = eigen_spectrum(assemble_hamiltonian(flat, mass, d, 10), c + 1.0);
    const double kinetic = (pi / 10.0) * (pi / 10.0) / mass;
    const double error = std::abs((r.eigenvalues[0] - c) / kinetic - 1.0);
    CAPTURE(n);
    CHECK(error < 0.6 * last_error);
    last_error = error;
  }
  CHECK(last_error < 5e-3);
}

TEST_CASE("threshold and window") {
  const std::vector<double> v = harmonic_samples(12.0, 1201);
  const BandedSymmetricMatrix h = assemble_hamiltonian(v, 1.0, 24.0 / 1200, 10);
  const SpectrumResult below = eigen_spectrum(h, 5.0);
  CHECK(below.bound_count == 4);  // 0.707, 2.121, 3.536, 4.950
  CHECK(below.threshold == 5.0);
  const SpectrumResult wide = eigen_spectrum(h, 5.0, 2.0, true);
  CHECK(wide.bound_count == 4);
  CHECK(wide.eigenvalues.size() == 5);
  CHECK(wide.spacings.size() == 4);
  REQUIRE(wide.eigenvectors.size() == 5);
  CHECK(wide.eigenvectors[0].size() == v.size());
  for (std::size_t a = 0; a < 5; ++a) {
    const std::vector<double>& x = wide.eigenvectors[a];
    const std::vector<double> hx = h.multiply(x);
    double residual = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      residual = std::max(residual, std::abs(hx[i] - wide.eigenvalues[a] * x[i]));
    }
    CHECK(residual < 1e-9);
    for (std::size_t b = 0; b <= a; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * wide.eigenvectors[b][i];
      }
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("isolated helical wells") {
  const HelixParams p = HelixParams::make(10.0, 10.0);
  const std::vector<WellSegment> wells = segment_wells(find_extrema(p));
  int previous = 1 << 30;
  for (const WellSegment& segment : wells) {
    const IsolatedWell well(segment, p);
    const FDParameters fd = default_fd_parameters(well);
    CHECK(fd.n_points == 4001);
    CHECK(fd.order == 10);
    CHECK(fd.domain_min <= well.inner_edge() - min_margin_lengths * de_broglie_length(well));
    CHECK(fd.domain_max >= well.outer_edge() + min_margin_lengths * de_broglie_length(well));
    const SpectrumResult r = well_spectrum(well, fd);
    CAPTURE(segment.index);
    for (int n = 0; n < r.bound_count; ++n) {
      CHECK(r.eigenvalues[n] > segment.minimum_value);
      CHECK(r.eigenvalues[n] < segment.threshold);
    }
    for (double gap : r.spacings) {
      CHECK(gap > 0.0);
    }
    CHECK(r.bound_count <= previous);
    previous = r.bound_count;
  }
  const std::vector<int> counts = bound_counts_per_well(p);
  CHECK(counts.size() == wells.size());
  CHECK(counts.front() >= 1);
  CHECK(counts.back() == 0);
}

TEST_CASE("heavier particles bind more states") {
  const std::vector<int> light = bound_counts_per_well(HelixParams::make(10.0, 10.0, 1.0));
  const std::vector<int> heavy = bound_counts_per_well(HelixParams::make(10.0, 10.0, 10.0));
  REQUIRE(light.size() == heavy.size());
  for (std::size_t k = 0; k < light.size(); ++k) {
    CHECK(heavy[k] >= light[k]);
  }
  CHECK(heavy[0] > light[0]);
}

TEST_CASE("grid and margin convergence") {
  const HelixParams p = HelixParams::make(10.0, 10.0);
  const IsolatedWell well(segment_wells(find_extrema(p)).front(), p);

  // Second-order stencil: the Dirichlet-truncated FD spectrum converges from below.
  double last = 0.0;
  for (int n : {1001, 2001, 4001}) {
    const double e0 = well_spectrum(well, default_fd_parameters(well, n, 2)).eigenvalues[0];
    if (last != 0.0) {
      CHECK(e0 > last);
    }
    last = e0;
  }

  // The slope jump where the well meets its plateau limits the order-10
  // stencil to about 1e-7 at the default grid.
  const SpectrumResult fine = well_spectrum(well, default_fd_parameters(well, 8001));
  const SpectrumResult base = well_spectrum(well, default_fd_parameters(well, 4001));
  REQUIRE(fine.bound_count == base.bound_count);
  for (int n = 0; n < base.bound_count; ++n) {
    CHECK(std::abs(fine.eigenvalues[n] / base.eigenvalues[n] - 1.0) <= 1e-7);
  }

  // Doubling the margins at equal spacing leaves the bound levels in place.
  const FDParameters narrow = default_fd_parameters(well, 4001);
  const double d = narrow.spacing();
  const int extra = static_cast<int>(std::ceil(min_margin_lengths * de_broglie_length(well) / d));
  FDParameters wide = narrow;
  wide.n_points = narrow.n_points + 2 * extra;
  wide.domain_min = narrow.domain_min - extra * d;
  wide.domain_max = narrow.domain_max + extra * d;
  const SpectrumResult a = well_spectrum(well, narrow);
  const SpectrumResult b = well_spectrum(well, wide);
  REQUIRE(a.bound_count == b.bound_count);
  for (int n = 0; n < a.bound_count; ++n) {
    CHECK(std::abs(b.eigenvalues[n] / a.eigenvalues[n] - 1.0) <= 1e-9);
  }
}

TEST_CASE("domain checks") {
  const HelixParams p = HelixParams::make(10.0, 10.0);
  const IsolatedWell well(segment_wells(find_extrema(p)).front(), p);
  FDParameters fd = default_fd_parameters(well);
  fd.domain_min = well.inner_edge() - 1.0;
  CHECK_THROWS_AS(assemble_hamiltonian(well, fd), DomainTooSmall);
  FDParameters tiny = default_fd_parameters(well);
  tiny.n_points = 50;
  CHECK_THROWS_AS(tiny.validate(), InvalidArgument);
  FDParameters odd = default_fd_parameters(well);
  odd.order = 7;
  CHECK_THROWS_AS(odd.validate(), InvalidArgument);
}

TEST_CASE("spacing profile needs two bound states") {
  SpectrumResult r;
  r.eigenvalues = {1.0, 2.0};
  r.bound_count = 1;
  r.spacings = {1.0};
  CHECK_THROWS_AS(spacing_profile(r), InsufficientStates);

  r.eigenvalues = {0.0, 1.0, 2.2, 3.6, 4.7, 5.6};
  r.bound_count = 6;
  r.spacings = {1.0, 1.2, 1.4, 1.1, 0.9};
  const SpacingProfile sp = spacing_profile(r);
  CHECK(sp.increase_ratio == doctest::Approx(1.4));
  CHECK(sp.rising_intervals == 3);
  CHECK(sp.spacings.size() == 5);
}
