#include "helixqd/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "helixqd/errors.hpp"

namespace helixqd {

void FDParameters::validate() const {
  if (order < 2 || order % 2 != 0) {
    throw InvalidArgument("finite-difference order must be even and >= 2");
  }
  if (n_points < 101) {
    throw InvalidArgument("finite-difference grid needs at least 101 points");
  }
  if (!(domain_max > domain_min)) {
    throw InvalidArgument("finite-difference domain is empty");
  }
}

double de_broglie_length(const IsolatedWell& well) {
  const double depth = well.segment().depth();
  return 2.0 * std::numbers::pi / std::sqrt(well.params().mass * depth);
}

FDParameters default_fd_parameters(const IsolatedWell& well, int n_points, int order,
                                   double margin_lengths) {
  const double margin = margin_lengths * de_broglie_length(well);
  FDParameters fd;
  fd.order = order;
  fd.n_points = n_points;
  fd.domain_min = well.inner_edge() - margin;
  fd.domain_max = well.outer_edge() + margin;
  return fd;
}

std::vector<double> second_derivative_stencil(int order) {
  if (order < 2 || order % 2 != 0) {
    throw InvalidArgument("stencil order must be even and >= 2");
  }
  const int half = order / 2;
  std::vector<double> c(static_cast<std::size_t>(half) + 1, 0.0);
  // c_k = 2 (-1)^(k+1) (m!)^2 / (k^2 (m-k)! (m+k)!), accumulated as a product
  // of ratios to stay clear of factorial overflow.
  for (int k = 1; k <= half; ++k) {
    double ratio = 1.0;  // (m!)^2 / ((m-k)! (m+k)!)
    for (int j = 1; j <= k; ++j) {
      ratio *= static_cast<double>(half - k + j) / static_cast<double>(half + j);
    }
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    c[static_cast<std::size_t>(k)] = 2.0 * sign * ratio / (static_cast<double>(k) * k);
    c[0] -= 2.0 * c[static_cast<std::size_t>(k)];
  }
  return c;
}

BandedSymmetricMatrix::BandedSymmetricMatrix(int size, int bandwidth)
    : size_(size), bandwidth_(bandwidth) {
  if (size < 1 || bandwidth < 0 || bandwidth >= size) {
    throw InvalidArgument("banded matrix: invalid size/bandwidth");
  }
  band_.assign(static_cast<std::size_t>(bandwidth + 1) * static_cast<std::size_t>(size), 0.0);
}

double& BandedSymmetricMatrix::at(int i, int j) {
  if (i > j) {
    std::swap(i, j);
  }
  if (j - i > bandwidth_ || i < 0 || j >= size_) {
    throw InvalidArgument("banded matrix: index outside the band");
  }
  return band_[static_cast<std::size_t>(bandwidth_ + i - j) +
               static_cast<std::size_t>(j) * static_cast<std::size_t>(bandwidth_ + 1)];
}

double BandedSymmetricMatrix::at(int i, int j) const {
  return const_cast<BandedSymmetricMatrix*>(this)->at(i, j);
}

std::vector<double> BandedSymmetricMatrix::multiply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != size_) {
    throw InvalidArgument("banded matrix: vector size mismatch");
  }
  std::vector<double> y(x.size(), 0.0);
  for (int i = 0; i < size_; ++i) {
    const int lo = std::max(0, i - bandwidth_);
    const int hi = std::min(size_ - 1, i + bandwidth_);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) {
      acc += at(i, j) * x[static_cast<std::size_t>(j)];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

BandedSymmetricMatrix assemble_hamiltonian(std::span<const double> potential, double mass,
                                           double spacing, int order) {
  if (!(mass > 0.0) || !(spacing > 0.0)) {
    throw InvalidArgument("assemble_hamiltonian: mass and spacing must be positive");
  }
  const auto stencil = second_derivative_stencil(order);
  const int n = static_cast<int>(potential.size());
  const int half = order / 2;
  BandedSymmetricMatrix h(n, std::min(half, n - 1));
  const double kinetic = 1.0 / (mass * spacing * spacing);
  for (int i = 0; i < n; ++i) {
    h.at(i, i) = -kinetic * stencil[0] + potential[static_cast<std::size_t>(i)];
    for (int k = 1; k <= half && i + k < n; ++k) {
      h.at(i, i + k) = -kinetic * stencil[static_cast<std::size_t>(k)];
    }
  }
  return h;
}

BandedSymmetricMatrix assemble_hamiltonian(const IsolatedWell& well, const FDParameters& fd) {
  fd.validate();
  const double margin = min_margin_lengths * de_broglie_length(well) * (1.0 - 1e-9);
  if (well.inner_edge() - fd.domain_min < margin || fd.domain_max - well.outer_edge() < margin) {
    throw DomainTooSmall("isolated well " + std::to_string(well.segment().index) +
                         ": plateau margins below " + std::to_string(min_margin_lengths) +
                         " de Broglie lengths");
  }
  const double d = fd.spacing();
  std::vector<double> samples(static_cast<std::size_t>(fd.n_points));
  for (int i = 0; i < fd.n_points; ++i) {
    samples[static_cast<std::size_t>(i)] = well(fd.domain_min + i * d);
  }
  return assemble_hamiltonian(samples, well.params().mass, d, fd.order);
}

namespace {

// Eigenvector for a known eigenvalue by shifted inverse iteration on the
// banded LU factors, kept orthogonal to the vectors already found.
std::vector<double> inverse_iteration(const BandedSymmetricMatrix& h, double eigenvalue,
                                      const std::vector<std::vector<double>>& previous) {
  const int n = h.size();
  const int kd = h.bandwidth();
  const int ldab = 3 * kd + 1;
  const double shift = eigenvalue + 1e-10 * std::max(1.0, std::abs(eigenvalue));
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - kd); i <= std::min(n - 1, j + kd); ++i) {
      ab[static_cast<std::size_t>(j) * ldab + 2 * kd + i - j] =
          h.at(i, j) - (i == j ? shift : 0.0);
    }
  }
  std::vector<lapack_int> pivots(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kd, kd, ab.data(), ldab, pivots.data());
  if (info < 0) {
    throw DiagonalizationFailure("dgbtrf failed with info = " + std::to_string(info));
  }

  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = 1.0 + 0.1 * std::sin(0.37 * i);
  }
  const auto normalize = [&x]() {
    double norm = 0.0;
    for (double v : x) {
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : x) {
      v /= norm;
    }
  };
  for (int sweep = 0; sweep < 4; ++sweep) {
    LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kd, kd, 1, ab.data(), ldab, pivots.data(), x.data(), n);
    for (const std::vector<double>& p : previous) {
      double overlap = 0.0;
      for (int i = 0; i < n; ++i) {
        overlap += p[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      }
      for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] -= overlap * p[static_cast<std::size_t>(i)];
      }
    }
    normalize();
  }
  const auto peak = std::max_element(x.begin(), x.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (*peak < 0.0) {
    for (double& v : x) {
      v = -v;
    }
  }
  return x;
}

}  // namespace

SpectrumResult eigen_spectrum(const BandedSymmetricMatrix& hamiltonian, double threshold,
                              double window_above, bool with_vectors) {
  const int n = hamiltonian.size();
  const int kd = hamiltonian.bandwidth();
  std::vector<double> band = hamiltonian.band_storage();  // dsbevx overwrites it

  // Gershgorin lower bound keeps every eigenvalue inside (lower, upper].
  double lower = threshold;
  for (int i = 0; i < n; ++i) {
    double radius = 0.0;
    for (int j = std::max(0, i - kd); j <= std::min(n - 1, i + kd); ++j) {
      if (j != i) {
        radius += std::abs(hamiltonian.at(i, j));
      }
    }
    lower = std::min(lower, hamiltonian.at(i, i) - radius);
  }
  lower -= 1.0;
  const double upper = threshold + window_above;

  std::vector<double> q(1);
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> z(1);
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info =
      LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'V', 'U', n, kd, band.data(), kd + 1, q.data(), 1,
                     lower, upper, 0, 0, abstol, &found, w.data(), z.data(), 1, ifail.data());
  if (info != 0) {
    throw DiagonalizationFailure("dsbevx failed with info = " + std::to_string(info));
  }

  SpectrumResult result;
  result.threshold = threshold;
  result.eigenvalues.assign(w.begin(), w.begin() + found);
  const double cutoff = threshold - bound_guard * std::abs(threshold);
  result.bound_count = static_cast<int>(
      std::count_if(result.eigenvalues.begin(), result.eigenvalues.end(),
                    [cutoff](double e) { return e < cutoff; }));
  for (std::size_t i = 1; i < result.eigenvalues.size(); ++i) {
    result.spacings.push_back(result.eigenvalues[i] - result.eigenvalues[i - 1]);
  }
  if (with_vectors) {
    for (double e : result.eigenvalues) {
      result.eigenvectors.push_back(inverse_iteration(hamiltonian, e, result.eigenvectors));
    }
  }
  return result;
}

SpectrumResult well_spectrum(const IsolatedWell& well, const FDParameters& fd, bool with_vectors) {
  return eigen_spectrum(assemble_hamiltonian(well, fd), well.plateau(), 0.0, with_vectors);
}

std::vector<int> bound_counts_per_well(const HelixParams& params) {
  std::vector<int> counts;
  for (const WellSegment& segment : segment_wells(find_extrema(params))) {
    const IsolatedWell well(segment, params);
    counts.push_back(well_spectrum(well, default_fd_parameters(well)).bound_count);
  }
  return counts;
}

SpacingProfile spacing_profile(const SpectrumResult& result) {
  if (result.bound_count < 2) {
    throw InsufficientStates("spacing_profile needs at least two bound states");
  }
  SpacingProfile profile;
  const auto bound = static_cast<std::size_t>(result.bound_count);
  for (std::size_t i = 1; i < bound; ++i) {
    profile.spacings.push_back(result.eigenvalues[i] - result.eigenvalues[i - 1]);
  }
  profile.increase_ratio =
      *std::max_element(profile.spacings.begin(), profile.spacings.end()) / profile.spacings.front();
  profile.rising_intervals = 1;
  while (static_cast<std::size_t>(profile.rising_intervals) < profile.spacings.size() &&
         profile.spacings[static_cast<std::size_t>(profile.rising_intervals)] >=
             profile.spacings[static_cast<std::size_t>(profile.rising_intervals) - 1]) {
    ++profile.rising_intervals;
  }
  return profile;
}

}  // namespace helixqd
