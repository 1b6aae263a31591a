#pragma once

#include <functional>
#include <span>
#include <vector>

#include "helixqd/landscape.hpp"

namespace helixqd {

// Finite-difference discretization of an isolated well. The grid has
// n_points nodes from domain_min to domain_max inclusive; the wave function
// is taken to vanish beyond them.
struct FDParameters {
  int order = 10;
  int n_points = 4001;
  double domain_min = 0.0;
  double domain_max = 0.0;

  double spacing() const { return (domain_max - domain_min) / (n_points - 1); }
  void validate() const;
};

// Plateau margin (in units of the de Broglie length 2 pi / sqrt(M * depth))
// required on both sides of an isolated well.
inline constexpr double min_margin_lengths = 5.0;

double de_broglie_length(const IsolatedWell& well);

FDParameters default_fd_parameters(const IsolatedWell& well, int n_points = 4001, int order = 10,
                                   double margin_lengths = min_margin_lengths);

// Weights c_0..c_{order/2} of the centered second-derivative stencil,
// f''(x) ~ (c_0 f(x) + sum_k c_k (f(x + k d) + f(x - k d))) / d^2.
std::vector<double> second_derivative_stencil(int order);

// Symmetric banded matrix in LAPACK upper band storage (column major).
class BandedSymmetricMatrix {
 public:
  BandedSymmetricMatrix(int size, int bandwidth);

  int size() const { return size_; }
  int bandwidth() const { return bandwidth_; }

  // Element (i, j) with |i - j| <= bandwidth; either triangle may be named.
  double& at(int i, int j);
  double at(int i, int j) const;

  std::vector<double> multiply(std::span<const double> x) const;

  const std::vector<double>& band_storage() const { return band_; }

 private:
  int size_;
  int bandwidth_;
  std::vector<double> band_;
};

// H = -(1/M) d^2/ds^2 + diag(V) on the given samples. Kinetic prefactor 1/M
// because the relative coordinate carries reduced mass M/2.
BandedSymmetricMatrix assemble_hamiltonian(std::span<const double> potential, double mass,
                                           double spacing, int order);

// Same, sampling the isolated well on fd's grid. Throws DomainTooSmall when
// the plateau margins are under min_margin_lengths de Broglie lengths.
BandedSymmetricMatrix assemble_hamiltonian(const IsolatedWell& well, const FDParameters& fd);

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  int bound_count = 0;
  std::vector<double> spacings;     // eigenvalues[n+1] - eigenvalues[n]
  double threshold = 0.0;
  std::vector<std::vector<double>> eigenvectors;  // filled on request only
};

// Relative guard below the threshold for counting a state as bound.
inline constexpr double bound_guard = 1e-6;

// All eigenvalues up to threshold + window_above.
SpectrumResult eigen_spectrum(const BandedSymmetricMatrix& hamiltonian, double threshold,
                              double window_above = 0.0, bool with_vectors = false);

SpectrumResult well_spectrum(const IsolatedWell& well, const FDParameters& fd,
                             bool with_vectors = false);

std::vector<int> bound_counts_per_well(const HelixParams& params);

struct SpacingProfile {
  std::vector<double> spacings;  // between consecutive bound states
  double increase_ratio = 1.0;   // max spacing / first spacing
  int rising_intervals = 0;      // length of the initial non-decreasing run
};

SpacingProfile spacing_profile(const SpectrumResult& result);

}  // namespace helixqd
