#pragma once

#include <array>

#include "dewet/config.hpp"
#include "dewet/profile.hpp"

namespace dewet {

class DisplacementField;

struct EnergyBreakdown {
  double surface = 0.0;
  double elastic = 0.0;
  double metric = 0.0;
  double total = 0.0;
  /// Support of the multiplier bump: quarter points of [alpha, beta].
  double a0 = 0.0, b0 = 0.0;
};

double surface_energy(const Profile& p, const SimConfig& cfg);
/// (nu0/2) int h''^2 / J^5, the curvature part of surface_energy.
double bending_energy(const Profile& p, const SimConfig& cfg);

using Mat2 = std::array<std::array<double, 2>, 2>;

/// W = (1/2) C xi : xi with C xi = mu (xi + xi^T) + lambda tr(xi) I.
/// The input is symmetrized first.
double elastic_density(const Mat2& xi, double lambda, double mu);

/// Spectral bounds lower |xi|^2 <= W <= upper |xi|^2 on symmetric xi.
struct DensityBounds {
  double lower, upper;
  double c_w;  ///< max(upper, 1/lower)
};
DensityBounds density_bounds(double lambda, double mu);

double incremental_metric(const Profile& p, const Profile& prev, const SimConfig& cfg);
double b_tau(const Profile& p, const Profile& prev, const SimConfig& cfg);

/// Elastic part taken from the field's quadrature energy.
EnergyBreakdown total_energy(const Profile& p, const Profile& prev, const DisplacementField& u,
                             const SimConfig& cfg);
/// Same with an explicit elastic value.
EnergyBreakdown total_energy(const Profile& p, const Profile& prev, double elastic, const SimConfig& cfg);

/// Contact offsets of p relative to prev, computed from stored lengths.
struct ContactShift {
  double da, db;
};
ContactShift contact_shift(const Profile& p, const Profile& prev);

}  // namespace dewet
