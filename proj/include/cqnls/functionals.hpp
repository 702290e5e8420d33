#pragma once

#include <iosfwd>
#include <string>

#include "cqnls/spectral.hpp"

namespace cqnls {

double mass(const Field2D& u);
double kinetic_energy(const Field2D& u);  // (1/2) |grad u|_2^2
double lp_pow(const Field2D& u, int p);   // integral of |u|^p, p even
double sup_norm(const Field2D& u);

/// E(u) = int 1/2 |grad u|^2 - 1/4 |u|^4 + 1/6 |u|^6.
double energy(const Field2D& u);

/// Sharp Gagliardo-Nirenberg quotient |u|_4^4 M(Q) / (2 M(u) |grad u|_2^2);
/// <= 1 up to quadrature error, = 1 at the ground state.
double gn_ratio(const Field2D& u, double mass_q);

/// Radial weights in the scaled variable s = |x|/R.
/// phi is the lp_theta transition; psi(s) = (1/s) int_0^s phi, so
/// psi = phi = 1 for s <= 1 and s psi' = phi - psi.
double weight_phi(double s);
double weight_psi(double s);
double weight_psi_prime(double s);

struct WeightPair {
    double radius = 0.0;
    Field2D phi;           // phi(|x|/R)
    Field2D psi;           // psi(|x|/R)
    Field2D chi;           // chi_R = phi (same transition family)
    Field2D lap_phi_psi;   // spectral Laplacian of phi + psi, cached for the rate
};

/// Requires 0 < R < half_width/2 so supp phi(./R) fits the box.
WeightPair make_weights(const GridSpec& g, double R);

/// A(t) = int psi(x/R) x . Im[conj(u) grad u] dx.
double virial_A(const Field2D& u, const WeightPair& w);
double virial_A(const Field2D& u, const WeightPair& w, const Gradient& gr);

/// Exact d/dt of A for radial solutions:
///   -1/2 int Lap[psi+phi]|u|^2 + 2 int phi |d_r u|^2
///   -1/2 int [psi+phi]|u|^4 + 2/3 int [psi+phi]|u|^6.
double virial_rate(const Field2D& u, const WeightPair& w);
double virial_rate(const Field2D& u, const WeightPair& w, const Gradient& gr);

/// int 1/2 chi_R |grad u|^2 - 1/4 |u|^4 + 1/6 |u|^6 dx (cutoff on the
/// kinetic term only, as in the space-localized energy).
double local_energy(const Field2D& u, double R);

/// int (1 - chi_R) |grad u|^2 dx.
double exterior_kinetic(const Field2D& u, double R);
double exterior_kinetic(const Field2D& u, double R, const Gradient& gr);

struct ConcentrationScale {
    double lambda = 1.0;
    bool mass_at_boundary = false;
};

/// Smallest dyadic lambda >= 1 with int_{|x|>lambda} |u|^2 < eps M(u);
/// returns half_width with the flag set when no dyadic radius below the box
/// size qualifies.
ConcentrationScale concentration_scale(const Field2D& u, double eps);

struct DiagnosticsRecord {
    double t = 0, mass = 0, energy = 0, kinetic = 0, l4_4 = 0, l6_6 = 0, linf = 0,
           weighted_sup = 0, gn_ratio = 0, virial_A = 0, virial_rate = 0, lambda = 0,
           ext_kin_r1 = 0, ext_kin_r2 = 0, l4tx_accum = 0;
};

std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& r);

}  // namespace cqnls
