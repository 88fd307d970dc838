#pragma once

// Constants and conversions. Energies are carried as E/h in Hz, dipoles in
// Debye, fields in V/cm, device lengths in um.

namespace polarqc::units {

inline constexpr double kPlanck = 6.62607015e-34;        // J s (exact)
inline constexpr double kBoltzmann = 1.380649e-23;       // J/K (exact)
inline constexpr double kLightSpeed = 299792458.0;       // m/s (exact)
inline constexpr double kDebye = 1e-21 / kLightSpeed;    // C m
inline constexpr double kEpsilon0 = 8.8541878128e-12;    // F/m
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kVoltPerCm = 100.0;  // V/m per V/cm
inline constexpr double kMicron = 1e-6;

// d*E/h in Hz. Sign-preserving.
double dipole_field_to_frequency(double d_debye, double e_v_per_cm);

// Inverse of dipole_field_to_frequency for the field.
double frequency_to_field(double f_hz, double d_debye);

// beta = mu*E/(h*B). Throws ValidationError unless mu > 0 and B > 0.
double reduced_field_beta(double mu_debye, double e_v_per_cm, double b_hz);

// Field (V/cm) at which reduced_field_beta equals beta.
double beta_to_field(double beta, double mu_debye, double b_hz);

// k_B*T/h. Throws ValidationError for T < 0.
double temperature_to_frequency(double t_kelvin);

// Dipole-dipole energy d_a*d_b/(4 pi eps0 r^3)/h in Hz, dipoles perpendicular
// to the separation axis.
double dipole_coupling(double da_debye, double db_debye, double r_um);

}  // namespace polarqc::units
