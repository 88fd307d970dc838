#include "polarqc/units.hpp"

#include <cmath>

#include "polarqc/error.hpp"

namespace polarqc::units {

double dipole_field_to_frequency(double d_debye, double e_v_per_cm) {
    return d_debye * kDebye * e_v_per_cm * kVoltPerCm / kPlanck;
}

double frequency_to_field(double f_hz, double d_debye) {
    if (d_debye == 0.0) throw ValidationError("frequency_to_field: zero dipole");
    return f_hz * kPlanck / (d_debye * kDebye * kVoltPerCm);
}

double reduced_field_beta(double mu_debye, double e_v_per_cm, double b_hz) {
    if (!(mu_debye > 0.0)) throw ValidationError("reduced_field_beta: mu must be > 0");
    if (!(b_hz > 0.0)) throw ValidationError("reduced_field_beta: B must be > 0");
    return dipole_field_to_frequency(mu_debye, e_v_per_cm) / b_hz;
}

double beta_to_field(double beta, double mu_debye, double b_hz) {
    if (!(mu_debye > 0.0)) throw ValidationError("beta_to_field: mu must be > 0");
    if (!(b_hz > 0.0)) throw ValidationError("beta_to_field: B must be > 0");
    return frequency_to_field(beta * b_hz, mu_debye);
}

double temperature_to_frequency(double t_kelvin) {
    if (!(t_kelvin >= 0.0)) throw ValidationError("temperature_to_frequency: T must be >= 0");
    return kBoltzmann * t_kelvin / kPlanck;
}

double dipole_coupling(double da_debye, double db_debye, double r_um) {
    if (!(r_um > 0.0)) throw ValidationError("dipole_coupling: separation must be > 0");
    const double r = r_um * kMicron;
    return da_debye * kDebye * db_debye * kDebye / (4.0 * kPi * kEpsilon0 * r * r * r) / kPlanck;
}

}  // namespace polarqc::units
