//! Physical constants (CODATA 2018, SI) and unit conversions.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum permittivity, F/m.
pub const EPS_0: f64 = 8.854_187_812_8e-12;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Electron mass, kg.
pub const M_E: f64 = 9.109_383_701_5e-31;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Riemann zeta function at 3 (Apéry's constant).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

pub const NM: f64 = 1e-9;
pub const UM: f64 = 1e-6;
pub const PN: f64 = 1e-12;
/// One µΩ·cm expressed in Ω·m.
pub const MICRO_OHM_CM: f64 = 1e-8;

/// Matsubara spacing 2πkT/ħ at temperature `t` (K), rad/s.
#[inline]
pub fn matsubara_spacing(t: f64) -> f64 {
    2.0 * std::f64::consts::PI * K_B * t / HBAR
}

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda` (m).
#[inline]
pub fn wavelength_to_omega(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / lambda
}

#[inline]
pub fn omega_to_wavelength(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / omega
}
