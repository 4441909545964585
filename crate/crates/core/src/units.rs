//! Physical constants (SI unless noted) and unit conversions.

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Standard atmosphere in Torr.
pub const ATM_TORR: f64 = 760.0;
pub const PA_PER_TORR: f64 = 101_325.0 / 760.0;

/// HITRAN reference temperature (K).
pub const T_REF_HITRAN: f64 = 296.0;

/// second radiation constant hc/k_B in cm·K
pub const C2: f64 = 1.438_776_877;

pub const NM_PER_MM: f64 = 1.0e6;
pub const NM_PER_CM: f64 = 1.0e7;

/// Ideal-gas number density in molecule/cm³.
pub fn number_density(pressure_torr: f64, temperature_k: f64) -> f64 {
    pressure_torr * PA_PER_TORR / (BOLTZMANN * temperature_k) * 1.0e-6
}

/// Wavelength in nm to wavenumber in cm⁻¹ (and back, the map is an involution).
pub fn nm_to_wavenumber(nm: f64) -> f64 {
    NM_PER_CM / nm
}

pub fn wavenumber_to_nm(cm1: f64) -> f64 {
    NM_PER_CM / cm1
}

pub fn um_to_wavenumber(um: f64) -> f64 {
    1.0e4 / um
}

pub fn fwhm_to_sigma(fwhm: f64) -> f64 {
    fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
}
