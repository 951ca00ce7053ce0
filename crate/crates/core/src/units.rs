//! Physical constants (CODATA 2018) and SI <-> atomic-unit conversions.
//!
//! Kernels work in Hartree atomic units (hbar = e = m_e = 4 pi eps0 = 1).

pub const C: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const E_CHARGE: f64 = 1.602_176_634e-19;
pub const M_E: f64 = 9.109_383_701_5e-31;
pub const EPS0: f64 = 8.854_187_812_8e-12;
pub const BOHR: f64 = 5.291_772_109_03e-11;
pub const HARTREE: f64 = 4.359_744_722_207_1e-18;
pub const EV: f64 = E_CHARGE;

/// Atomic unit of time, hbar / E_h (s).
pub const AU_TIME: f64 = HBAR / HARTREE;
/// Atomic unit of electric field, E_h / (e a0) (V/m).
pub const AU_FIELD: f64 = HARTREE / (E_CHARGE * BOHR);
/// Speed of light in atomic units.
pub const C_AU: f64 = C * AU_TIME / BOHR;

pub fn seconds_to_au(t: f64) -> f64 {
    t / AU_TIME
}

pub fn au_to_seconds(t: f64) -> f64 {
    t * AU_TIME
}

pub fn joules_to_au(e: f64) -> f64 {
    e / HARTREE
}

pub fn field_to_au(f: f64) -> f64 {
    f / AU_FIELD
}

/// Angular frequency in rad/s to atomic units.
pub fn omega_to_au(w: f64) -> f64 {
    w * AU_TIME
}

pub fn omega_from_au(w: f64) -> f64 {
    w / AU_TIME
}

pub fn volume_to_au(v: f64) -> f64 {
    v / (BOHR * BOHR * BOHR)
}

/// Atomic unit of the atomic dipole constant, kg^1/2 m^9/2 s^-7/2.
pub fn atom_dipole_unit() -> f64 {
    M_E.sqrt() * BOHR.powf(4.5) * AU_TIME.powf(-3.5)
}

/// Atomic unit of the solid dipole constant, kg^-3/2 m^-1/2 s^3/2.
pub fn solid_dipole_unit() -> f64 {
    M_E.powf(-1.5) * BOHR.powf(-0.5) * AU_TIME.powf(1.5)
}

/// Peak field (V/m) of a linearly polarized wave with cycle-averaged intensity `i` (W/m^2).
pub fn field_from_intensity(i: f64) -> f64 {
    (2.0 * i / (C * EPS0)).sqrt()
}
