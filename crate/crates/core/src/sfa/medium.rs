use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MediumKind {
    /// d(p) = d0 p / (p^2/2m + E0)^3, d0 in kg^1/2 m^9/2 s^-7/2.
    Atom { binding_energy_j: f64, dipole_d0_si: f64, mass_kg: f64 },
    /// d(p) = d0 Eg / eps(p) along the polarization, eps = Eg + p^2/2m*; d0 in kg^-3/2 m^-1/2 s^3/2.
    Solid { gap_j: f64, effective_mass_kg: f64, dipole_d0_si: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumModel {
    pub kind: MediumKind,
    pub number_density_per_m3: f64,
}

impl MediumModel {
    pub fn atom(binding_energy_j: f64, dipole_d0_si: f64, number_density_per_m3: f64) -> Result<Self> {
        let m = MediumModel {
            kind: MediumKind::Atom { binding_energy_j, dipole_d0_si, mass_kg: units::M_E },
            number_density_per_m3,
        };
        m.validate()?;
        Ok(m)
    }

    /// Hydrogen with the tabulated dipole constant.
    pub fn hydrogen(number_density_per_m3: f64) -> Self {
        MediumModel {
            kind: MediumKind::Atom { binding_energy_j: 13.6 * units::EV, dipole_d0_si: 3.37e-4, mass_kg: units::M_E },
            number_density_per_m3,
        }
    }

    /// ZnO: Eg = 3.4 eV, m* = 0.25 m, d0 = 7e25.
    pub fn zno(number_density_per_m3: f64) -> Self {
        MediumModel {
            kind: MediumKind::Solid { gap_j: 3.4 * units::EV, effective_mass_kg: 0.25 * units::M_E, dipole_d0_si: 7e25 },
            number_density_per_m3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        let (e, m, d) = match self.kind {
            MediumKind::Atom { binding_energy_j, dipole_d0_si, mass_kg } => (binding_energy_j, mass_kg, dipole_d0_si),
            MediumKind::Solid { gap_j, effective_mass_kg, dipole_d0_si } => (gap_j, effective_mass_kg, dipole_d0_si),
        };
        if !ok(e) {
            return Err(domain("binding energy / band gap must be positive"));
        }
        if !ok(m) {
            return Err(domain("carrier mass must be positive"));
        }
        if !(d >= 0.0 && d.is_finite()) {
            return Err(domain("dipole constant must be non-negative"));
        }
        if !ok(self.number_density_per_m3) {
            return Err(domain("number density must be positive"));
        }
        Ok(())
    }

    /// Kernel-side parameters in atomic units.
    pub fn to_au(&self) -> MediumAu {
        match self.kind {
            MediumKind::Atom { binding_energy_j, dipole_d0_si, mass_kg } => MediumAu {
                law: DipoleLaw::Atom,
                energy0: units::joules_to_au(binding_energy_j),
                mass: mass_kg / units::M_E,
                d0: dipole_d0_si / units::atom_dipole_unit(),
            },
            MediumKind::Solid { gap_j, effective_mass_kg, dipole_d0_si } => MediumAu {
                law: DipoleLaw::Solid,
                energy0: units::joules_to_au(gap_j),
                mass: effective_mass_kg / units::M_E,
                d0: dipole_d0_si / units::solid_dipole_unit(),
            },
        }
    }

    pub fn mass_kg(&self) -> f64 {
        match self.kind {
            MediumKind::Atom { mass_kg, .. } => mass_kg,
            MediumKind::Solid { effective_mass_kg, .. } => effective_mass_kg,
        }
    }
}

/// Two-band solid with effective-mass dispersion and k.p dipole.
pub fn to_solid(gap_j: f64, effective_mass_kg: f64, dipole_d0_si: f64, number_density_per_m3: f64) -> Result<MediumModel> {
    for (name, v) in [
        ("gap", gap_j),
        ("effective mass", effective_mass_kg),
        ("dipole constant", dipole_d0_si),
        ("number density", number_density_per_m3),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(MediumModel {
        kind: MediumKind::Solid { gap_j, effective_mass_kg, dipole_d0_si },
        number_density_per_m3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DipoleLaw {
    Atom,
    Solid,
}

/// Medium parameters in atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumAu {
    pub law: DipoleLaw,
    /// E0 for atoms, Eg for solids.
    pub energy0: f64,
    pub mass: f64,
    pub d0: f64,
}

impl MediumAu {
    /// eps(p) = energy0 + p^2/2m
    #[inline]
    pub fn dispersion(&self, p2: f64) -> f64 {
        self.energy0 + 0.5 * p2 / self.mass
    }

    /// Polarization component of d given p_x and eps(p).
    #[inline]
    pub fn dipole_x(&self, px: f64, eps: f64) -> f64 {
        match self.law {
            DipoleLaw::Atom => self.d0 * px / (eps * eps * eps),
            DipoleLaw::Solid => self.d0 * self.energy0 / eps,
        }
    }
}

/// Transition dipole for momentum `p` (a.u.), returned in a.u. The laws are real-valued.
pub fn transition_dipole(medium: &MediumModel, p: [f64; 3]) -> [f64; 3] {
    let m = medium.to_au();
    let p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    let eps = m.dispersion(p2);
    match m.law {
        DipoleLaw::Atom => {
            let s = m.d0 / (eps * eps * eps);
            [s * p[0], s * p[1], s * p[2]]
        }
        DipoleLaw::Solid => [m.d0 * m.energy0 / eps, 0.0, 0.0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_dipole_vanishes_at_origin() {
        let d = transition_dipole(&MediumModel::hydrogen(1e24), [0.0; 3]);
        assert_eq!(d, [0.0; 3]);
    }

    #[test]
    fn solid_dipole_at_gap_minimum_is_d0() {
        let zno = MediumModel::zno(4e28);
        let d = transition_dipole(&zno, [0.0; 3]);
        assert!((d[0] - zno.to_au().d0).abs() < 1e-15);
        assert!((zno.to_au().d0 - 3.72).abs() < 0.01);
    }

    #[test]
    fn atom_dipole_where_kinetic_equals_binding() {
        let h = MediumModel::hydrogen(1e24);
        let a = h.to_au();
        let p = (2.0 * a.mass * a.energy0).sqrt();
        let d = transition_dipole(&h, [0.0, p, 0.0]);
        let expect = a.d0 * p / (2.0 * a.energy0).powi(3);
        assert!((d[1] - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn to_solid_rejects_nonpositive() {
        assert!(to_solid(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(to_solid(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(to_solid(1.0, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn solid_with_atom_parameters_differs_only_by_law() {
        // Same E0 and mass: the dispersion agrees, the dipole laws differ by design at p = 0.
        let h = MediumModel::hydrogen(1.0);
        let s = to_solid(13.6 * units::EV, units::M_E, 7e25, 1.0).unwrap();
        let (ha, sa) = (h.to_au(), s.to_au());
        assert!((ha.dispersion(0.3) - sa.dispersion(0.3)).abs() < 1e-15);
        assert_eq!(transition_dipole(&h, [0.0; 3])[0], 0.0);
        assert!(transition_dipole(&s, [0.0; 3])[0] > 0.0);
    }
}
