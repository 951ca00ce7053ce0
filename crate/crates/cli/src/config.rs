//! Flat TOML scenario file. Physical keys carry their unit in the name.

use serde::{Deserialize, Serialize};

use qshhg::macroscopic::{bsv_parameters, BsvBeam, PropagationGeometry};
use qshhg::sfa::{to_solid, GridSpec, LaserPulse, MediumModel, MomentumGrid, SigmaMethod};
use qshhg::units;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    Spectra,
    JointDistribution,
    Marginal,
    ProjQ,
    #[serde(rename = "proj-N", alias = "proj-n")]
    ProjN,
    Wigner,
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MediumChoice {
    /// Two-band solid; unset parameters fall back to ZnO.
    Solid,
    /// Single-electron atom; unset parameters fall back to hydrogen.
    Atom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaSource {
    /// `zeta_abs2` for every sideband order.
    Fixed,
    /// Band-integrated coupling of the computed spectrum at `theta_rad`.
    Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WignerState {
    /// Sideband state after measuring l BSV photons.
    ProjQ,
    /// BSV state after measuring m sideband photons.
    #[serde(rename = "proj-N", alias = "proj-n")]
    ProjN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub label: String,
    pub outputs: Vec<OutputKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    /// Permit exact Fock-space work at r > 12.
    pub allow_expensive: bool,
    /// Exact mode-displacement recursion instead of the high-frequency form.
    pub exact_sigma: bool,

    pub medium: MediumChoice,
    #[serde(rename = "band_gap_eV", skip_serializing_if = "Option::is_none")]
    pub band_gap_ev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_mass_me: Option<f64>,
    #[serde(rename = "binding_energy_eV", skip_serializing_if = "Option::is_none")]
    pub binding_energy_ev: Option<f64>,
    #[serde(rename = "dipole_d0_SI", skip_serializing_if = "Option::is_none")]
    pub dipole_d0_si: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_per_m3: Option<f64>,

    pub wavelength_um: f64,
    #[serde(rename = "field_V_per_m", skip_serializing_if = "Option::is_none")]
    pub field_v_per_m: Option<f64>,
    /// Cycle-averaged; converted with I = c eps0 F0^2 / 2.
    #[serde(rename = "intensity_W_per_cm2", skip_serializing_if = "Option::is_none")]
    pub intensity_w_per_cm2: Option<f64>,
    pub duration_cycles: f64,
    pub cep_rad: f64,

    pub beam_radius_um: f64,
    pub interaction_length_um: f64,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub bsv_r: Option<f64>,
    #[serde(rename = "bsv_energy_nJ", skip_serializing_if = "Option::is_none")]
    pub bsv_energy_nj: Option<f64>,
    pub bsv_wavelength_um: f64,
    pub bsv_bandwidth_nm: f64,
    pub bsv_beam_radius_um: f64,

    pub samples_per_cycle: usize,
    pub momentum_par_samples: usize,
    pub momentum_perp_samples: usize,
    pub momentum_taper: f64,
    pub max_order: usize,
    pub samples_per_order: usize,
    pub theta_samples: usize,
    /// Extra squeeze phases reported band by band.
    pub theta_list_rad: Vec<f64>,

    pub sideband_orders: Vec<usize>,
    pub zeta_source: ZetaSource,
    pub zeta_abs2: f64,
    pub theta_rad: f64,
    /// Squeeze amplitude for the Fock stages; defaults to the BSV value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock_r: Option<f64>,

    pub joint_m_max: u64,
    pub joint_n_max: u64,

    pub marginal_m_max: u64,
    pub marginal_exact: bool,

    /// Explicit BSV photon numbers; when empty a log-spaced range is used.
    pub projq_l: Vec<u64>,
    pub projq_log10_l_min: f64,
    pub projq_log10_l_max: f64,
    pub projq_l_points: usize,
    pub projq_exact: bool,

    pub projn_m_max: u64,
    pub projn_theta_list_rad: Vec<f64>,
    pub projn_theta_average: bool,
    pub projn_exact: bool,
    pub projn_sweep_r: Vec<f64>,
    pub projn_sweep_m: u64,
    pub projn_sweep_log10_zeta_abs2_min: f64,
    pub projn_sweep_log10_zeta_abs2_max: f64,
    pub projn_sweep_points: usize,

    pub wigner_state: WignerState,
    /// l for proj-q panels, m for proj-N panels. The per-panel lists broadcast from length 1.
    pub wigner_index: Vec<u64>,
    pub wigner_delta_l: Vec<u64>,
    pub wigner_even_only: Vec<bool>,
    /// Rescale |zeta|^2 so that |alpha_N(l)| takes this value; 0 keeps the coupling.
    pub wigner_abs_alpha: Vec<f64>,
    pub wigner_half_width: f64,
    pub wigner_points: usize,
    /// proj-N panels: grid span in core widths along the squeezing axes; 0 uses the square grid.
    pub wigner_natural_widths: f64,
    pub modulation_l: u64,
    pub modulation_abs_alpha: f64,
    pub modulation_delta_l: Vec<u64>,
    pub modulation_points_along: usize,
    pub modulation_points_across: usize,

    /// Largest relative band change accepted by convergence-check.
    pub convergence_tolerance: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            label: "zno-working-point".into(),
            outputs: vec![OutputKind::Spectra],
            out_dir: None,
            allow_expensive: false,
            exact_sigma: false,
            medium: MediumChoice::Solid,
            band_gap_ev: None,
            effective_mass_me: None,
            binding_energy_ev: None,
            dipole_d0_si: None,
            density_per_m3: None,
            wavelength_um: 3.2,
            field_v_per_m: None,
            intensity_w_per_cm2: None,
            duration_cycles: 6.0,
            cep_rad: 0.0,
            beam_radius_um: 40.0,
            interaction_length_um: 5e-3,
            bsv_r: None,
            bsv_energy_nj: None,
            bsv_wavelength_um: 1.6,
            bsv_bandwidth_nm: 50.0,
            bsv_beam_radius_um: 100.0,
            samples_per_cycle: 256,
            momentum_par_samples: 161,
            momentum_perp_samples: 81,
            momentum_taper: 0.0,
            max_order: 20,
            samples_per_order: 48,
            theta_samples: 16,
            theta_list_rad: vec![],
            sideband_orders: vec![8],
            zeta_source: ZetaSource::Fixed,
            zeta_abs2: 6.7e-10,
            theta_rad: 0.0,
            fock_r: None,
            joint_m_max: 60,
            joint_n_max: 60,
            marginal_m_max: 200,
            marginal_exact: false,
            projq_l: vec![],
            projq_log10_l_min: 0.0,
            projq_log10_l_max: 12.0,
            projq_l_points: 25,
            projq_exact: false,
            projn_m_max: 100,
            projn_theta_list_rad: vec![0.0],
            projn_theta_average: false,
            projn_exact: false,
            projn_sweep_r: vec![],
            projn_sweep_m: 50,
            projn_sweep_log10_zeta_abs2_min: -12.0,
            projn_sweep_log10_zeta_abs2_max: -8.0,
            projn_sweep_points: 41,
            wigner_state: WignerState::ProjQ,
            wigner_index: vec![10_000_000_000],
            wigner_delta_l: vec![0],
            wigner_even_only: vec![false],
            wigner_abs_alpha: vec![0.0],
            wigner_half_width: 5.0,
            wigner_points: 161,
            wigner_natural_widths: 4.0,
            modulation_l: 200,
            modulation_abs_alpha: 6.7,
            modulation_delta_l: vec![],
            modulation_points_along: 121,
            modulation_points_across: 41,
            convergence_tolerance: 0.1,
        }
    }
}

/// Squeezed-vacuum amplitude used when neither bsv_r nor bsv_energy_nJ is given.
pub const DEFAULT_BSV_R: f64 = 13.6;
/// Peak field used when neither field_V_per_m nor intensity_W_per_cm2 is given.
pub const DEFAULT_FIELD_V_PER_M: f64 = 1.3e9;

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Invalid { field: field.to_string(), message: message.into() }
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, "must be finite"))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v >= min {
        Ok(())
    } else {
        Err(invalid(field, format!("must be at least {min}, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    /// Fock-space outputs need sideband couplings.
    pub fn wants_fock(&self) -> bool {
        self.outputs.iter().any(|o| {
            matches!(o, OutputKind::JointDistribution | OutputKind::Marginal | OutputKind::ProjQ | OutputKind::ProjN | OutputKind::Wigner)
        })
    }

    pub fn needs_spectrum(&self) -> bool {
        self.wants(OutputKind::Spectra) || (self.wants_fock() && self.zeta_source == ZetaSource::Spectrum)
    }

    /// Schema checks beyond what the parser enforces. Errors name the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.label.is_empty() || !self.label.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(invalid("label", "must be non-empty and use only [A-Za-z0-9._-]"));
        }
        if self.outputs.is_empty() {
            return Err(invalid("outputs", "request at least one output"));
        }
        match self.medium {
            MediumChoice::Solid if self.binding_energy_ev.is_some() => {
                return Err(invalid("binding_energy_eV", "only applies to medium = \"atom\""))
            }
            MediumChoice::Atom if self.band_gap_ev.is_some() => {
                return Err(invalid("band_gap_eV", "only applies to medium = \"solid\""))
            }
            MediumChoice::Atom if self.effective_mass_me.is_some() => {
                return Err(invalid("effective_mass_me", "only applies to medium = \"solid\""))
            }
            _ => {}
        }
        for (k, v) in [
            ("band_gap_eV", self.band_gap_ev),
            ("effective_mass_me", self.effective_mass_me),
            ("binding_energy_eV", self.binding_energy_ev),
            ("density_per_m3", self.density_per_m3),
        ] {
            if let Some(v) = v {
                positive(k, v)?;
            }
        }
        if let Some(d) = self.dipole_d0_si {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(invalid("dipole_d0_SI", "must be non-negative"));
            }
        }
        positive("wavelength_um", self.wavelength_um)?;
        if self.field_v_per_m.is_some() && self.intensity_w_per_cm2.is_some() {
            return Err(invalid("intensity_W_per_cm2", "conflicts with field_V_per_m; set only one"));
        }
        for (k, v) in [("field_V_per_m", self.field_v_per_m), ("intensity_W_per_cm2", self.intensity_w_per_cm2)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(invalid(k, "must be non-negative"));
                }
            }
        }
        positive("duration_cycles", self.duration_cycles)?;
        finite("cep_rad", self.cep_rad)?;
        positive("beam_radius_um", self.beam_radius_um)?;
        positive("interaction_length_um", self.interaction_length_um)?;
        if self.bsv_r.is_some() && self.bsv_energy_nj.is_some() {
            return Err(invalid("bsv_energy_nJ", "conflicts with bsv_r; set only one"));
        }
        if let Some(r) = self.bsv_r {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(invalid("bsv_r", "must be non-negative"));
            }
        }
        if let Some(e) = self.bsv_energy_nj {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(invalid("bsv_energy_nJ", "must be non-negative"));
            }
        }
        positive("bsv_wavelength_um", self.bsv_wavelength_um)?;
        positive("bsv_bandwidth_nm", self.bsv_bandwidth_nm)?;
        positive("bsv_beam_radius_um", self.bsv_beam_radius_um)?;
        at_least("samples_per_cycle", self.samples_per_cycle, 16)?;
        at_least("momentum_par_samples", self.momentum_par_samples, 2)?;
        at_least("momentum_perp_samples", self.momentum_perp_samples, 2)?;
        if !(0.0..1.0).contains(&self.momentum_taper) {
            return Err(invalid("momentum_taper", "must lie in [0, 1)"));
        }
        at_least("max_order", self.max_order, 1)?;
        at_least("samples_per_order", self.samples_per_order, 2)?;
        at_least("theta_samples", self.theta_samples, 2)?;
        for t in &self.theta_list_rad {
            finite("theta_list_rad", *t)?;
        }
        if self.wants_fock() && self.sideband_orders.is_empty() {
            return Err(invalid("sideband_orders", "list at least one order"));
        }
        if let Some(&n) = self.sideband_orders.iter().find(|&&n| n == 0 || n > self.max_order) {
            if self.zeta_source == ZetaSource::Spectrum {
                return Err(invalid("sideband_orders", format!("order {n} is outside 1..=max_order ({})", self.max_order)));
            }
        }
        if !(self.zeta_abs2 >= 0.0 && self.zeta_abs2.is_finite()) {
            return Err(invalid("zeta_abs2", "must be non-negative"));
        }
        finite("theta_rad", self.theta_rad)?;
        if let Some(r) = self.fock_r {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(invalid("fock_r", "must be non-negative"));
            }
        }
        if self.projq_l.is_empty() {
            finite("projq_log10_l_min", self.projq_log10_l_min)?;
            finite("projq_log10_l_max", self.projq_log10_l_max)?;
            if self.projq_log10_l_min < 0.0 || self.projq_log10_l_max < self.projq_log10_l_min || self.projq_log10_l_max > 18.0 {
                return Err(invalid("projq_log10_l_max", "need 0 <= projq_log10_l_min <= projq_log10_l_max <= 18"));
            }
            at_least("projq_l_points", self.projq_l_points, 1)?;
        }
        for t in &self.projn_theta_list_rad {
            finite("projn_theta_list_rad", *t)?;
        }
        if self.wants(OutputKind::ProjN) && self.projn_theta_list_rad.is_empty() {
            return Err(invalid("projn_theta_list_rad", "list at least one angle"));
        }
        for r in &self.projn_sweep_r {
            positive("projn_sweep_r", *r)?;
        }
        if !self.projn_sweep_r.is_empty() {
            finite("projn_sweep_log10_zeta_abs2_min", self.projn_sweep_log10_zeta_abs2_min)?;
            finite("projn_sweep_log10_zeta_abs2_max", self.projn_sweep_log10_zeta_abs2_max)?;
            if self.projn_sweep_log10_zeta_abs2_max < self.projn_sweep_log10_zeta_abs2_min {
                return Err(invalid("projn_sweep_log10_zeta_abs2_max", "must not be below the minimum"));
            }
            at_least("projn_sweep_points", self.projn_sweep_points, 1)?;
        }
        let panels = self.wigner_panel_count()?;
        if self.wants(OutputKind::Wigner) && panels == 0 {
            return Err(invalid("wigner_index", "list at least one panel"));
        }
        for a in &self.wigner_abs_alpha {
            if !(*a >= 0.0 && a.is_finite()) {
                return Err(invalid("wigner_abs_alpha", "must be non-negative"));
            }
        }
        positive("wigner_half_width", self.wigner_half_width)?;
        at_least("wigner_points", self.wigner_points, 2)?;
        if !(self.wigner_natural_widths >= 0.0 && self.wigner_natural_widths.is_finite()) {
            return Err(invalid("wigner_natural_widths", "must be non-negative"));
        }
        if !(self.modulation_abs_alpha >= 0.0 && self.modulation_abs_alpha.is_finite()) {
            return Err(invalid("modulation_abs_alpha", "must be non-negative"));
        }
        at_least("modulation_points_along", self.modulation_points_along, 2)?;
        at_least("modulation_points_across", self.modulation_points_across, 2)?;
        positive("convergence_tolerance", self.convergence_tolerance)?;
        // constructors repeat some checks with physics-level messages
        self.medium_model()?;
        self.pulse()?;
        self.bsv()?;
        Ok(())
    }

    /// Number of Wigner panels; per-panel lists must have length 1 or the common length.
    pub fn wigner_panel_count(&self) -> Result<usize, CliError> {
        let lens = [
            ("wigner_index", self.wigner_index.len()),
            ("wigner_delta_l", self.wigner_delta_l.len()),
            ("wigner_even_only", self.wigner_even_only.len()),
            ("wigner_abs_alpha", self.wigner_abs_alpha.len()),
        ];
        let n = lens.iter().map(|x| x.1).max().unwrap_or(0);
        for (k, len) in lens {
            if len != 1 && len != n {
                return Err(invalid(k, format!("has {len} entries; expected 1 or {n}")));
            }
        }
        Ok(n)
    }

    pub fn medium_model(&self) -> Result<MediumModel, CliError> {
        let m = match self.medium {
            MediumChoice::Solid => {
                let zno = MediumModel::zno(4e28);
                let qshhg::sfa::MediumKind::Solid { gap_j, effective_mass_kg, dipole_d0_si } = zno.kind else {
                    unreachable!("ZnO preset is a solid")
                };
                to_solid(
                    self.band_gap_ev.map_or(gap_j, |e| e * units::EV),
                    self.effective_mass_me.map_or(effective_mass_kg, |m| m * units::M_E),
                    self.dipole_d0_si.unwrap_or(dipole_d0_si),
                    self.density_per_m3.unwrap_or(zno.number_density_per_m3),
                )
            }
            MediumChoice::Atom => {
                let h = MediumModel::hydrogen(1e24);
                let qshhg::sfa::MediumKind::Atom { binding_energy_j, dipole_d0_si, .. } = h.kind else {
                    unreachable!("hydrogen preset is an atom")
                };
                MediumModel::atom(
                    self.binding_energy_ev.map_or(binding_energy_j, |e| e * units::EV),
                    self.dipole_d0_si.unwrap_or(dipole_d0_si),
                    self.density_per_m3.unwrap_or(h.number_density_per_m3),
                )
            }
        };
        m.map_err(|e| invalid("medium", e.to_string()))
    }

    pub fn peak_field_v_per_m(&self) -> f64 {
        match (self.field_v_per_m, self.intensity_w_per_cm2) {
            (Some(f), _) => f,
            (None, Some(i)) => units::field_from_intensity(i * 1e4),
            (None, None) => DEFAULT_FIELD_V_PER_M,
        }
    }

    pub fn pulse(&self) -> Result<LaserPulse, CliError> {
        let mut p = LaserPulse::new(self.wavelength_um * 1e-6, self.peak_field_v_per_m(), self.duration_cycles)
            .map_err(|e| invalid("wavelength_um", e.to_string()))?;
        p.cep_rad = self.cep_rad;
        Ok(p)
    }

    pub fn geometry(&self) -> Result<PropagationGeometry, CliError> {
        let n0 = self.medium_model()?.number_density_per_m3;
        PropagationGeometry::new(n0, self.beam_radius_um * 1e-6, self.interaction_length_um * 1e-6)
            .map_err(|e| invalid("beam_radius_um", e.to_string()))
    }

    pub fn bsv(&self) -> Result<BsvBeam, CliError> {
        let (l, dl, w) = (self.bsv_wavelength_um * 1e-6, self.bsv_bandwidth_nm * 1e-9, self.bsv_beam_radius_um * 1e-6);
        let b = match self.bsv_energy_nj {
            Some(e) => bsv_parameters(e * 1e-9, l, dl, w),
            None => BsvBeam::from_squeezing(self.bsv_r.unwrap_or(DEFAULT_BSV_R), l, dl, w),
        };
        b.map_err(|e| invalid("bsv_r", e.to_string()))
    }

    /// Squeeze amplitude of the Fock-space stages.
    pub fn fock_squeezing(&self) -> Result<f64, CliError> {
        Ok(self.fock_r.unwrap_or(self.bsv()?.r))
    }

    /// Momentum extents come from the drive; a field-free drive gets none and must not reach the kernels.
    pub fn grid_spec(&self, pulse: &LaserPulse, medium: &MediumModel) -> GridSpec {
        GridSpec {
            samples_per_period: self.samples_per_cycle,
            span_periods: None,
            max_harmonic: (self.max_order + 3) as f64,
            momentum: MomentumGrid::for_drive(pulse, medium, self.momentum_par_samples, self.momentum_perp_samples)
                .with_taper(self.momentum_taper),
            sigma: if self.exact_sigma { SigmaMethod::ExactRecursion } else { SigmaMethod::HighFrequency },
        }
    }

    /// BSV photon numbers for the proj-q stage: sorted, each paired with its opposite-parity neighbour.
    pub fn projq_ls(&self) -> Vec<u64> {
        let base: Vec<u64> = if !self.projq_l.is_empty() {
            self.projq_l.clone()
        } else {
            let n = self.projq_l_points;
            (0..n)
                .map(|i| {
                    let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    10f64.powf(self.projq_log10_l_min + t * (self.projq_log10_l_max - self.projq_log10_l_min)).round() as u64
                })
                .collect()
        };
        let mut ls: Vec<u64> = if self.projq_l.is_empty() { base.iter().flat_map(|&l| [l, l + 1]).collect() } else { base };
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    pub fn projn_sweep_zetas(&self) -> Vec<f64> {
        let n = self.projn_sweep_points;
        let (a, b) = (self.projn_sweep_log10_zeta_abs2_min, self.projn_sweep_log10_zeta_abs2_max);
        (0..n).map(|i| 10f64.powf(if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 })).collect()
    }
}
