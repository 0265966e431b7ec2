use crate::error::{Error, Result};

/// Bending rigidity of a bare lipid membrane, µm·nN.
pub const KAPPA_BARE: f64 = 8.22e-5;

/// Constitutive law for the osmotic pressure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PressureLaw {
    Off,
    /// van 't Hoff pressure with `K_V = iRTn` and concentration ratio `c/n`.
    Exact,
    /// Quadratic penalty around a preferred volume.
    Phenomenological,
}

/// Physical constants. Units are µm, nN and s throughout.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameters {
    pub kappa_b: f64,
    pub kappa_c: f64,
    /// Spontaneous curvature of a full protein coat, 1/µm.
    pub h0_c: f64,
    pub k_a: f64,
    pub area_ref: Option<f64>,
    /// Prescribed surface tension; overrides the elastic law when set.
    pub tension: Option<f64>,
    pub pressure_law: PressureLaw,
    pub k_v: f64,
    /// Ambient concentration over enclosed solute amount, 1/µm³.
    pub conc_ratio: f64,
    pub volume_ref: Option<f64>,
    pub epsilon: f64,
    pub eta: f64,
    pub xi: f64,
    pub mobility: f64,
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            kappa_b: KAPPA_BARE,
            kappa_c: 0.0,
            h0_c: 0.0,
            k_a: 0.0,
            area_ref: None,
            tension: None,
            pressure_law: PressureLaw::Off,
            k_v: 0.0,
            conc_ratio: 0.0,
            volume_ref: None,
            epsilon: 0.0,
            eta: 0.0,
            xi: 1.0,
            mobility: 0.0,
        }
    }
}

impl Parameters {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.kappa_b, self.kappa_c, self.h0_c, self.k_a, self.k_v, self.conc_ratio,
            self.epsilon, self.eta, self.xi, self.mobility,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        let fail = |m: &str| Err(Error::InvalidParams(m.into()));
        if !(self.kappa_b > 0.0) {
            return fail("kappa_b must be positive");
        }
        if self.kappa_b + self.kappa_c <= 0.0 {
            return fail("kappa_b + kappa_c must be positive");
        }
        if self.k_a < 0.0 || self.k_v < 0.0 || self.eta < 0.0 || self.mobility < 0.0 {
            return fail("k_a, k_v, eta and mobility must be nonnegative");
        }
        if !(self.xi > 0.0) {
            return fail("xi must be positive");
        }
        if let Some(a) = self.area_ref {
            if !(a > 0.0) {
                return Err(Error::MissingPreferredArea);
            }
        }
        match self.pressure_law {
            PressureLaw::Exact if !(self.conc_ratio > 0.0) => fail("exact pressure law needs conc_ratio > 0"),
            PressureLaw::Phenomenological if !self.volume_ref.is_some_and(|v| v > 0.0) => {
                fail("phenomenological pressure law needs volume_ref > 0")
            }
            _ => Ok(()),
        }
    }
}

/// Per-vertex rigidity and spontaneous curvature for protein density `phi`.
pub fn protein_modulated_properties(phi: &[f64], params: &Parameters) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some((v, &x)) = phi.iter().enumerate().find(|(_, &x)| !(0.0..=1.0).contains(&x)) {
        return Err(Error::OutOfRangePhi { vertex: v, value: x });
    }
    Ok(modulated_unchecked(phi, params))
}

pub(crate) fn modulated_unchecked(phi: &[f64], params: &Parameters) -> (Vec<f64>, Vec<f64>) {
    let kappa = phi.iter().map(|p| params.kappa_b + params.kappa_c * p).collect();
    let h0 = phi.iter().map(|p| params.h0_c * p).collect();
    (kappa, h0)
}

/// Implicit membrane reservoir attached to an open patch.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Reservoir {
    pub enabled: bool,
    pub area: f64,
    pub volume: f64,
}

impl Reservoir {
    pub fn area(&self) -> f64 {
        if self.enabled { self.area } else { 0.0 }
    }

    pub fn volume(&self) -> f64 {
        if self.enabled { self.volume } else { 0.0 }
    }
}

/// Surface tension for total area `area`.
pub fn surface_tension(area: f64, params: &Parameters) -> Result<f64> {
    if let Some(l) = params.tension {
        return Ok(l);
    }
    if params.k_a == 0.0 {
        return Ok(0.0);
    }
    let a0 = params.area_ref.ok_or(Error::MissingPreferredArea)?;
    Ok(params.k_a * (area - a0) / a0)
}

/// Osmotic pressure difference for total volume `volume`.
pub fn osmotic_pressure(volume: f64, params: &Parameters) -> Result<f64> {
    match params.pressure_law {
        PressureLaw::Off => Ok(0.0),
        _ if !(volume > 0.0) => Err(Error::NonPositiveVolume(volume)),
        PressureLaw::Exact => Ok(params.k_v * (1.0 / volume - params.conc_ratio)),
        PressureLaw::Phenomenological => {
            let v0 = params.volume_ref.ok_or_else(|| Error::InvalidParams("volume_ref missing".into()))?;
            Ok(-params.k_v * (volume - v0) / (v0 * v0))
        }
    }
}

pub fn pressure_energy(volume: f64, params: &Parameters) -> Result<f64> {
    match params.pressure_law {
        PressureLaw::Off => Ok(0.0),
        _ if !(volume > 0.0) => Err(Error::NonPositiveVolume(volume)),
        PressureLaw::Exact => {
            let rc = params.conc_ratio * volume;
            Ok(params.k_v * (rc - rc.ln() - 1.0))
        }
        PressureLaw::Phenomenological => {
            let v0 = params.volume_ref.ok_or_else(|| Error::InvalidParams("volume_ref missing".into()))?;
            Ok(0.5 * params.k_v * (volume - v0).powi(2) / (v0 * v0))
        }
    }
}

/// Elastic stretching energy, or the work `tension * (A - A_ref)` under a
/// prescribed tension.
pub fn stretching_energy(area: f64, params: &Parameters) -> Result<f64> {
    if params.tension.is_none() && params.k_a == 0.0 {
        return Ok(0.0);
    }
    let a0 = params.area_ref.ok_or(Error::MissingPreferredArea)?;
    Ok(match params.tension {
        Some(l) => l * (area - a0),
        None => params.k_a * (area - a0).powi(2) / (2.0 * a0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn modulated_properties() {
        let p = Parameters { kappa_c: 3.0 * KAPPA_BARE, h0_c: 6.0, ..Default::default() };
        let (k, h) = protein_modulated_properties(&[0.0, 0.5, 1.0], &p).unwrap();
        assert_eq!(k[0], KAPPA_BARE);
        assert_eq!(h[0], 0.0);
        assert_eq!(h[1], 3.0);
        assert_relative_eq!(k[2], 4.0 * KAPPA_BARE);
        assert!(matches!(protein_modulated_properties(&[1.5], &p), Err(Error::OutOfRangePhi { vertex: 0, .. })));
    }

    #[test]
    fn tension_laws() {
        let mut p = Parameters { k_a: 1.0, area_ref: Some(2.0), ..Default::default() };
        assert_eq!(surface_tension(2.0, &p).unwrap(), 0.0);
        assert_relative_eq!(surface_tension(2.02, &p).unwrap(), 0.01, epsilon = 1e-15);
        p.area_ref = Some(1.0);
        assert_relative_eq!(stretching_energy(1.1, &p).unwrap(), 0.005, epsilon = 1e-15);
        p.tension = Some(1e-4);
        assert_eq!(surface_tension(123.0, &p).unwrap(), 1e-4);
        let none = Parameters { k_a: 1.0, ..Default::default() };
        assert_eq!(surface_tension(1.0, &none), Err(Error::MissingPreferredArea));
    }

    #[test]
    fn pressure_laws() {
        let mut p = Parameters { pressure_law: PressureLaw::Exact, k_v: 0.1, conc_ratio: 0.5, ..Default::default() };
        assert_eq!(osmotic_pressure(2.0, &p).unwrap(), 0.0);
        assert_eq!(pressure_energy(2.0, &p).unwrap(), 0.0);
        assert!(osmotic_pressure(1.0, &p).unwrap() > 0.0 && osmotic_pressure(3.0, &p).unwrap() < 0.0);
        assert_eq!(osmotic_pressure(-1.0, &p), Err(Error::NonPositiveVolume(-1.0)));
        p.pressure_law = PressureLaw::Phenomenological;
        p.k_v = 0.5;
        p.volume_ref = Some(2.0);
        assert_eq!(osmotic_pressure(2.0, &p).unwrap(), 0.0);
        assert_relative_eq!(pressure_energy(2.2, &p).unwrap(), 0.0025, epsilon = 1e-15);
    }

    #[test]
    fn exact_and_quadratic_laws_agree_to_third_order() {
        // with c/n = 1/V0 the exact law expands to K_V (dV/V0)^2 / 2 + O(dV^3)
        let v0 = 4.0;
        let exact = Parameters { pressure_law: PressureLaw::Exact, k_v: 1.0, conc_ratio: 1.0 / v0, ..Default::default() };
        let quad = Parameters {
            pressure_law: PressureLaw::Phenomenological,
            k_v: 1.0,
            volume_ref: Some(v0),
            ..Default::default()
        };
        let diff = |d: f64| (pressure_energy(v0 + d, &exact).unwrap() - pressure_energy(v0 + d, &quad).unwrap()).abs();
        let slope = (diff(0.02) / diff(0.01)).log2();
        assert!((slope - 3.0).abs() < 0.05, "slope {slope}");
    }
}
