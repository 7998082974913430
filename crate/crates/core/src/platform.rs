//! Hardware mapping: the dispersive two-transmon coupling and level labels per platform.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One drive leg of the two-transmon scheme (all rad/ns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    /// Bare qubit–qubit coupling `g_k`.
    pub g: f64,
    /// Drive amplitude `Ω_k`.
    pub omega_drive_amp: f64,
    /// Anharmonicity `α_k`.
    pub alpha: f64,
    /// Detuning `Δ_k`.
    pub delta: f64,
}

/// `g̃ = gΩα / (√2 Δ (Δ − α))`
pub fn effective_two_qubit_coupling(p: &TransmonParams) -> Result<f64> {
    let denom = std::f64::consts::SQRT_2 * p.delta * (p.delta - p.alpha);
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Domain(format!(
            "effective coupling undefined for Δ = {}, α = {} (need Δ ≠ 0 and Δ ≠ α)",
            p.delta, p.alpha
        )));
    }
    Ok(p.g * p.omega_drive_amp * p.alpha / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Platform {
    #[serde(rename = "transmon-1q")]
    Transmon1q,
    #[serde(rename = "transmon-2q")]
    Transmon2q,
    #[serde(rename = "nv-1q")]
    Nv1q,
    #[serde(rename = "nv-2q")]
    Nv2q,
}

impl Platform {
    pub const ALL: [Platform; 4] = [Platform::Transmon1q, Platform::Transmon2q, Platform::Nv1q, Platform::Nv2q];

    pub fn tag(self) -> &'static str {
        match self {
            Platform::Transmon1q => "transmon-1q",
            Platform::Transmon2q => "transmon-2q",
            Platform::Nv1q => "nv-1q",
            Platform::Nv2q => "nv-2q",
        }
    }

    /// Platform levels playing `(|0⟩, |e⟩, |1⟩)`.
    pub fn levels(self) -> [&'static str; 3] {
        match self {
            Platform::Transmon1q => ["|g⟩", "|e⟩", "|f⟩"],
            Platform::Transmon2q => ["|fgg⟩", "|geg⟩", "|ggf⟩"],
            Platform::Nv1q => ["|m=-1⟩", "|m=0⟩", "|m=+1⟩"],
            Platform::Nv2q => ["|0↑⟩", "|a↑⟩", "|1↑⟩"],
        }
    }

    /// What physically realises `Ω₀, Ω₁`.
    pub fn coupling_kind(self) -> &'static str {
        match self {
            Platform::Transmon1q => "microwave drives on the g-e and e-f transitions",
            Platform::Transmon2q => "effective couplings g̃_k from parametrically modulated qubit frequencies",
            Platform::Nv1q => "microwave drives on the m=0 to m=±1 transitions",
            Platform::Nv2q => "electron-spin drives conditioned on the nuclear spin",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Platform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Platform::ALL
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| Error::UnknownPlatform(s.to_owned()))
    }
}

/// Abstract-to-platform level assignment for one gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMapping {
    pub platform: Platform,
    pub zero: String,
    pub excited: String,
    pub one: String,
    pub couplings: String,
}

pub fn map_to_platform(platform: Platform) -> LevelMapping {
    let [zero, excited, one] = platform.levels();
    LevelMapping {
        platform,
        zero: zero.into(),
        excited: excited.into(),
        one: one.into(),
        couplings: platform.coupling_kind().into(),
    }
}

/// Parses a platform tag and returns its mapping.
pub fn map_to_platform_tag(tag: &str) -> Result<LevelMapping> {
    Ok(map_to_platform(tag.parse()?))
}
