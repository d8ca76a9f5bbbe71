//! Scenario families that regenerate the reference figures.

use std::fmt;
use std::str::FromStr;

use crate::sampling::PrincipalConfig;

/// Grid used wherever the figures sweep "various values".
pub const STANDARD_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    /// Principal-free convergence.
    Fig1,
    /// Always-trusted principal across p-bias, plus the principal-free baseline.
    Fig2,
    /// Misleading principal (p-bias 0.3) across p-trust; 0.1 is the narrated case.
    Fig3,
    /// Random principal (p-bias 0.5) across p-trust.
    Fig4,
    /// Random, always-trusted principal over 1000 decisions.
    LongHorizon,
}

impl PresetName {
    pub const ALL: [PresetName; 5] = [
        PresetName::Fig1,
        PresetName::Fig2,
        PresetName::Fig3,
        PresetName::Fig4,
        PresetName::LongHorizon,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Fig1 => "fig1",
            PresetName::Fig2 => "fig2",
            PresetName::Fig3 => "fig3",
            PresetName::Fig4 => "fig4",
            PresetName::LongHorizon => "long-horizon",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = PresetName::ALL.iter().map(|p| p.as_str()).collect();
                format!(
                    "unknown preset `{s}` (expected one of {})",
                    known.join(", ")
                )
            })
    }
}

/// One line in a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub principal: PrincipalConfig,
    /// The configuration the figure's prose walks through.
    pub narrated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: PresetName,
    pub horizon: usize,
    pub curves: Vec<Curve>,
}

fn baseline() -> Curve {
    Curve {
        label: "no-principal".to_string(),
        principal: PrincipalConfig::default(),
        narrated: false,
    }
}

fn principal_curve(label: String, p_bias: f64, p_trust: f64, narrated: bool) -> Curve {
    Curve {
        label,
        principal: PrincipalConfig {
            enabled: true,
            p_bias,
            p_trust,
            ..PrincipalConfig::default()
        },
        narrated,
    }
}

impl Preset {
    pub fn new(name: PresetName) -> Self {
        let (horizon, curves) = match name {
            PresetName::Fig1 => (100, vec![baseline()]),
            PresetName::Fig2 => {
                let mut curves: Vec<_> = STANDARD_GRID
                    .iter()
                    .map(|&pb| principal_curve(format!("p-bias-{pb}"), pb, 1.0, false))
                    .collect();
                curves.push(baseline());
                (100, curves)
            }
            PresetName::Fig3 => (
                100,
                STANDARD_GRID
                    .iter()
                    .map(|&pt| principal_curve(format!("p-trust-{pt}"), 0.3, pt, pt == 0.1))
                    .collect(),
            ),
            PresetName::Fig4 => (
                100,
                STANDARD_GRID
                    .iter()
                    .map(|&pt| principal_curve(format!("p-trust-{pt}"), 0.5, pt, false))
                    .collect(),
            ),
            PresetName::LongHorizon => (
                1000,
                vec![principal_curve("p-bias-0.5".to_string(), 0.5, 1.0, false)],
            ),
        };
        Preset {
            name,
            horizon,
            curves,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_counts() {
        assert_eq!(Preset::new(PresetName::Fig1).curves.len(), 1);
        let fig2 = Preset::new(PresetName::Fig2);
        assert_eq!(fig2.curves.len(), 6);
        assert!(fig2
            .curves
            .iter()
            .filter(|c| c.principal.enabled)
            .all(|c| c.principal.p_trust == 1.0));
        let fig4 = Preset::new(PresetName::Fig4);
        assert!(fig4.curves.iter().all(|c| c.principal.p_bias == 0.5));
        let long = Preset::new(PresetName::LongHorizon);
        assert_eq!(long.horizon, 1000);
    }

    #[test]
    fn narrated_case_is_flagged() {
        let fig3 = Preset::new(PresetName::Fig3);
        let narrated: Vec<_> = fig3.curves.iter().filter(|c| c.narrated).collect();
        assert_eq!(narrated.len(), 1);
        assert_eq!(
            (narrated[0].principal.p_bias, narrated[0].principal.p_trust),
            (0.3, 0.1)
        );
    }

    #[test]
    fn names_round_trip() {
        for p in PresetName::ALL {
            assert_eq!(p.as_str().parse::<PresetName>().unwrap(), p);
        }
        assert!("fig9".parse::<PresetName>().is_err());
    }
}
