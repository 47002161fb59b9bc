use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle of constant kinetic friction. Bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionPatch {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub mu: f64,
}

impl FrictionPatch {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        (self.x_min..=self.x_max).contains(&p[0]) && (self.y_min..=self.y_max).contains(&p[1])
    }
}

/// Piecewise-constant friction over the table. Later patches shadow earlier
/// ones where they overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionMap {
    pub default_mu: f64,
    #[serde(default)]
    pub patches: Vec<FrictionPatch>,
}

impl Default for FrictionMap {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl FrictionMap {
    pub fn uniform(mu: f64) -> Self {
        Self {
            default_mu: mu,
            patches: Vec::new(),
        }
    }

    /// Three equal bands across `x`, increasing friction `0.8 / 1.2 / 1.5`.
    pub fn three_bands(x_max: f64, y_max: f64) -> Self {
        Self::bands(x_max, y_max, &[0.8, 1.2, 1.5])
    }

    /// Equal-width bands along `x`, one per coefficient.
    pub fn bands(x_max: f64, y_max: f64, mus: &[f64]) -> Self {
        let width = x_max / mus.len() as f64;
        let patches = mus
            .iter()
            .enumerate()
            .map(|(i, &mu)| FrictionPatch {
                x_min: i as f64 * width,
                x_max: (i + 1) as f64 * width,
                y_min: 0.0,
                y_max,
                mu,
            })
            .collect();
        Self {
            default_mu: mus.first().copied().unwrap_or(1.0),
            patches,
        }
    }

    /// Coefficient of the last declared patch covering `p`, else the default.
    pub fn friction_at(&self, p: [f64; 2]) -> f64 {
        self.patches
            .iter()
            .rev()
            .find(|patch| patch.contains(p))
            .map_or(self.default_mu, |patch| patch.mu)
    }

    pub fn max_mu(&self) -> f64 {
        self.patches.iter().map(|p| p.mu).fold(self.default_mu, f64::max)
    }

    pub(crate) fn validate(&self, x_max: f64, y_max: f64, errors: &mut Vec<String>) {
        if !(self.default_mu > 0.0) {
            errors.push(format!("friction.default_mu: must be positive, got {}", self.default_mu));
        }
        for (i, p) in self.patches.iter().enumerate() {
            if !(p.mu > 0.0) {
                errors.push(format!("friction.patches[{i}].mu: must be positive, got {}", p.mu));
            }
            let inside = 0.0 <= p.x_min && p.x_min <= p.x_max && p.x_max <= x_max && 0.0 <= p.y_min && p.y_min <= p.y_max && p.y_max <= y_max;
            if !inside {
                errors.push(format!("friction.patches[{i}]: rectangle must lie within the table"));
            }
        }
    }
}
