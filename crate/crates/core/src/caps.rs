//! Named size limits shared by the search engines.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest universe swept by 2^n brute-force enumeration.
    pub powerset: usize,
    /// Largest number of homomorphisms materialized.
    pub homs: usize,
    /// Universe cap for the linear axiom sweeps (i0, i2, i4, i5, c0, c1).
    pub axioms: usize,
    /// Universe cap for the sweeps quantifying over pairs of pairs (i1, i3).
    pub pasch_axioms: usize,
    /// Universe cap for the normality sweep.
    pub normal: usize,
    /// Universe cap for the convex Pasch sweep.
    pub convex_pasch: usize,
    /// Largest source structure for second-dual computations.
    pub bidual_x: usize,
    /// Largest first dual for second-dual computations.
    pub bidual_xstar: usize,
    /// Wall-clock budget for a single search, in milliseconds (0 = none).
    pub timeout_ms: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            powerset: 24,
            homs: 1 << 20,
            axioms: 14,
            pasch_axioms: 10,
            normal: 10,
            convex_pasch: 8,
            bidual_x: 6,
            bidual_xstar: 64,
            timeout_ms: 0,
        }
    }
}

pub const CAP_NAMES: &[&str] = &[
    "powerset",
    "homs",
    "axioms",
    "pasch_axioms",
    "normal",
    "convex_pasch",
    "bidual_x",
    "bidual_xstar",
    "timeout_ms",
];

impl Caps {
    /// Applies `name=value` overrides separated by commas, e.g.
    /// `homs=4096,timeout_ms=500`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("cap override `{item}` lacks `=`")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("cap `{name}` needs a non-negative integer")))?;
            self.set(name.trim(), value)?;
        }
        Ok(self)
    }

    pub fn set(&mut self, name: &str, value: u64) -> Result<()> {
        if value == 0 && name != "timeout_ms" {
            return Err(Error::Parse(format!("cap `{name}` must be positive")));
        }
        let v = value as usize;
        match name {
            "powerset" => self.powerset = v.min(crate::mask::MASK_BITS),
            "homs" => self.homs = v,
            "axioms" => self.axioms = v,
            "pasch_axioms" => self.pasch_axioms = v,
            "normal" => self.normal = v,
            "convex_pasch" => self.convex_pasch = v,
            "bidual_x" => self.bidual_x = v,
            "bidual_xstar" => self.bidual_xstar = v.min(crate::mask::MASK_BITS),
            "timeout_ms" => self.timeout_ms = value,
            _ => return Err(Error::Parse(format!("unknown cap `{name}`"))),
        }
        Ok(())
    }

    pub fn deadline(&self) -> Deadline {
        Deadline(if self.timeout_ms == 0 {
            None
        } else {
            Some(Instant::now() + Duration::from_millis(self.timeout_ms))
        })
    }

    pub(crate) fn check(&self, what: &'static str, size: usize, cap: usize) -> Result<()> {
        if size > cap {
            Err(Error::UniverseTooLarge { what, size, cap })
        } else {
            Ok(())
        }
    }
}

/// Optional wall-clock limit, polled by long searches.
#[derive(Clone, Copy, Debug)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Deadline(None)
    }

    pub fn check(&self) -> Result<()> {
        match self.0 {
            Some(t) if Instant::now() >= t => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let caps = Caps::default()
            .with_overrides("homs=16, timeout_ms=0")
            .unwrap();
        assert_eq!(caps.homs, 16);
        assert!(Caps::default().with_overrides("bogus=1").is_err());
        assert!(Caps::default().with_overrides("homs=0").is_err());
        assert!(Caps::default().with_overrides("homs").is_err());
    }
}
