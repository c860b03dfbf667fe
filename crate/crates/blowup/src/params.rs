//! The parameter cascade driving the embedding algorithm: a strictly
//! increasing chain eps < eps1 < eps2 < d3 < d2 < d1 < delta together with the
//! degree bound and restriction constants.

use crate::error::{Error, Result};
use crate::rat::{rat, rat_serde, Rat};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterCascade {
    /// Regularity window width used by the selection conditions.
    #[serde(with = "rat_serde")]
    pub eps: Rat,
    /// Tolerated fraction of pairwise-condition failures (ε′).
    #[serde(with = "rat_serde")]
    pub eps1: Rat,
    /// Exceptional-host audit scale (ε″).
    #[serde(with = "rat_serde")]
    pub eps2: Rat,
    /// Hall-condition constant (δ‴).
    #[serde(with = "rat_serde")]
    pub d3: Rat,
    /// Reorder cadence and host-sweep coverage threshold (δ″).
    #[serde(with = "rat_serde")]
    pub d2: Rat,
    /// Buffer fraction per cluster (δ′).
    #[serde(with = "rat_serde")]
    pub d1: Rat,
    /// Minimum-degree fraction of the super-regular pairs (δ).
    #[serde(with = "rat_serde")]
    pub delta: Rat,
    /// Bound on the pattern's maximum degree.
    pub max_degree: usize,
    /// Minimum restriction-set fraction (each allowed set has size >= c·N).
    #[serde(with = "rat_serde")]
    pub c: Rat,
    /// Maximum fraction of restricted vertices per cluster (α).
    #[serde(with = "rat_serde")]
    pub alpha: Rat,
    /// Batch fraction for the round-based variant.
    #[serde(with = "rat_serde")]
    pub alpha_batch: Rat,
}

impl ParameterCascade {
    /// Defaults derived from δ. The buffer fraction is δ/4 capped at 1/8
    /// (the cap keeps buffer selection feasible for degree-3 trees); the
    /// reorder cadence sits at a quarter of it so collapsing pools are
    /// caught early, and the three epsilons pack close beneath so the
    /// selection windows stay satisfiable on pseudorandom hosts at moderate
    /// N while the chain ordering holds strictly.
    pub fn defaults_for(delta: Rat, max_degree: usize, r: usize) -> Result<Self> {
        if delta <= rat(0, 1) || delta > rat(1, 1) {
            return Err(Error::Usage(format!(
                "delta must lie in (0, 1], got {}",
                crate::rat::format_rat(&delta)
            )));
        }
        if max_degree == 0 || r < 2 {
            return Err(Error::Usage("defaults need max_degree >= 1 and r >= 2".into()));
        }
        let d1 = (delta / rat(4, 1)).min(rat(1, 8));
        let d2 = d1 / rat(4, 1);
        let cascade = ParameterCascade {
            eps: d2 * rat(9, 10),
            eps1: d2 * rat(93, 100),
            eps2: d2 * rat(19, 20),
            d3: d2 * rat(97, 100),
            d2,
            d1,
            delta,
            max_degree,
            c: rat(1, 4),
            alpha: rat(1, 16),
            alpha_batch: rat(1, 20),
        };
        cascade.validate()?;
        Ok(cascade)
    }

    /// Checks the strict chain 0 < eps < eps1 < eps2 < d3 < d2 < d1 < delta <= 1.
    pub fn validate(&self) -> Result<()> {
        let chain = [
            ("eps", self.eps),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("d3", self.d3),
            ("d2", self.d2),
            ("d1", self.d1),
            ("delta", self.delta),
        ];
        if self.eps <= rat(0, 1) {
            return Err(Error::Invariant("cascade: eps must be positive".into()));
        }
        for w in chain.windows(2) {
            if w[0].1 >= w[1].1 {
                return Err(Error::Invariant(format!(
                    "cascade: {} must be strictly below {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if self.delta > rat(1, 1) {
            return Err(Error::Invariant("cascade: delta must be at most 1".into()));
        }
        for (name, v) in [("c", self.c), ("alpha", self.alpha), ("alpha_batch", self.alpha_batch)] {
            if v <= rat(0, 1) || v > rat(1, 1) {
                return Err(Error::Invariant(format!("cascade: {name} must lie in (0, 1]")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_form_a_strict_chain() {
        for (num, den) in [(1i128, 1i128), (1, 2), (3, 10), (9, 10)] {
            let c = ParameterCascade::defaults_for(rat(num, den), 4, 3).unwrap();
            c.validate().unwrap();
        }
    }

    #[test]
    fn buffer_fraction_capped() {
        let c = ParameterCascade::defaults_for(rat(1, 1), 3, 2).unwrap();
        assert_eq!(c.d1, rat(1, 8));
        let c = ParameterCascade::defaults_for(rat(1, 4), 3, 2).unwrap();
        assert_eq!(c.d1, rat(1, 16));
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(ParameterCascade::defaults_for(rat(0, 1), 3, 2).is_err());
        assert!(ParameterCascade::defaults_for(rat(3, 2), 3, 2).is_err());
    }

    #[test]
    fn rejects_out_of_order_chain() {
        let mut c = ParameterCascade::defaults_for(rat(1, 2), 3, 2).unwrap();
        c.eps = c.d1;
        assert!(c.validate().is_err());
    }
}
