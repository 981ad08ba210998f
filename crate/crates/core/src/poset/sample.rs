use rand::seq::SliceRandom;
use rand::Rng;

use super::condition::Condition;
use super::validate::is_valid;
use super::variant::Variant;
use crate::error::Result;
use crate::ordinal::Ordinal;
use crate::walk::Walker;

/// Draws random conditions: domain points from `domain`, values `ω·k + j`
/// with `k < blocks` and `j < offsets`. Values that would break a clause are
/// dropped as they are drawn, so every sample is valid.
#[derive(Debug, Clone)]
pub struct ConditionSampler {
    pub domain: Vec<Ordinal>,
    pub points: (usize, usize),
    pub values: (usize, usize),
    pub blocks: u64,
    pub offsets: u64,
}

impl ConditionSampler {
    pub fn new(domain: Vec<Ordinal>) -> Self {
        ConditionSampler {
            domain,
            points: (1, 3),
            values: (1, 3),
            blocks: 4,
            offsets: 3,
        }
    }

    pub fn value<R: Rng>(&self, rng: &mut R) -> Ordinal {
        let k = rng.gen_range(0..self.blocks.max(1));
        let j = rng.gen_range(0..self.offsets.max(1));
        Ordinal::omega().mul_nat(k).add(&Ordinal::from(j))
    }

    /// `None` when the domain cannot supply the requested number of points.
    pub fn sample<R: Rng>(&self, rng: &mut R, variant: &Variant, walker: &Walker) -> Result<Option<Condition>> {
        let mut allowed = Vec::new();
        for d in &self.domain {
            if variant.domain_ok(d, walker.family().as_ref())? {
                allowed.push(d);
            }
        }
        let n = rng.gen_range(self.points.0..=self.points.1);
        if allowed.len() < n {
            return Ok(None);
        }
        let mut c = Condition::new();
        for d in allowed.choose_multiple(rng, n) {
            c.touch((*d).clone());
        }
        let dom: Vec<Ordinal> = c.dom().cloned().collect();
        for d in &dom {
            let m = rng.gen_range(self.values.0..=self.values.1);
            for _ in 0..m {
                let v = self.value(rng);
                if c.insert(d.clone(), v.clone()) && !is_valid(&c, variant, walker)? {
                    c.remove_value(d, &v);
                }
            }
        }
        Ok(Some(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csequence::TwoTierSquare;
    use crate::ordinal::{ord, OrdinalGrid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn samples_are_valid_and_seeded() {
        let w = Walker::new(Arc::new(TwoTierSquare::new(ord("w^2")).unwrap()));
        let grid = OrdinalGrid::new(w.family().bound(), 2, 2).unwrap();
        let sampler = ConditionSampler::new(grid.points().to_vec());
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..30)
                .map(|_| sampler.sample(&mut rng, &Variant::P, &w).unwrap().unwrap())
                .collect::<Vec<_>>()
        };
        let a = draw(7);
        assert_eq!(a, draw(7));
        for c in &a {
            assert!(is_valid(c, &Variant::P, &w).unwrap());
        }
    }
}
