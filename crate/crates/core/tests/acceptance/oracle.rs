//! Reference implementations the acceptance checks compare against. None of
//! them goes through the library's memo, closure procedure or validator.

use std::collections::{BTreeMap, BTreeSet};

use rhowalk::poset::Condition;
use rhowalk::walk::Walker;
use rhowalk::Ordinal;

/// `ω·a + b` as `(a, b)`.
pub type Small = (u64, u64);

pub fn small_to_ordinal((a, b): Small) -> Ordinal {
    Ordinal::omega().mul_nat(a).add(&Ordinal::from(b))
}

/// Plain recursion for ρ below ω² over the canonical family, from the
/// definition: `C_{x+1} = {x}` and `C_{ω·(a+1)} = {ω·a + n : n < ω}`.
pub fn rho_small(alpha: Small, beta: Small) -> u64 {
    assert!(alpha <= beta);
    if alpha == beta {
        return 0;
    }
    if beta.1 > 0 {
        // C_β = {β-1}: no element below α, one step down, empty segment
        return rho_small(alpha, (beta.0, beta.1 - 1));
    }
    let base = (beta.0 - 1, 0);
    if alpha < base {
        return rho_small(alpha, base);
    }
    // α = ω·a + m: C_β ∩ α = {ω·a + n : n < m}, next step is α itself, and the
    // ladder has no limit points so the whole of C_β ∩ α is the segment
    let m = alpha.1;
    (0..m).map(|n| rho_small((alpha.0, n), alpha)).fold(m, u64::max)
}

/// Common extensions by exhaustive search.
///
/// If `r` is a common extension of `p` and `q`, so is `r'` with
/// `r'(α) = r(α) ∩ V ∩ [0, max(p(α) ∪ q(α))]` where `V` collects the values of
/// `p` and `q`: every clause is preserved by intersecting with a set, and cutting
/// each `r(α)` at a point that keeps its shared elements keeps the initial
/// segment clause. So it suffices to search subsets of `V` below those maxima.
/// Window and cap violations only grow with `r`, which justifies the pruning.
pub struct BruteForce<'a> {
    pub walker: &'a Walker,
    pub strict: bool,
}

struct Frame {
    dom: Vec<Ordinal>,
    pool: Vec<Ordinal>,
    /// `allowed[i][j]`: values that respect the cap between points `i < j`.
    allowed: Vec<Vec<u64>>,
    clash: Vec<u64>,
}

impl Frame {
    fn monotone_bad(&self, r: &[u64]) -> bool {
        for (i, &a) in r.iter().enumerate() {
            let mut bits = a;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if a & self.clash[v] != 0 {
                    return true;
                }
            }
            for (j, &b) in r.iter().enumerate().skip(i + 1) {
                if a & b & !self.allowed[i][j] != 0 {
                    return true;
                }
            }
        }
        false
    }

    fn segments_ok(&self, r: &[u64]) -> bool {
        for (i, &a) in r.iter().enumerate() {
            for &b in &r[i + 1..] {
                let shared = a & b;
                if shared == 0 {
                    continue;
                }
                let top = 63 - shared.leading_zeros();
                let below = (1u64 << top) - 1;
                if a & below != b & below {
                    return false;
                }
            }
        }
        true
    }

    fn search(&self, r: &mut Vec<u64>, moves: &[(usize, usize)]) -> bool {
        if self.monotone_bad(r) {
            return false;
        }
        let Some((&(i, v), rest)) = moves.split_first() else {
            return self.segments_ok(r);
        };
        if self.search(r, rest) {
            return true;
        }
        r[i] |= 1 << v;
        if self.search(r, rest) {
            return true;
        }
        r[i] &= !(1 << v);
        false
    }
}

impl BruteForce<'_> {
    fn cap_ok(&self, shared: &Ordinal, rho: &Ordinal) -> bool {
        if self.strict {
            shared < rho
        } else {
            shared <= rho
        }
    }

    /// Values of `p` and `q` are assumed to lie below the tier and their
    /// domains inside the family bound.
    pub fn common_extension(&self, p: &Condition, q: &Condition) -> Option<Condition> {
        let mut start: BTreeMap<Ordinal, BTreeSet<Ordinal>> = BTreeMap::new();
        for c in [p, q] {
            for (d, vals) in c.entries() {
                start.entry(d.clone()).or_default().extend(vals.iter().cloned());
            }
        }
        let pool: Vec<Ordinal> = start
            .values()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        assert!(pool.len() <= 64, "pool too large for the bitmask search");
        let index = |v: &Ordinal| pool.binary_search(v).expect("pooled");
        let dom: Vec<Ordinal> = start.keys().cloned().collect();
        let n = dom.len();
        let mut allowed = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let rho = self.walker.rho(&dom[i], &dom[j]).expect("rho");
                for (k, v) in pool.iter().enumerate() {
                    if self.cap_ok(v, &rho) {
                        allowed[i][j] |= 1 << k;
                    }
                }
            }
        }
        let clash = (0..pool.len())
            .map(|a| {
                (0..pool.len())
                    .filter(|&b| b != a && pool[a].limit_part() == pool[b].limit_part())
                    .fold(0u64, |m, b| m | 1 << b)
            })
            .collect();
        let mut r: Vec<u64> = start
            .values()
            .map(|vals| vals.iter().fold(0u64, |m, v| m | 1 << index(v)))
            .collect();
        let frame = Frame {
            dom,
            pool,
            allowed,
            clash,
        };
        let mut moves = Vec::new();
        for (i, &bits) in r.iter().enumerate() {
            if bits == 0 {
                continue;
            }
            let top = 63 - bits.leading_zeros() as usize;
            for v in 0..top {
                if bits & 1 << v == 0 && bits & frame.clash[v] == 0 {
                    moves.push((i, v));
                }
            }
        }
        if !frame.search(&mut r, &moves) {
            return None;
        }
        let mut out = Condition::new();
        for (i, bits) in r.iter().enumerate() {
            out.touch(frame.dom[i].clone());
            for (k, v) in frame.pool.iter().enumerate() {
                if bits & 1 << k != 0 {
                    out.insert(frame.dom[i].clone(), v.clone());
                }
            }
        }
        Some(out)
    }

    /// Independent validity check for `Q` (or `P` when strict), given values
    /// below the tier and domain inside the bound.
    pub fn valid(&self, c: &Condition) -> bool {
        let entries: Vec<(&Ordinal, &BTreeSet<Ordinal>)> = c.entries().iter().collect();
        for (_, vals) in &entries {
            let limits: BTreeSet<Ordinal> = vals.iter().map(Ordinal::limit_part).collect();
            if limits.len() != vals.len() {
                return false;
            }
        }
        for (i, (a, va)) in entries.iter().enumerate() {
            for (b, vb) in &entries[i + 1..] {
                let Some(top) = va.intersection(vb).max() else {
                    continue;
                };
                let below_a: Vec<_> = va.range(..top).collect();
                let below_b: Vec<_> = vb.range(..top).collect();
                if below_a != below_b {
                    return false;
                }
                let rho = self.walker.rho(a, b).expect("rho");
                if !self.cap_ok(top, &rho) {
                    return false;
                }
            }
        }
        true
    }
}
