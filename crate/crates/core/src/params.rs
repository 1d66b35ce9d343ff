//! Code parameters, the storage/bandwidth tradeoff and the field-size bound.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, Field};

/// Exact rational used for tradeoff quantities.
pub type Rational = Ratio<i64>;

/// One vertex of the piecewise-linear storage/bandwidth tradeoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TradeoffPoint {
    pub ell: u32,
    pub alpha: Rational,
    pub beta: Rational,
}

/// Largest file size supported by storage `alpha` and per-helper bandwidth
/// `beta` when any `k` of the nodes must recover the file and `d` helpers
/// take part in each repair.
pub fn tradeoff_bound(alpha: Rational, beta: Rational, k: u32, d: u32) -> Result<Rational> {
    if alpha <= Rational::from_integer(0) || beta <= Rational::from_integer(0) {
        return Err(Error::InvalidParams("alpha and beta must be positive".into()));
    }
    if k < 1 || k > d {
        return Err(Error::InvalidParams(format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    Ok((1..=k)
        .map(|i| {
            let bw = beta * Rational::from_integer(i64::from(d - i + 1));
            alpha.min(bw)
        })
        .sum())
}

/// The `ell`-th vertex of the tradeoff curve for file size `file_size`.
/// `ell = k` is the minimum-storage end, `ell = 1` the minimum-bandwidth end.
pub fn vertex_point(ell: u32, file_size: Rational, k: u32, d: u32) -> Result<TradeoffPoint> {
    if ell < 1 || ell > k || k > d {
        return Err(Error::InvalidParams(format!(
            "need 1 <= ell <= k <= d, got ell={ell}, k={k}, d={d}"
        )));
    }
    if file_size <= Rational::from_integer(0) {
        return Err(Error::InvalidParams("file size must be positive".into()));
    }
    let (ell, k, d) = (i64::from(ell), i64::from(k), i64::from(d));
    let denom = 2 * k * (d - ell + 1) - (k - ell) * (k - ell + 1);
    let scale = file_size * Rational::new(2, denom);
    Ok(TradeoffPoint {
        ell: ell as u32,
        alpha: scale * Rational::from_integer(d - ell + 1),
        beta: scale,
    })
}

/// All vertices `ell = 1..=k`, in increasing `ell`.
pub fn tradeoff_curve(file_size: Rational, k: u32, d: u32) -> Result<Vec<TradeoffPoint>> {
    (1..=k).map(|ell| vertex_point(ell, file_size, k, d)).collect()
}

/// Binomial coefficient, zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is always divisible by (i + 1)
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// Field size that guarantees good local coefficients exist at every repair:
/// `C(n*alpha, B) - C((n-1)*alpha, B)`.
pub fn min_field_size(n: u32, alpha: u32, file_size: u32) -> Result<u128> {
    let total = u64::from(n) * u64::from(alpha);
    if u64::from(file_size) > total {
        return Err(Error::InvalidParams(format!(
            "file size {file_size} exceeds total storage {total}"
        )));
    }
    let rest = u64::from(n - 1) * u64::from(alpha);
    Ok(binomial(total, u64::from(file_size)) - binomial(rest, u64::from(file_size)))
}

/// Validated parameters for one code instance with `d = n - 1` and `beta = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub ell: usize,
    pub alpha: usize,
    pub beta: usize,
    pub file_size: usize,
    pub field: Field,
}

impl SystemParams {
    /// Normalized parameters; rejects fields below [`min_field_size`].
    pub fn new(n: usize, k: usize, ell: usize, q: u64) -> Result<Self> {
        Self::build(n, k, ell, q, true)
    }

    /// As [`SystemParams::new`] but accepts any prime `q`.
    pub fn allow_small_field(n: usize, k: usize, ell: usize, q: u64) -> Result<Self> {
        Self::build(n, k, ell, q, false)
    }

    fn build(n: usize, k: usize, ell: usize, q: u64, enforce_bound: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("need n >= 2, got {n}")));
        }
        if ell < 1 || ell > k || k > n - 1 {
            return Err(Error::InvalidParams(format!(
                "need 1 <= ell <= k <= n-1, got n={n}, k={k}, ell={ell}"
            )));
        }
        if n > 64 {
            return Err(Error::InvalidParams(format!("n={n} is beyond desk scale")));
        }
        let field = Field::new(q)?;
        let alpha = n - ell;
        let file_size = k * alpha - (k - ell) * (k - ell + 1) / 2;
        let params = SystemParams {
            n,
            k,
            d: n - 1,
            ell,
            alpha,
            beta: 1,
            file_size,
            field,
        };
        let bound = tradeoff_bound(
            Rational::from_integer(alpha as i64),
            Rational::from_integer(1),
            k as u32,
            (n - 1) as u32,
        )?;
        if Rational::from_integer(file_size as i64) > bound {
            return Err(Error::InvalidParams(format!(
                "file size {file_size} exceeds the tradeoff bound {bound}"
            )));
        }
        if enforce_bound {
            let required = params.required_field_size()?;
            if u128::from(q) < required {
                return Err(Error::FieldTooSmall { q, required });
            }
        }
        Ok(params)
    }

    /// Smallest prime that satisfies both the coefficient-existence bound and
    /// the `q > n*alpha` requirement of the initial encoding.
    pub fn auto_q(n: usize, k: usize, ell: usize) -> Result<u64> {
        if ell < 1 || ell > k || k + 1 > n {
            return Err(Error::InvalidParams(format!(
                "need 1 <= ell <= k <= n-1, got n={n}, k={k}, ell={ell}"
            )));
        }
        let alpha = n - ell;
        let file_size = k * alpha - (k - ell) * (k - ell + 1) / 2;
        let bound = min_field_size(n as u32, alpha as u32, file_size as u32)?;
        let floor = bound.max((n * alpha + 1) as u128);
        if floor >= u128::from(field::MAX_MODULUS) {
            return Err(Error::InvalidParams(format!(
                "required field size {bound} exceeds the supported modulus range"
            )));
        }
        Ok(field::next_prime(floor as u64))
    }

    pub fn q(&self) -> u64 {
        self.field.modulus()
    }

    pub fn required_field_size(&self) -> Result<u128> {
        min_field_size(self.n as u32, self.alpha as u32, self.file_size as u32)
    }

    /// Number of stored symbols across all nodes (`n * alpha`).
    pub fn total_symbols(&self) -> usize {
        self.n * self.alpha
    }

    /// Column of symbol `(node, index)`, both 1-based.
    #[inline]
    pub fn column(&self, node: usize, index: usize) -> usize {
        (node - 1) * self.alpha + (index - 1)
    }

    /// Columns of the given nodes, each contributing `alpha` consecutive ones.
    pub fn node_columns(&self, nodes: &[usize]) -> Vec<usize> {
        nodes
            .iter()
            .flat_map(|&i| (1..=self.alpha).map(move |j| self.column(i, j)))
            .collect()
    }
}

/// Normalized parameters for `(n, k, ell)` over `F_q`, enforcing the field bound.
pub fn normalized_params(n: usize, k: usize, ell: usize, q: u64) -> Result<SystemParams> {
    SystemParams::new(n, k, ell, q)
}

/// All `k`-subsets of `1..=n`, lexicographic.
pub fn collector_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            if n - i + 1 < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn tradeoff_bound_examples() {
        let one = r(1, 1);
        assert_eq!(tradeoff_bound(r(2, 1), one, 3, 3).unwrap(), r(5, 1));
        assert_eq!(tradeoff_bound(one, one, 1, 1).unwrap(), one);
        assert_eq!(tradeoff_bound(r(4, 1), one, 4, 4).unwrap(), r(10, 1));
        assert!(tradeoff_bound(r(0, 1), one, 1, 1).is_err());
        assert!(tradeoff_bound(one, one, 3, 2).is_err());
    }

    #[test]
    fn vertex_point_examples() {
        let b = r(1, 1);
        let msr = vertex_point(4, b, 4, 8).unwrap();
        assert_eq!((msr.alpha, msr.beta), (r(1, 4), r(1, 20)));
        let mbr = vertex_point(1, b, 4, 8).unwrap();
        assert_eq!((mbr.alpha, mbr.beta), (r(4, 13), r(1, 26)));
        let mid = vertex_point(2, b, 4, 8).unwrap();
        assert_eq!((mid.alpha, mid.beta), (r(7, 25), r(1, 25)));
        assert!(vertex_point(0, b, 4, 8).is_err());
        assert!(vertex_point(5, b, 4, 8).is_err());
    }

    #[test]
    fn normalized_examples() {
        let p = normalized_params(4, 3, 2, 53).unwrap();
        assert_eq!((p.alpha, p.file_size, p.d, p.beta), (2, 5, 3, 1));
        let p = normalized_params(5, 3, 3, 191).unwrap();
        assert_eq!((p.alpha, p.file_size), (2, 6));
        let p = SystemParams::allow_small_field(5, 4, 1, 8009).unwrap();
        assert_eq!((p.alpha, p.file_size), (4, 10));
    }

    #[test]
    fn bound_is_enforced_with_required_value() {
        // C(20,10) - C(16,10) = 184756 - 8008
        assert_eq!(
            normalized_params(5, 4, 1, 8009),
            Err(Error::FieldTooSmall {
                q: 8009,
                required: 176_748
            })
        );
        assert_eq!(
            normalized_params(4, 3, 2, 47),
            Err(Error::FieldTooSmall { q: 47, required: 50 })
        );
        assert!(normalized_params(4, 3, 2, 49).is_err());
        assert!(normalized_params(4, 4, 2, 53).is_err());
        assert!(normalized_params(4, 3, 0, 53).is_err());
    }

    #[test]
    fn min_field_size_examples() {
        assert_eq!(min_field_size(4, 2, 5).unwrap(), 50);
        assert_eq!(min_field_size(5, 2, 6).unwrap(), 182);
        assert_eq!(min_field_size(2, 1, 2).unwrap(), 1);
        assert!(min_field_size(2, 1, 3).is_err());
    }

    #[test]
    fn auto_q_picks_smallest_prime_at_bound() {
        assert_eq!(SystemParams::auto_q(4, 3, 2).unwrap(), 53);
        assert_eq!(SystemParams::auto_q(5, 3, 3).unwrap(), 191);
    }

    #[test]
    fn binomial_matches_pascal() {
        let mut row = vec![1u128];
        for n in 0..40u64 {
            for (r, &v) in row.iter().enumerate() {
                assert_eq!(binomial(n, r as u64), v);
            }
            assert_eq!(binomial(n, n + 1), 0);
            let mut next = vec![1u128; row.len() + 1];
            for r in 1..row.len() {
                next[r] = row[r - 1] + row[r];
            }
            row = next;
        }
    }

    #[test]
    fn collector_sets_enumerates_all() {
        let sets = collector_sets(5, 3);
        assert_eq!(sets.len(), 10);
        assert_eq!(sets[0], vec![1, 2, 3]);
        assert_eq!(sets[9], vec![3, 4, 5]);
    }
}
