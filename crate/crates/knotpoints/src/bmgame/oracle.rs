//! Dense open subsets of `𝒦` answering "give me a point of `𝒰` near this one".
//!
//! An oracle receives a target prefix `𝐊*` and a budget `ε`, and returns
//! `𝐊 ∈ 𝒰 ∩ 𝒟` with `d(K_n, K*_n) < ε` for every target index, plus a
//! certificate `(l, r)` promising `Ū(𝐊, l, 2r) ⊂ 𝒰`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::cover::disjointify;
use super::Certificate;
use crate::error::{Error, Result};
use crate::intervalsets::{hausdorff, FinitePointSet};
use crate::rational::{fmt_q, min_q, parse_q, pow2_neg, q, qr, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Oracle {
    /// `𝒰 = 𝒦`.
    Everything,
    /// `𝒰 = {𝐊 : p ∉ K_n for n ≤ l}`, with `l` fixed by the first answer's length.
    AvoidPoint {
        #[serde(with = "crate::rational::serde_q")]
        p: Q,
    },
    /// `𝒰 = {𝐊 : d(K_n, T_n) < tol for n ≤ len T}`.
    TargetPrefix {
        sets: Vec<FinitePointSet>,
        #[serde(with = "crate::rational::serde_q")]
        tol: Q,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleAnswer {
    pub sets: Vec<FinitePointSet>,
    pub certificate: Certificate,
}

impl Oracle {
    /// `everything`, `avoid:<p>`, or `target:<tol>:<x,y;z;...>` with one `;`-separated group per index.
    pub fn parse(s: &str) -> Result<Oracle> {
        let bad = || Error::Argument(format!("unknown oracle '{s}' (everything | avoid:<p> | target:<tol>:<sets>)"));
        if s == "everything" {
            return Ok(Oracle::Everything);
        }
        if let Some(p) = s.strip_prefix("avoid:") {
            let p = parse_q(p)?;
            if p < Q::zero() || p > Q::one() {
                return Err(Error::Argument("avoided point must lie in [0,1]".into()));
            }
            return Ok(Oracle::AvoidPoint { p });
        }
        if let Some(rest) = s.strip_prefix("target:") {
            let (tol, sets) = rest.split_once(':').ok_or_else(bad)?;
            let tol = parse_q(tol)?;
            if tol <= Q::zero() {
                return Err(Error::Argument("target tolerance must be positive".into()));
            }
            let sets = sets
                .split(';')
                .map(|g| FinitePointSet::new(g.split(',').map(parse_q).collect::<Result<Vec<_>>>()?))
                .collect::<Result<Vec<_>>>()?;
            if sets.iter().any(|s| s.is_empty()) {
                return Err(Error::Argument("target sets must be nonempty".into()));
            }
            return Ok(Oracle::TargetPrefix { sets, tol });
        }
        Err(bad())
    }

    pub fn label(&self) -> String {
        match self {
            Oracle::Everything => "everything".into(),
            Oracle::AvoidPoint { p } => format!("avoid:{}", fmt_q(p)),
            Oracle::TargetPrefix { sets, tol } => format!("target:{}:{} sets", fmt_q(tol), sets.len()),
        }
    }

    pub fn propose(&self, target: &[FinitePointSet], eps: &Q) -> Result<OracleAnswer> {
        if !(eps > &Q::zero()) {
            return Err(Error::Argument("oracle budget must be positive".into()));
        }
        let mut groups: Vec<Vec<Q>> = target.iter().map(|s| s.points().to_vec()).collect();
        if let Oracle::TargetPrefix { sets: t, .. } = self {
            while groups.len() < t.len() {
                groups.push(t[groups.len()].points().to_vec());
            }
        }
        if groups.is_empty() {
            groups.push(Vec::new());
        }
        match self {
            Oracle::Everything => {
                let sets = finish(&disjointify(&groups, &(eps / q(4)))?)?;
                Ok(OracleAnswer { certificate: Certificate { l: 1, r: qr(1, 4) }, sets })
            }
            Oracle::AvoidPoint { p } => {
                // Push points off a dyadic gap around p, then separate within half of it.
                let mut k = 0;
                while pow2_neg(k) > eps / q(4) {
                    k += 1;
                }
                let gap = pow2_neg(k);
                for g in groups.iter_mut() {
                    for x in g.iter_mut() {
                        if (&*x - p).abs() < gap {
                            let left = p - &gap;
                            *x = if left >= Q::zero() { left } else { p + &gap };
                        }
                    }
                }
                let sets = finish(&disjointify(&groups, &(&gap / q(2)))?)?;
                let l = sets.len();
                let d = sets.iter().filter_map(|s| s.to_interval_set().dist_to(p)).min();
                let r = match d {
                    Some(d) => min_q(&qr(1, 4), &(d / q(4))),
                    None => qr(1, 4),
                };
                Ok(OracleAnswer { sets, certificate: Certificate { l, r } })
            }
            Oracle::TargetPrefix { sets: t, tol } => {
                let sets = finish(&disjointify(&groups, &(eps / q(4)))?)?;
                let d = t.iter().zip(&sets).map(|(a, b)| hausdorff(&a.to_interval_set(), &b.to_interval_set())).max().unwrap_or_else(Q::zero);
                if &d >= tol {
                    return Err(Error::Construction(format!(
                        "target lies at distance {} from the oracle's open set, outside tolerance {}",
                        fmt_q(&d),
                        fmt_q(tol)
                    )));
                }
                Ok(OracleAnswer { certificate: Certificate { l: t.len().max(1), r: (tol - d) / q(4) }, sets })
            }
        }
    }

    /// Membership of a prefix in `𝒰` (indices past the prefix are unconstrained).
    pub fn contains(&self, sets: &[FinitePointSet], l: usize) -> bool {
        match self {
            Oracle::Everything => true,
            Oracle::AvoidPoint { p } => sets.iter().take(l).all(|s| !s.contains(p)),
            Oracle::TargetPrefix { sets: t, tol } => {
                t.len() <= sets.len() && t.iter().zip(sets).all(|(a, b)| &hausdorff(&a.to_interval_set(), &b.to_interval_set()) < tol)
            }
        }
    }
}

fn finish(groups: &[Vec<Q>]) -> Result<Vec<FinitePointSet>> {
    groups.iter().map(|g| FinitePointSet::new(g.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fps(v: &[(i64, i64)]) -> FinitePointSet {
        FinitePointSet::new(v.iter().map(|&(a, b)| qr(a, b)).collect()).unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Oracle::parse("everything").unwrap(), Oracle::Everything);
        assert_eq!(Oracle::parse("avoid:0.5").unwrap(), Oracle::AvoidPoint { p: qr(1, 2) });
        assert!(matches!(Oracle::parse("target:0.1:0.2,0.3;0.9").unwrap(), Oracle::TargetPrefix { ref sets, .. } if sets.len() == 2));
        assert!(Oracle::parse("avoid:2").is_err());
        assert!(Oracle::parse("nope").is_err());
    }

    #[test]
    fn avoid_moves_points_off_p_and_certifies() {
        let o = Oracle::AvoidPoint { p: qr(1, 2) };
        let target = vec![fps(&[(1, 2), (1, 4)]), fps(&[(1, 2)])];
        let eps = qr(1, 100);
        let ans = o.propose(&target, &eps).unwrap();
        assert!(o.contains(&ans.sets, ans.certificate.l));
        for (a, b) in target.iter().zip(&ans.sets) {
            assert!(hausdorff(&a.to_interval_set(), &b.to_interval_set()) < eps);
        }
        let all = ans.sets[0].union(&ans.sets[1]);
        assert_eq!(all.len(), 3);
        let d = all.to_interval_set().dist_to(&qr(1, 2)).unwrap();
        assert!(q(2) * &ans.certificate.r < d);
    }

    #[test]
    fn target_prefix_bounds() {
        let o = Oracle::TargetPrefix { sets: vec![fps(&[(1, 2)])], tol: qr(1, 10) };
        let ans = o.propose(&[fps(&[(51, 100)])], &qr(1, 1000)).unwrap();
        assert!(o.contains(&ans.sets, 1));
        assert!(ans.certificate.r > Q::zero());
        assert!(matches!(o.propose(&[fps(&[(9, 10)])], &qr(1, 1000)), Err(Error::Construction(_))));
        let padded = o.propose(&[], &qr(1, 1000)).unwrap();
        assert_eq!(padded.sets.len(), 1);
    }
}
