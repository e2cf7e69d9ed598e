//! Brute-force reference computations for small instances.
//!
//! Nothing here shares code with the optimized paths in [`crate::codec`]:
//! monotone entropy is found by listing every nondecreasing tuple, and the
//! optimal rate by walking every permutation of the ensemble with a
//! least-squares (SVD) span test instead of Gram-Schmidt.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::codec::Ensemble;
use crate::error::{Error, Result};
use crate::hilbert::Ket;

pub const MAX_ORACLE_SYMBOLS: usize = 8;
pub const MAX_ORACLE_CAP: u32 = 16;

const SPAN_TOL: f64 = 1e-7;
const FLOAT_TIE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleResult {
    pub value: f64,
    /// Minimizing code-word lengths.
    pub lengths: Vec<u32>,
    /// Choice order (0-based) that produced the minimizing projection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<Vec<f64>>,
    pub search_space_size: u64,
    /// Whether objectives were compared in exact decimal integer arithmetic.
    pub exact_arithmetic: bool,
}

/// Common power of ten turning every probability into an integer, if any
/// exists with at most 12 decimals.
fn decimal_scale(p: &[f64]) -> Option<(u32, Vec<u64>)> {
    (0..=12u32).find_map(|k| {
        let scale = 10f64.powi(k as i32);
        p.iter()
            .map(|&x| {
                let y = x * scale;
                ((y - y.round()).abs() <= 1e-6).then(|| y.round() as u64)
            })
            .collect::<Option<Vec<u64>>>()
            .map(|nums| (k, nums))
    })
}

/// Visits every nondecreasing tuple over `0..=cap` of length `n` in
/// lexicographic order.
fn for_each_monotone_tuple(n: usize, cap: u32, f: &mut impl FnMut(&[u32])) {
    fn rec(cur: &mut Vec<u32>, n: usize, cap: u32, f: &mut impl FnMut(&[u32])) {
        if cur.len() == n {
            f(cur);
            return;
        }
        let lo = cur.last().copied().unwrap_or(0);
        for l in lo..=cap {
            cur.push(l);
            rec(cur, n, cap, f);
            cur.pop();
        }
    }
    rec(&mut Vec::with_capacity(n), n, cap, f);
}

/// Exhaustive monotone entropy over tuples with entries `≤ cap`.
pub fn hmon_bruteforce(p: &[f64], cap: u32) -> Result<OracleResult> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(
            "empty probability vector".into(),
        ));
    }
    if p.len() > MAX_ORACLE_SYMBOLS {
        return Err(Error::LimitExceeded {
            what: "oracle symbols",
            got: p.len(),
            max: MAX_ORACLE_SYMBOLS,
        });
    }
    if cap > MAX_ORACLE_CAP {
        return Err(Error::LimitExceeded {
            what: "oracle length cap",
            got: cap as usize,
            max: MAX_ORACLE_CAP as usize,
        });
    }
    if p.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::InvalidDistribution(
            "entries must be positive".into(),
        ));
    }
    let scaled = decimal_scale(p);
    let full = 1u64 << cap;
    let mut searched = 0u64;
    let mut best_exact: Option<u128> = None;
    let mut best_float = f64::INFINITY;
    let mut best: Option<Vec<u32>> = None;

    for_each_monotone_tuple(p.len(), cap, &mut |t| {
        searched += 1;
        let kraft: u64 = t.iter().map(|&l| 1u64 << (cap - l)).sum();
        if kraft > full {
            return;
        }
        match &scaled {
            Some((_, nums)) => {
                let obj: u128 = nums
                    .iter()
                    .zip(t)
                    .map(|(&a, &l)| a as u128 * l as u128)
                    .sum();
                if best_exact.is_none_or(|b| obj < b) {
                    best_exact = Some(obj);
                    best = Some(t.to_vec());
                }
            }
            None => {
                let obj: f64 = p.iter().zip(t).map(|(&a, &l)| a * l as f64).sum();
                if obj < best_float - FLOAT_TIE {
                    best_float = obj;
                    best = Some(t.to_vec());
                }
            }
        }
    });

    let lengths = best.ok_or(Error::KraftViolation)?;
    let value = match (&scaled, best_exact) {
        (Some((k, _)), Some(obj)) => obj as f64 / 10f64.powi(*k as i32),
        _ => best_float,
    };
    Ok(OracleResult {
        value,
        lengths,
        ordering: None,
        projection: None,
        search_space_size: searched,
        exact_arithmetic: scaled.is_some(),
    })
}

/// Least-squares residual of `v` against the column span of `cols`.
fn span_residual(cols: &[&Ket], v: &Ket) -> f64 {
    if cols.is_empty() {
        return v.norm();
    }
    let m = DMatrix::<Complex64>::from_fn(v.len(), cols.len(), |r, c| cols[c][r]);
    let svd = m.clone().svd(true, true);
    match svd.solve(v, 1e-10) {
        Ok(x) => (&m * x - v).norm(),
        Err(_) => v.norm(),
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Optimal rate by trying every choice order of the ensemble states.
pub fn rate_bruteforce(e: &Ensemble) -> Result<OracleResult> {
    let n = e.len();
    if n > MAX_ORACLE_SYMBOLS {
        return Err(Error::LimitExceeded {
            what: "oracle ensemble size",
            got: n,
            max: MAX_ORACLE_SYMBOLS,
        });
    }
    let mut in_span: HashMap<(u32, usize), bool> = HashMap::new();
    let mut hmon_cache: HashMap<Vec<i64>, OracleResult> = HashMap::new();
    let mut best: Option<OracleResult> = None;
    let mut searched = 0u64;

    let mut order: Vec<usize> = (0..n).collect();
    loop {
        let (probs, _) = projection_for_order(&order, e, &mut in_span);
        let key: Vec<i64> = probs.iter().map(|x| (x * 1e12).round() as i64).collect();
        let h = match hmon_cache.get(&key) {
            Some(h) => h.clone(),
            None => {
                let cap = (2 * probs.len() as u32).min(MAX_ORACLE_CAP);
                let h = hmon_bruteforce(&probs, cap)?;
                searched += h.search_space_size;
                hmon_cache.insert(key, h.clone());
                h
            }
        };
        let improves = match &best {
            None => true,
            Some(b) => h.value < b.value - FLOAT_TIE,
        };
        if improves {
            best = Some(OracleResult {
                ordering: Some(order.clone()),
                projection: Some(probs),
                ..h
            });
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    let mut best = best.ok_or_else(|| Error::Internal("empty ensemble".into()))?;
    best.search_space_size = searched;
    Ok(best)
}

/// Builds the sequential projection for a full choice order: the first
/// unconsumed index becomes the next representative and absorbs every
/// unconsumed state in the span of all representatives so far.
pub fn projection_for_order(
    order: &[usize],
    e: &Ensemble,
    cache: &mut HashMap<(u32, usize), bool>,
) -> (Vec<f64>, Vec<Vec<usize>>) {
    let states = e.states();
    let n = states.len();
    let mut consumed = vec![false; n];
    let mut reps: Vec<usize> = Vec::new();
    let mut rep_mask = 0u32;
    let mut probs = Vec::new();
    let mut groups = Vec::new();
    for &i in order {
        if consumed[i] {
            continue;
        }
        reps.push(i);
        rep_mask |= 1 << i;
        let cols: Vec<&Ket> = reps.iter().map(|&r| &states[r].vector).collect();
        let mut group = Vec::new();
        for j in 0..n {
            if consumed[j] {
                continue;
            }
            let member = j == i
                || *cache
                    .entry((rep_mask, j))
                    .or_insert_with(|| span_residual(&cols, &states[j].vector) < SPAN_TOL);
            if member {
                consumed[j] = true;
                group.push(j);
            }
        }
        probs.push(group.iter().map(|&j| states[j].probability).sum());
        groups.push(group);
    }
    (probs, groups)
}

/// Every distinct projection reachable by some choice order, keyed on a
/// 1e-12 probability grid.
pub fn distinct_projections(e: &Ensemble) -> Result<Vec<Vec<f64>>> {
    let n = e.len();
    if n > MAX_ORACLE_SYMBOLS {
        return Err(Error::LimitExceeded {
            what: "oracle ensemble size",
            got: n,
            max: MAX_ORACLE_SYMBOLS,
        });
    }
    let mut cache = HashMap::new();
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        let (probs, _) = projection_for_order(&order, e, &mut cache);
        let key: Vec<i64> = probs.iter().map(|x| (x * 1e12).round() as i64).collect();
        if seen.insert(key, ()).is_none() {
            out.push(probs);
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(out)
}
