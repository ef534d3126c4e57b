//! Exhaustive desk-scale oracles: the search processes enumerated over
//! every joint query outcome with exact rational bookkeeping. Independent
//! of the model modules (no transition formulas, no occupancy sums).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// All size-k subsets of the node set `0..n` excluding `except`, as masks.
fn k_subsets(n: u32, k: u32, except: Option<u32>) -> Vec<u32> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() != k {
            continue;
        }
        if let Some(e) = except {
            if mask & (1 << e) != 0 {
                continue;
            }
        }
        out.push(mask);
    }
    out
}

fn placements(n: u32, m: u32) -> Vec<u32> {
    // m-subsets of 1..n (node 0 never holds the file)
    k_subsets(n, m, Some(0))
}

/// First-success pmf of blind search at c = 1: every active node draws a
/// k-subset of its N-1 neighbours each round; queried nodes activate.
/// Enumerates `rounds` rounds; the tail stays in the returned residual.
pub fn enumerate_blind_pmf(n: u32, k: u32, m: u32, rounds: usize) -> (Vec<BigRational>, BigRational) {
    let per_node: Vec<Vec<u32>> = (0..n).map(|v| k_subsets(n, k, Some(v))).collect();
    let files = placements(n, m);
    let p_place = BigRational::new(BigInt::one(), BigInt::from(files.len()));
    let mut pmf = vec![BigRational::zero(); rounds];
    let mut residual = BigRational::zero();
    for &file in &files {
        let mut alive: HashMap<u32, BigRational> = HashMap::new();
        alive.insert(1u32, p_place.clone());
        for slot in pmf.iter_mut() {
            let mut next: HashMap<u32, BigRational> = HashMap::new();
            for (&active, p) in &alive {
                let actives: Vec<u32> = (0..n).filter(|i| active & (1 << i) != 0).collect();
                let mut joint: Vec<(u32, BigRational)> = vec![(0u32, p.clone())];
                for &a in &actives {
                    let opts = &per_node[a as usize];
                    let w = BigRational::new(BigInt::one(), BigInt::from(opts.len()));
                    let mut grown = Vec::with_capacity(joint.len() * opts.len());
                    for (targets, jp) in &joint {
                        let jw = jp * &w;
                        for &o in opts {
                            grown.push((targets | o, jw.clone()));
                        }
                    }
                    joint = grown;
                }
                for (targets, jp) in joint {
                    if targets & file != 0 {
                        *slot += jp;
                    } else {
                        *next.entry(active | targets).or_insert_with(BigRational::zero) += jp;
                    }
                }
            }
            alive = next;
        }
        residual += alive.values().sum::<BigRational>();
    }
    (pmf, residual)
}

/// First-success pmf plus mean rounds of smart search at c = 1: active
/// nodes draw independently from the shared never-queried pool; queried
/// nodes activate and leave the pool. Terminates surely within
/// ceil((N-1)/k) rounds.
pub fn enumerate_smart(n: u32, k: u32, m: u32) -> (Vec<BigRational>, BigRational) {
    let cap = (n - 1).div_ceil(k) as usize;
    let files = placements(n, m);
    let p_place = BigRational::new(BigInt::one(), BigInt::from(files.len()));
    let mut pmf = vec![BigRational::zero(); cap];
    for &file in &files {
        // state: (active mask, pool mask) -> probability
        let all_others: u32 = ((1u32 << n) - 1) & !1;
        let mut alive: HashMap<(u32, u32), BigRational> = HashMap::new();
        alive.insert((1u32, all_others), p_place.clone());
        for slot in pmf.iter_mut() {
            let mut next: HashMap<(u32, u32), BigRational> = HashMap::new();
            for (&(active, pool), p) in &alive {
                let actives: Vec<u32> = (0..n).filter(|i| active & (1 << i) != 0).collect();
                let pool_nodes: Vec<u32> = (0..n).filter(|i| pool & (1 << i) != 0).collect();
                let take = (k as usize).min(pool_nodes.len());
                let options = k_subsets_of(&pool_nodes, take);
                let w = BigRational::new(BigInt::one(), BigInt::from(options.len()));
                let mut joint: Vec<(u32, BigRational)> = vec![(0u32, p.clone())];
                for _ in &actives {
                    let mut grown = Vec::with_capacity(joint.len() * options.len());
                    for (targets, jp) in &joint {
                        let jw = jp * &w;
                        for &o in &options {
                            grown.push((targets | o, jw.clone()));
                        }
                    }
                    joint = grown;
                }
                for (targets, jp) in joint {
                    if targets & file != 0 {
                        *slot += jp;
                    } else {
                        let key = (active | targets, pool & !targets);
                        *next.entry(key).or_insert_with(BigRational::zero) += jp;
                    }
                }
            }
            alive = next;
        }
        assert!(
            alive.values().sum::<BigRational>().is_zero(),
            "smart search must terminate within the round bound"
        );
    }
    let mean: BigRational = pmf
        .iter()
        .enumerate()
        .map(|(i, q)| q * BigRational::from_integer(BigInt::from(i + 1)))
        .sum();
    (pmf, mean)
}

fn k_subsets_of(nodes: &[u32], k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    fn rec(nodes: &[u32], k: usize, start: usize, depth: usize, mask: u32, out: &mut Vec<u32>) {
        if depth == k {
            out.push(mask);
            return;
        }
        for i in start..nodes.len() {
            rec(nodes, k, i + 1, depth + 1, mask | (1 << nodes[i]), out);
        }
    }
    rec(nodes, k, 0, 0, 0, &mut out);
    out
}
