use std::collections::HashMap;

use crate::blocky::{is_blocky, BlockyCheck, BlockyMatrix, Sign, SignedBlockySum};
use crate::error::{input, Result};
use crate::matrix::IntMatrix;

/// Largest `m·n` accepted by the oracle.
pub const MAX_CELLS: usize = 16;
/// Largest term count the oracle searches.
pub const MAX_DEPTH: usize = 6;

/// Exact block complexity, or proof that it exceeds the searched depth.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleResult {
    Exact { value: usize, witness: SignedBlockySum },
    ExceedsLmax,
}

impl OracleResult {
    pub fn value(&self) -> Option<usize> {
        match self {
            OracleResult::Exact { value, .. } => Some(*value),
            OracleResult::ExceedsLmax => None,
        }
    }
}

type Cells = [i8; MAX_CELLS];

// Entries live in [-8, 7]; stored as 4-bit offsets.
fn pack(c: &Cells) -> u64 {
    c.iter().enumerate().fold(0u64, |k, (i, &v)| k | (((v + 8) as u64) << (4 * i)))
}

fn unpack(k: u64) -> Cells {
    let mut c = [0i8; MAX_CELLS];
    for (i, v) in c.iter_mut().enumerate() {
        *v = ((k >> (4 * i)) & 0xf) as i8 - 8;
    }
    c
}

fn blocky_masks(m: usize, n: usize) -> Vec<u32> {
    let row_mask = (1u32 << n) - 1;
    (1u32..1 << (m * n))
        .filter(|&mask| {
            let rows: Vec<u32> = (0..m).map(|r| (mask >> (r * n)) & row_mask).collect();
            rows.iter()
                .enumerate()
                .all(|(i, &a)| rows[i + 1..].iter().all(|&b| a & b == 0 || a == b))
        })
        .collect()
}

/// Number of nonzero blocky matrices of shape `m × n` (requires `m·n ≤ 16`).
pub fn count_blocky(m: usize, n: usize) -> Result<usize> {
    check_shape(m, n)?;
    Ok(blocky_masks(m, n).len())
}

fn check_shape(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 || m * n > MAX_CELLS {
        return input(format!("oracle needs 1 ≤ m·n ≤ {MAX_CELLS}, got {m}×{n}"));
    }
    Ok(())
}

/// Smallest `L ≤ lmax` such that `a` is a sum of `L` signed blocky matrices,
/// found by meet-in-the-middle over the sets of sums of at most `⌈L/2⌉`
/// terms. Partial sums farther than `lmax − k` from `a` in max norm after `k`
/// terms are pruned.
pub fn exact_block_complexity(a: &IntMatrix, lmax: usize) -> Result<OracleResult> {
    let (m, n) = a.shape();
    check_shape(m, n)?;
    if lmax > MAX_DEPTH {
        return input(format!("oracle depth is capped at {MAX_DEPTH}, got {lmax}"));
    }
    if a.is_zero() {
        return Ok(OracleResult::Exact {
            value: 0,
            witness: SignedBlockySum::new((m, n)),
        });
    }
    if a.max_abs() as usize > lmax {
        return Ok(OracleResult::ExceedsLmax);
    }
    let cells = m * n;
    let mut target = [0i8; MAX_CELLS];
    for (t, &v) in target.iter_mut().zip(a.as_slice()) {
        *t = v as i8;
    }
    let target_key = pack(&target);

    let masks = blocky_masks(m, n);
    let moves: Vec<(u32, i8)> = masks.iter().flat_map(|&b| [(b, 1i8), (b, -1i8)]).collect();

    // key -> (depth, parent key, move index)
    let mut seen: HashMap<u64, (usize, u64, usize)> = HashMap::new();
    let zero_key = pack(&[0; MAX_CELLS]);
    seen.insert(zero_key, (0, zero_key, usize::MAX));
    let mut layers: Vec<Vec<u64>> = vec![vec![zero_key]];

    let half = lmax.div_ceil(2);
    for l in 1..=lmax {
        let a_depth = l.div_ceil(2);
        let b_depth = l - a_depth;
        while layers.len() <= a_depth.min(half) {
            let k = layers.len();
            let slack = (lmax - k) as i8;
            let mut next = Vec::new();
            for &key in &layers[k - 1] {
                let base = unpack(key);
                for (mi, &(mask, s)) in moves.iter().enumerate() {
                    let mut c = base;
                    let mut ok = true;
                    for (i, ci) in c.iter_mut().enumerate().take(cells) {
                        if (mask >> i) & 1 == 1 {
                            *ci += s;
                        }
                        if (target[i] - *ci).abs() > slack {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let nk = pack(&c);
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(nk) {
                        e.insert((k, key, mi));
                        next.push(nk);
                    }
                }
            }
            layers.push(next);
        }
        // x = sum of at most a_depth terms, y = a − x of at most b_depth.
        for &x in layers[..=a_depth].iter().flatten() {
            let xc = unpack(x);
            let mut y = [0i8; MAX_CELLS];
            for i in 0..cells {
                y[i] = target[i] - xc[i];
            }
            if y.iter().any(|v| v.unsigned_abs() as usize > b_depth) {
                continue;
            }
            let yk = pack(&y);
            if let Some(&(d, _, _)) = seen.get(&yk) {
                if d <= b_depth {
                    let mut witness = SignedBlockySum::new((m, n));
                    for key in [x, yk] {
                        for (mask, s) in path(&seen, key, &moves) {
                            witness.push(s, mask_to_blocky(mask, m, n)?)?;
                        }
                    }
                    debug_assert_eq!(pack_matrix(&witness.evaluate()), target_key);
                    return Ok(OracleResult::Exact {
                        value: witness.len(),
                        witness,
                    });
                }
            }
        }
    }
    Ok(OracleResult::ExceedsLmax)
}

fn pack_matrix(a: &IntMatrix) -> u64 {
    let mut c = [0i8; MAX_CELLS];
    for (t, &v) in c.iter_mut().zip(a.as_slice()) {
        *t = v as i8;
    }
    pack(&c)
}

fn path(seen: &HashMap<u64, (usize, u64, usize)>, mut key: u64, moves: &[(u32, i8)]) -> Vec<(u32, Sign)> {
    let mut out = Vec::new();
    loop {
        let (depth, parent, mi) = seen[&key];
        if depth == 0 {
            break;
        }
        let (mask, s) = moves[mi];
        out.push((mask, if s > 0 { Sign::Plus } else { Sign::Minus }));
        key = parent;
    }
    out.reverse();
    out
}

fn mask_to_blocky(mask: u32, m: usize, n: usize) -> Result<BlockyMatrix> {
    let b = IntMatrix::new(m, n, (0..m * n).map(|i| ((mask >> i) & 1) as i64).collect())?;
    match is_blocky(&b)? {
        BlockyCheck::Blocky(bm) => Ok(bm),
        BlockyCheck::Witness { .. } => unreachable!("enumerated masks are blocky"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocky_counts_match_enumeration() {
        assert_eq!(count_blocky(3, 3).unwrap(), 127);
        assert_eq!(count_blocky(4, 4).unwrap(), 2099);
        assert_eq!(count_blocky(2, 8).unwrap(), 6815);
        assert_eq!(count_blocky(1, 3).unwrap(), 7);
        assert!(count_blocky(5, 4).is_err());
    }

    #[test]
    fn examples() {
        assert_eq!(exact_block_complexity(&IntMatrix::zeros(2, 2), 4).unwrap().value(), Some(0));
        assert_eq!(exact_block_complexity(&IntMatrix::identity(3), 4).unwrap().value(), Some(1));
        let a = IntMatrix::from_rows(&[[1, 0], [1, 1]]);
        let r = exact_block_complexity(&a, 4).unwrap();
        let OracleResult::Exact { value, witness } = r else { panic!() };
        assert_eq!(value, 2);
        assert_eq!(witness.evaluate(), a);
    }

    #[test]
    fn large_entries_and_depth() {
        let a = IntMatrix::from_rows(&[[3, 0], [0, 0]]);
        assert_eq!(exact_block_complexity(&a, 2).unwrap(), OracleResult::ExceedsLmax);
        assert_eq!(exact_block_complexity(&a, 3).unwrap().value(), Some(3));
        assert!(exact_block_complexity(&a, 7).is_err());
    }

    #[test]
    fn boolean_three_by_three_distribution() {
        let mut hist = [0usize; 4];
        for mask in 0u32..512 {
            let a = IntMatrix::new(3, 3, (0..9).map(|i| ((mask >> i) & 1) as i64).collect()).unwrap();
            let r = exact_block_complexity(&a, 3).unwrap();
            hist[r.value().unwrap()] += 1;
        }
        assert_eq!(hist, [1, 127, 384, 0]);
    }
}
