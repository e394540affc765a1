use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;

fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut acc = 0i128;
    for (c, v) in m[0].iter().enumerate() {
        if *v == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c2, _)| c2 != c)
                    .map(|(_, w)| *w)
                    .collect()
            })
            .collect();
        let cofactor = v * det(&minor);
        acc += if c % 2 == 0 { cofactor } else { -cofactor };
    }
    acc
}

/// Invariant factors computed from first principles: dₖ is the gcd of all
/// k×k minors, and the k-th factor is dₖ/dₖ₋₁ for as long as dₖ ≠ 0.
pub fn minor_gcd_invariant_factors(data: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = data.len();
    let cols = data.first().map_or(0, Vec::len);
    let mut factors = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        'minors: for rset in (0..rows).combinations(k) {
            for cset in (0..cols).combinations(k) {
                let sub: Vec<Vec<i128>> = rset
                    .iter()
                    .map(|&r| cset.iter().map(|&c| data[r][c] as i128).collect())
                    .collect();
                g = g.gcd(&det(&sub));
                if g == 1 {
                    break 'minors;
                }
            }
        }
        if g == 0 {
            break;
        }
        factors.push(BigInt::from(g / prev));
        prev = g;
    }
    factors
}
