//! Brute-force oracles that share no code with the library: plain digit
//! vectors, direct distance counts and exhaustive subset enumeration.

#![allow(dead_code)]

pub fn distance(u: &[u32], v: &[u32]) -> usize {
    u.iter().zip(v).filter(|(a, b)| a != b).count()
}

/// All words of `[q]^n` in lexicographic order.
pub fn all_words(q: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..q).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

/// Words within distance `radius` of `center`, by changing positions one at a
/// time left to right.
pub fn ball(q: u32, center: &[u32], radius: usize) -> Vec<Vec<u32>> {
    fn go(q: u32, pos: usize, left: usize, w: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == w.len() {
            out.push(w.clone());
            return;
        }
        go(q, pos + 1, left, w, out);
        if left > 0 {
            let keep = w[pos];
            for s in (0..q).filter(|&s| s != keep) {
                w[pos] = s;
                go(q, pos + 1, left - 1, w, out);
            }
            w[pos] = keep;
        }
    }
    let mut out = Vec::new();
    go(q, 0, radius, &mut center.to_vec(), &mut out);
    out
}

pub fn index_of(q: u32, w: &[u32]) -> usize {
    w.iter().fold(0, |acc, &s| acc * q as usize + s as usize)
}

/// True when every word of the space is within `radius` of some codeword.
pub fn covers(q: u32, n: usize, code: &[Vec<u32>], radius: usize) -> bool {
    all_words(q, n)
        .iter()
        .all(|w| code.iter().any(|c| distance(c, w) <= radius))
}

type Bits = Vec<u64>;

fn ball_bits(q: u32, n: usize, radius: usize) -> Vec<Bits> {
    let words = all_words(q, n);
    let blocks = words.len().div_ceil(64);
    words
        .iter()
        .map(|c| {
            let mut bits = vec![0u64; blocks];
            for (j, w) in words.iter().enumerate() {
                if distance(c, w) <= radius {
                    bits[j / 64] |= 1 << (j % 64);
                }
            }
            bits
        })
        .collect()
}

/// Smallest `k` such that some `k`-subset of `[q]^n` covers, found by trying
/// every subset of each size in turn.
pub fn naive_minimum(q: u32, n: usize, radius: usize) -> usize {
    let balls = ball_bits(q, n, radius);
    let size = balls.len();
    let full: Bits = (0..size.div_ceil(64))
        .map(|b| {
            let hi = ((b + 1) * 64).min(size) - b * 64;
            if hi == 64 {
                u64::MAX
            } else {
                (1u64 << hi) - 1
            }
        })
        .collect();

    fn search(balls: &[Bits], full: &Bits, start: usize, left: usize, acc: &Bits) -> bool {
        if left == 0 {
            return acc == full;
        }
        (start..balls.len()).any(|i| {
            let next: Bits = acc.iter().zip(&balls[i]).map(|(a, b)| a | b).collect();
            search(balls, full, i + 1, left - 1, &next)
        })
    }

    let empty = vec![0u64; full.len()];
    (1..=size)
        .find(|&k| search(&balls, &full, 0, k, &empty))
        .expect("the whole space covers")
}
