//! Exact coefficient tables N(E8+E8, T) and N(D16+, T) for all even psd
//! targets up to a diagonal ceiling, and their differences (the Fourier
//! coefficients of the weight-8 cusp form).
//!
//! Both rank-16 lattices are assembled from rank-8 pieces through glue cosets
//! of D8 inside its dual:
//!
//!   class 0: D8 itself (integer coordinates, even sum)
//!   class s: integer coordinates, odd sum
//!   class v: half-integer coordinates, even coordinate sum
//!   class c: half-integer coordinates, odd coordinate sum
//!
//! E8 = D8 u v, and D16+ = { (x, y) : x, y in D8* in the SAME class }. Hence
//! for a column tuple with class pattern cvec and Gram T,
//!
//!   N(E8+E8, T)  = sum_{T1+T2=T} M(T1) M(T2),          M = sum over {0,v}^g
//!   N(D16+, T)   = sum_{cvec} sum_{T1+T2=T} N_cvec(T1) N_cvec(T2),
//!
//! where N_cvec(T') counts rank-8 tuples with the given classes and Gram.
//! Those rank-8 tables are enumerated exactly, with three compressions that
//! are pure bookkeeping (each visited representative stands for a counted
//! orbit): one representative per +-pair and per index-sorted completion
//! tuple, and first columns grouped by signed-permutation pattern.
//!
//! Everything is integer arithmetic end to end; floating point never enters.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::ops::Range;

use rayon::prelude::*;

use super::{enumerate_targets, EvenSymMatrix, LatticeError};

/// One row of the coefficient table.
#[derive(Debug, Clone)]
pub struct CoefficientEntry {
    pub target: EvenSymMatrix,
    pub n_e8e8: u128,
    pub n_d16_plus: u128,
}

impl CoefficientEntry {
    /// Fourier coefficient of the difference form, exact.
    pub fn diff(&self) -> i128 {
        self.n_e8e8 as i128 - self.n_d16_plus as i128
    }
}

#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub genus: usize,
    pub max_diag: i64,
    /// Sorted lexicographically by the row-major entries of the target.
    pub entries: Vec<CoefficientEntry>,
}

impl CoefficientTable {
    /// Minimal-trace target (ties broken lexicographically) of full rank with
    /// a nonzero coefficient, if any.
    pub fn minimal_separating_target(&self) -> Option<&CoefficientEntry> {
        self.entries
            .iter()
            .filter(|e| e.diff() != 0 && e.target.rank() == e.target.genus())
            .min_by(|a, b| {
                a.target
                    .trace()
                    .cmp(&b.target.trace())
                    .then_with(|| a.target.entries().cmp(b.target.entries()))
            })
    }

    pub fn lookup(&self, t: &EvenSymMatrix) -> Option<&CoefficientEntry> {
        self.entries
            .binary_search_by(|e| e.target.entries().cmp(t.entries()))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// CSV export: flattened row-major target entries, then both counts and
    /// the difference. Rows are sorted lexicographically by target.
    pub fn to_csv(&self) -> String {
        let g = self.genus;
        let mut out = String::new();
        for i in 0..g {
            for j in 0..g {
                out.push_str(&format!("t{}{},", i + 1, j + 1));
            }
        }
        out.push_str("n_e8e8,n_d16plus,diff\n");
        for e in &self.entries {
            for v in e.target.entries() {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{},{},{}\n", e.n_e8e8, e.n_d16_plus, e.diff()));
        }
        out
    }

    /// Canonical plain-text format, one row per target.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let rows: Vec<String> = (0..self.genus)
                .map(|i| {
                    (0..self.genus)
                        .map(|j| e.target.entry(i, j).to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            out.push_str(&format!(
                "T=[{}] N1={} N2={} diff={}\n",
                rows.join("; "),
                e.n_e8e8,
                e.n_d16_plus,
                e.diff()
            ));
        }
        out
    }
}

/// Compute the full coefficient table for the given genus. The per-column
/// norm ceiling keeps desk-scale runtimes: 8 for genus <= 2, 6 for genus 3,
/// 4 for genus 4.
pub fn coefficient_table(genus: usize, max_diag: i64) -> Result<CoefficientTable, LatticeError> {
    if genus < 1 || genus > 4 {
        return Err(LatticeError::GenusOutOfRange(genus));
    }
    if max_diag < 0 || max_diag % 2 != 0 {
        return Err(LatticeError::BadNormBound(max_diag));
    }
    let ceiling = match genus {
        1 | 2 => 8,
        3 => 6,
        _ => 4,
    };
    if max_diag > ceiling {
        return Err(LatticeError::ResourceLimit(format!(
            "max_diag {max_diag} beyond the genus-{genus} ceiling {ceiling}"
        )));
    }

    let ball = Ball::enumerate(max_diag);
    let targets = enumerate_targets(genus, max_diag)?;

    if genus == 1 {
        return Ok(genus1_table(&ball, targets, max_diag));
    }

    let folded = build_glue_tables(&ball, genus, max_diag);
    let conv = ConvTables::from_folded(folded, genus);

    // canonical classes under simultaneous signed column permutations;
    // representation numbers are invariant, so one convolution per class
    let mut classes: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, t) in targets.iter().enumerate() {
        classes.entry(canonical_signed_perm(genus, t.entries())).or_default().push(i);
    }
    let class_list: Vec<(Vec<i64>, Vec<usize>)> = classes.into_iter().collect();
    let counted: Vec<(Vec<usize>, u128, u128)> = class_list
        .par_iter()
        .map(|(canon, members)| {
            let t = EvenSymMatrix::new(genus, canon.clone()).expect("canonical image stays psd");
            let (a, b) = conv.count_pair(&t);
            (members.clone(), a, b)
        })
        .collect();

    let mut rows: Vec<Option<CoefficientEntry>> = vec![None; targets.len()];
    for (members, a, b) in counted {
        for i in members {
            rows[i] = Some(CoefficientEntry {
                target: targets[i].clone(),
                n_e8e8: a,
                n_d16_plus: b,
            });
        }
    }
    Ok(CoefficientTable {
        genus,
        max_diag,
        entries: rows.into_iter().map(|r| r.expect("every target counted")).collect(),
    })
}

// ---------------------------------------------------------------------------
// rank-8 ball in doubled coordinates
// ---------------------------------------------------------------------------

const DIM: usize = 8;

/// Vectors of D8* with norm <= max_norm, in doubled coordinates w = 2v.
/// `reps` holds one representative per +-pair (first nonzero coordinate
/// positive) plus the zero vector, sorted by (class, norm, coordinates).
struct Ball {
    reps: Vec<[i8; DIM]>,
    class_of: Vec<u8>,
    norm_of: Vec<i16>,
    /// contiguous runs of equal (class, norm)
    segments: Vec<(u8, i16, Range<usize>)>,
    /// full-shell pattern weights: weight[pattern][class][phi]
    patterns: Vec<PatternInfo>,
}

struct PatternInfo {
    /// all-positive sorted-descending representative
    rep: [i8; DIM],
    norm: i16,
    /// number of full-shell vectors of each class at transport parity phi
    weight: [[u64; 2]; 4],
}

fn classify(w: &[i8; DIM]) -> u8 {
    let half = w[0] & 1 == 1;
    let sum: i32 = w.iter().map(|&x| x as i32).sum();
    debug_assert_eq!(sum.rem_euclid(2), 0);
    let vsum_odd = (sum / 2).rem_euclid(2) == 1;
    match (half, vsum_odd) {
        (false, false) => 0,
        (false, true) => 1,
        (true, false) => 2,
        (true, true) => 3,
    }
}

impl Ball {
    fn enumerate(max_diag: i64) -> Ball {
        let wmax_sq = (4 * max_diag) as i32;

        // canonical representatives
        let mut all: Vec<[i8; DIM]> = Vec::new();
        let mut w = [0i8; DIM];
        enumerate_rec(&mut w, 0, wmax_sq, false, true, &mut all); // even coords
        enumerate_rec(&mut w, 0, wmax_sq, true, true, &mut all); // odd coords
        let mut keyed: Vec<([i8; DIM], u8, i16)> = all
            .into_iter()
            .map(|w| {
                let n: i32 = w.iter().map(|&x| (x as i32) * (x as i32)).sum();
                (w, classify(&w), (n / 4) as i16)
            })
            .map(|(w, c, n)| (w, c, n))
            .collect();
        keyed.sort_by(|a, b| (a.1, a.2, a.0).cmp(&(b.1, b.2, b.0)));

        let reps: Vec<[i8; DIM]> = keyed.iter().map(|k| k.0).collect();
        let class_of: Vec<u8> = keyed.iter().map(|k| k.1).collect();
        let norm_of: Vec<i16> = keyed.iter().map(|k| k.2).collect();
        let mut segments = Vec::new();
        let mut start = 0;
        while start < reps.len() {
            let mut end = start;
            while end < reps.len() && class_of[end] == class_of[start] && norm_of[end] == norm_of[start] {
                end += 1;
            }
            segments.push((class_of[start], norm_of[start], start..end));
            start = end;
        }

        // full-shell pattern weights
        let mut full: Vec<[i8; DIM]> = Vec::new();
        enumerate_rec(&mut w, 0, wmax_sq, false, false, &mut full);
        enumerate_rec(&mut w, 0, wmax_sq, true, false, &mut full);
        let mut pat_index: HashMap<[i8; DIM], usize> = HashMap::new();
        let mut patterns: Vec<PatternInfo> = Vec::new();
        for v in &full {
            let mut key = v.map(|x| x.abs());
            key.sort_unstable_by(|a, b| b.cmp(a));
            let idx = *pat_index.entry(key).or_insert_with(|| {
                let n: i32 = key.iter().map(|&x| (x as i32) * (x as i32)).sum();
                patterns.push(PatternInfo {
                    rep: key,
                    norm: (n / 4) as i16,
                    weight: [[0; 2]; 4],
                });
                patterns.len() - 1
            });
            let has_zero = v.iter().any(|&x| x == 0);
            let negs = v.iter().filter(|&&x| x < 0).count();
            let phi = if has_zero { 0 } else { negs % 2 };
            patterns[idx].weight[classify(v) as usize][phi] += 1;
        }

        Ball {
            reps,
            class_of,
            norm_of,
            segments,
            patterns,
        }
    }

    fn len(&self) -> usize {
        self.reps.len()
    }
}

/// Recursive box enumeration of the integer or all-odd doubled coordinates.
/// `canonical` keeps one vector per +-pair (first nonzero positive; zero kept).
fn enumerate_rec(
    w: &mut [i8; DIM],
    i: usize,
    budget: i32,
    odd: bool,
    canonical: bool,
    out: &mut Vec<[i8; DIM]>,
) {
    if i == DIM {
        let keep = !canonical
            || match w.iter().find(|&&x| x != 0) {
                None => true,
                Some(&x) => x > 0,
            };
        if keep {
            out.push(*w);
        }
        return;
    }
    let mut c = if odd { 1 } else { 0 };
    while c * c <= budget {
        w[i] = c as i8;
        enumerate_rec(w, i + 1, budget - c * c, odd, canonical, out);
        if c > 0 {
            w[i] = -(c as i8);
            enumerate_rec(w, i + 1, budget - c * c, odd, canonical, out);
        }
        c += 2;
    }
    w[i] = 0;
}

// ---------------------------------------------------------------------------
// fast u64 hash map for key -> counters
// ---------------------------------------------------------------------------

#[derive(Default)]
struct U64Hasher(u64);

impl Hasher for U64Hasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, _bytes: &[u8]) {
        unimplemented!("u64 keys only")
    }
    fn write_u64(&mut self, n: u64) {
        // Stafford mix 13
        let mut z = n.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        self.0 = z ^ (z >> 31);
    }
}

type U64Map<V> = HashMap<u64, V, BuildHasherDefault<U64Hasher>>;

// ---------------------------------------------------------------------------
// raw completion keys (per first-column pattern)
// ---------------------------------------------------------------------------
//
// layout (g-1 <= 3 completion slots, unused slots zero):
//   bits 50..56  classes, 2 bits per slot
//   bits 48..50  tie code
//   bits 36..48  slot norms, 4 bits each (v-norm 0..8)
//   bits  0..36  inner products in 2t units, bias +16, 6 bits each,
//                order (r,2) (r,3) (r,4) (2,3) (2,4) (3,4)

const IP_BIAS: i64 = 16;

#[inline(always)]
fn pack_raw(classes: [u8; 3], tie: u8, norms: [i16; 3], ips: [i16; 6]) -> u64 {
    let mut k = 0u64;
    for (s, &c) in classes.iter().enumerate() {
        k |= (c as u64) << (50 + 2 * s);
    }
    k |= (tie as u64) << 48;
    for (s, &n) in norms.iter().enumerate() {
        k |= (n as u64) << (36 + 4 * s);
    }
    for (s, &p) in ips.iter().enumerate() {
        debug_assert!((p as i64 + IP_BIAS) >= 0 && (p as i64 + IP_BIAS) < 64);
        k |= ((p as i64 + IP_BIAS) as u64) << (6 * s);
    }
    k
}

fn unpack_raw(k: u64) -> ([u8; 3], u8, [i16; 3], [i16; 6]) {
    let mut classes = [0u8; 3];
    let mut norms = [0i16; 3];
    let mut ips = [0i16; 6];
    for s in 0..3 {
        classes[s] = ((k >> (50 + 2 * s)) & 0b11) as u8;
        norms[s] = ((k >> (36 + 4 * s)) & 0b1111) as i16;
    }
    let tie = ((k >> 48) & 0b11) as u8;
    for s in 0..6 {
        ips[s] = (((k >> (6 * s)) & 0x3f) as i64 - IP_BIAS) as i16;
    }
    (classes, tie, norms, ips)
}

#[inline(always)]
fn half_dot(a: &[i8; DIM], b: &[i8; DIM]) -> i16 {
    let mut acc = 0i32;
    for i in 0..DIM {
        acc += (a[i] as i32) * (b[i] as i32);
    }
    debug_assert_eq!(acc % 2, 0);
    (acc / 2) as i16
}

// ---------------------------------------------------------------------------
// completion enumeration
// ---------------------------------------------------------------------------

/// For one first-column pattern, count index-sorted completion tuples grouped
/// by (classes, norms, inner products, tie code).
fn completions_for_pattern(ball: &Ball, rep: &[i8; DIM], genus: usize) -> U64Map<u64> {
    let r = ball.len();
    let ipr: Vec<i16> = ball.reps.iter().map(|w| half_dot(rep, w)).collect();

    match genus {
        2 => {
            let mut map: U64Map<u64> = U64Map::default();
            for i2 in 0..r {
                let key = pack_raw(
                    [ball.class_of[i2], 0, 0],
                    0,
                    [ball.norm_of[i2], 0, 0],
                    [ipr[i2], 0, 0, 0, 0, 0],
                );
                *map.entry(key).or_insert(0) += 1;
            }
            map
        }
        3 => {
            let chunks: Vec<Range<usize>> = par_ranges(r, 64);
            chunks
                .into_par_iter()
                .map(|range| {
                    let mut map: U64Map<u64> = U64Map::default();
                    for i2 in range {
                        let w2 = &ball.reps[i2];
                        let base = (ball.class_of[i2], ball.norm_of[i2], ipr[i2]);
                        for seg in &ball.segments {
                            let lo = seg.2.start.max(i2);
                            for i3 in lo..seg.2.end {
                                let p23 = half_dot(w2, &ball.reps[i3]);
                                let tie = (i3 == i2) as u8;
                                let key = pack_raw(
                                    [base.0, seg.0, 0],
                                    tie,
                                    [base.1, seg.1, 0],
                                    [base.2, ipr[i3], 0, p23, 0, 0],
                                );
                                *map.entry(key).or_insert(0) += 1;
                            }
                        }
                    }
                    map
                })
                .reduce(U64Map::default, merge_maps)
        }
        4 => {
            let chunks: Vec<Range<usize>> = par_ranges(r, 128);
            chunks
                .into_par_iter()
                .map(|range| completions_g4_chunk(ball, &ipr, range))
                .reduce(U64Map::default, merge_maps)
        }
        _ => unreachable!("completions only run for genus 2..=4"),
    }
}

fn par_ranges(n: usize, pieces: usize) -> Vec<Range<usize>> {
    // index-sorted loops are heavier for small i2, so slice finely
    let step = (n / pieces).max(1);
    let mut out = Vec::new();
    let mut s = 0;
    while s < n {
        out.push(s..(s + step).min(n));
        s += step;
    }
    out
}

fn merge_maps(mut a: U64Map<u64>, b: U64Map<u64>) -> U64Map<u64> {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// Genus-4 inner kernel: for fixed (i2, i3), sweep i4 over (class, norm)
/// segments accumulating (p14, p24, p34) histograms in a flat scratch array,
/// then drain the touched cells into the hash map.
fn completions_g4_chunk(ball: &Ball, ipr: &[i16], range: Range<usize>) -> U64Map<u64> {
    const W: usize = 2 * IP_BIAS as usize + 1; // 33
    let r = ball.len();
    let mut map: U64Map<u64> = U64Map::default();
    let mut flat = vec![0u32; W * W * W];
    let mut touched: Vec<u32> = Vec::with_capacity(4096);
    let mut ip2 = vec![0i16; r];

    for i2 in range {
        let w2 = &ball.reps[i2];
        for i in i2..r {
            ip2[i] = half_dot(w2, &ball.reps[i]);
        }
        let c2 = ball.class_of[i2];
        let n2 = ball.norm_of[i2];
        let p12 = ipr[i2];

        for i3 in i2..r {
            let w3 = &ball.reps[i3];
            let c3 = ball.class_of[i3];
            let n3 = ball.norm_of[i3];
            let p13 = ipr[i3];
            let p23 = ip2[i3];
            let tie23 = (i3 == i2) as u8;

            // i4 == i3 handled directly (adds the tie34 bit)
            {
                let key = pack_raw(
                    [c2, c3, c3],
                    tie23 | 0b10,
                    [n2, n3, n3],
                    [p12, p13, p13, p23, p23, n3 * 2],
                );
                *map.entry(key).or_insert(0) += 1;
            }

            for seg in &ball.segments {
                let lo = seg.2.start.max(i3 + 1);
                if lo >= seg.2.end {
                    continue;
                }
                for i4 in lo..seg.2.end {
                    let p34 = half_dot(w3, &ball.reps[i4]);
                    let idx = ((ipr[i4] as i64 + IP_BIAS) as usize * W
                        + (ip2[i4] as i64 + IP_BIAS) as usize)
                        * W
                        + (p34 as i64 + IP_BIAS) as usize;
                    if flat[idx] == 0 {
                        touched.push(idx as u32);
                    }
                    flat[idx] += 1;
                }
                for &idx in &touched {
                    let idx = idx as usize;
                    let m = flat[idx] as u64;
                    flat[idx] = 0;
                    let p14 = (idx / (W * W)) as i64 - IP_BIAS;
                    let p24 = ((idx / W) % W) as i64 - IP_BIAS;
                    let p34 = (idx % W) as i64 - IP_BIAS;
                    let key = pack_raw(
                        [c2, c3, seg.0],
                        tie23,
                        [n2, n3, seg.1],
                        [p12, p13, p14 as i16, p23, p24 as i16, p34 as i16],
                    );
                    *map.entry(key).or_insert(0) += m;
                }
                touched.clear();
            }
        }
    }
    map
}

// ---------------------------------------------------------------------------
// fold: orbit bookkeeping into per-class-pattern tables
// ---------------------------------------------------------------------------
//
// conv key layout:
//   bits 58..64  completion classes, 2 bits per slot
//   bits 42..58  column norms, 4 bits each (first column in slot 0)
//   bits  0..42  inner products in 2t units, bias +64, 7 bits each,
//                order (12) (13) (14) (23) (24) (34)

const CONV_BIAS: i64 = 64;

#[inline(always)]
fn pack_conv(dvec: [u8; 3], norms: [i16; 4], ips: [i16; 6]) -> u64 {
    let mut k = 0u64;
    for (s, &c) in dvec.iter().enumerate() {
        k |= (c as u64) << (58 + 2 * s);
    }
    for (s, &n) in norms.iter().enumerate() {
        k |= (n as u64) << (42 + 4 * s);
    }
    for (s, &p) in ips.iter().enumerate() {
        debug_assert!((p as i64 + CONV_BIAS) >= 0 && (p as i64 + CONV_BIAS) < 128);
        k |= ((p as i64 + CONV_BIAS) as u64) << (7 * s);
    }
    k
}

/// Swap glue classes v <-> c in the packed completion-class bits.
#[inline(always)]
fn swap_halves_key(k: u64) -> u64 {
    let classes = (k >> 58) & 0x3f;
    let toggle = (classes & 0b10_10_10) >> 1;
    k ^ (toggle << 58)
}

const PERM3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [2, 1, 0],
    [0, 2, 1],
    [1, 2, 0],
    [2, 0, 1],
];

/// Transversal of slot permutations per tie code, chosen so each ordered
/// completion tuple is produced exactly once from its index-sorted
/// representative.
fn transversal(genus: usize, tie: u8) -> &'static [[usize; 3]] {
    match (genus, tie) {
        (2, _) => &PERM3[0..1],
        (3, 0) => &[[0, 1, 2], [1, 0, 2]],
        (3, _) => &PERM3[0..1],
        (4, 0) => &PERM3,
        // slots 0,1 equal: place the distinct slot-2 content in each position
        (4, 1) => &[[0, 1, 2], [0, 2, 1], [2, 1, 0]],
        // slots 1,2 equal: place the distinct slot-0 content in each position
        (4, 2) => &[[0, 1, 2], [1, 0, 2], [2, 1, 0]],
        _ => &PERM3[0..1],
    }
}

/// Per-table value: counts indexed by the class of the first column.
type Counter4 = [u64; 4];

fn build_glue_tables(ball: &Ball, genus: usize, _max_diag: i64) -> U64Map<Counter4> {
    let k = genus - 1; // completion slots
    let pair_of = |a: usize, b: usize| -> usize {
        // pairs (0,1) (0,2) (1,2) -> ip slots 3,4,5
        match (a.min(b), a.max(b)) {
            (0, 1) => 0,
            (0, 2) => 1,
            _ => 2,
        }
    };

    let mut table: U64Map<Counter4> = U64Map::default();
    for pat in &ball.patterns {
        let raw = completions_for_pattern(ball, &pat.rep, genus);
        let w0: Counter4 = [
            pat.weight[0][0],
            pat.weight[1][0],
            pat.weight[2][0],
            pat.weight[3][0],
        ];
        let w1: Counter4 = [
            pat.weight[0][1],
            pat.weight[1][1],
            pat.weight[2][1],
            pat.weight[3][1],
        ];
        let any_w1 = w1.iter().any(|&x| x > 0);

        for (&key, &m) in raw.iter() {
            let (classes, tie, norms, ips) = unpack_raw(key);
            // slot data: ips_r[s], pairwise ips in slots 3..6 of `ips`
            for perm in transversal(genus, tie) {
                let mut pc = [0u8; 3];
                let mut pn = [0i16; 3];
                let mut pr = [0i16; 3];
                let mut pp = [0i16; 3];
                for s in 0..k {
                    pc[s] = classes[perm[s]];
                    pn[s] = norms[perm[s]];
                    pr[s] = ips[perm[s]];
                }
                if k == 3 {
                    for (a, b, slot) in [(0usize, 1usize, 0usize), (0, 2, 1), (1, 2, 2)] {
                        pp[slot] = ips[3 + pair_of(perm[a], perm[b])];
                    }
                } else if k == 2 {
                    pp[0] = ips[3];
                }

                // sign patterns over completion slots with nonzero norm
                let signable: Vec<usize> = (0..k).filter(|&s| pn[s] > 0).collect();
                for dmask in 0..(1u32 << signable.len()) {
                    let mut sgn = [1i16; 3];
                    for (bit, &s) in signable.iter().enumerate() {
                        if dmask >> bit & 1 == 1 {
                            sgn[s] = -1;
                        }
                    }
                    let ips6 = [
                        pr[0] * sgn[0],
                        pr[1] * sgn[1],
                        pr[2] * sgn[2],
                        pp[0] * sgn[0] * sgn[1],
                        pp[1] * sgn[0] * sgn[2],
                        pp[2] * sgn[1] * sgn[2],
                    ];
                    let norms4 = [pat.norm, pn[0], pn[1], pn[2]];
                    let key64 = pack_conv(pc, norms4, ips6);

                    let e = table.entry(key64).or_insert([0; 4]);
                    for c in 0..4 {
                        e[c] += w0[c] * m;
                    }
                    if any_w1 {
                        let e = table.entry(swap_halves_key(key64)).or_insert([0; 4]);
                        for c in 0..4 {
                            e[c] += w1[c] * m;
                        }
                    }
                }
            }
        }
    }
    table
}

// ---------------------------------------------------------------------------
// convolution to rank 16
// ---------------------------------------------------------------------------

struct ConvTables {
    genus: usize,
    /// D16+ side: buckets keyed by (completion classes, column norms);
    /// entries sorted by inner-product key, values per first-column class.
    glue_buckets: HashMap<(u8, u64), Vec<(u64, Counter4)>>,
    /// E8+E8 side: class pattern summed over {0, v}^g.
    e8_buckets: HashMap<u64, Vec<(u64, u64)>>,
}

impl ConvTables {
    fn from_folded(table: U64Map<Counter4>, genus: usize) -> ConvTables {
        let k = genus - 1;
        let mut glue: HashMap<(u8, u64), Vec<(u64, Counter4)>> = HashMap::new();
        let mut e8: HashMap<u64, U64Map<u64>> = HashMap::new();
        for (&key, &vals) in table.iter() {
            let dvec = ((key >> 58) & 0x3f) as u8;
            let norms = (key >> 42) & 0xffff;
            let off = key & ((1u64 << 42) - 1);
            glue.entry((dvec, norms)).or_default().push((off, vals));

            // E8 classes are {0, v} = codes {0, 2}: every completion class even
            let all_e8 = (0..k).all(|s| {
                let c = (dvec >> (2 * s)) & 0b11;
                c == 0 || c == 2
            });
            if all_e8 {
                let m = vals[0] + vals[2];
                if m > 0 {
                    *e8.entry(norms).or_default().entry(off).or_insert(0) += m;
                }
            }
        }
        for bucket in glue.values_mut() {
            bucket.sort_unstable_by_key(|e| e.0);
        }
        let e8_buckets = e8
            .into_iter()
            .map(|(norms, m)| {
                let mut v: Vec<(u64, u64)> = m.into_iter().collect();
                v.sort_unstable_by_key(|e| e.0);
                (norms, v)
            })
            .collect();
        ConvTables {
            genus,
            glue_buckets: glue,
            e8_buckets,
        }
    }

    /// (N(E8+E8, T), N(D16+, T)) for an integral even psd target.
    fn count_pair(&self, t: &EvenSymMatrix) -> (u128, u128) {
        let g = self.genus;
        let tdiag: Vec<i64> = (0..g).map(|j| t.entry(j, j)).collect();
        let mut toff = [0i64; 6];
        let mut s = 0;
        for i in 0..g {
            for j in i + 1..g {
                toff[ip_slot(i, j)] = 2 * t.entry(i, j);
                s += 1;
            }
        }
        let _ = s;

        let complement_diag = |norms: u64| -> Option<u64> {
            let mut out = 0u64;
            for j in 0..g {
                let n1 = (norms >> (4 * j)) & 0xf;
                let d = tdiag[j] - n1 as i64;
                if d < 0 || d > 8 {
                    return None;
                }
                out |= (d as u64) << (4 * j);
            }
            Some(out)
        };
        let used = used_slot_mask(g);
        let complement_off = |off: u64| -> Option<u64> {
            let mut out = 0u64;
            for slot in 0..6 {
                let p1 = ((off >> (7 * slot)) & 0x7f) as i64 - CONV_BIAS;
                if !used[slot] {
                    if p1 != 0 {
                        return None;
                    }
                    out |= (CONV_BIAS as u64) << (7 * slot);
                    continue;
                }
                let p2 = toff[slot] - p1;
                if p2 < -CONV_BIAS || p2 >= CONV_BIAS {
                    return None;
                }
                out |= ((p2 + CONV_BIAS) as u64) << (7 * slot);
            }
            Some(out)
        };

        let mut n_e8 = 0u128;
        for (norms1, b1) in &self.e8_buckets {
            let Some(norms2) = complement_diag(*norms1) else {
                continue;
            };
            let Some(b2) = self.e8_buckets.get(&norms2) else {
                continue;
            };
            for (off1, m1) in b1 {
                let Some(off2) = complement_off(*off1) else {
                    continue;
                };
                if let Ok(i) = b2.binary_search_by_key(&off2, |e| e.0) {
                    n_e8 += *m1 as u128 * b2[i].1 as u128;
                }
            }
        }

        let mut n_d16 = 0u128;
        for ((dvec, norms1), b1) in &self.glue_buckets {
            let Some(norms2) = complement_diag(*norms1) else {
                continue;
            };
            let Some(b2) = self.glue_buckets.get(&(*dvec, norms2)) else {
                continue;
            };
            for (off1, v1) in b1 {
                let Some(off2) = complement_off(*off1) else {
                    continue;
                };
                if let Ok(i) = b2.binary_search_by_key(&off2, |e| e.0) {
                    let v2 = &b2[i].1;
                    for c in 0..4 {
                        n_d16 += v1[c] as u128 * v2[c] as u128;
                    }
                }
            }
        }
        (n_e8, n_d16)
    }
}

fn ip_slot(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        _ => 5,
    }
}

/// Which of the six inner-product slots carry data at this genus.
fn used_slot_mask(g: usize) -> [bool; 6] {
    let mut used = [false; 6];
    for i in 0..g {
        for j in i + 1..g {
            used[ip_slot(i, j)] = true;
        }
    }
    used
}

// ---------------------------------------------------------------------------
// genus 1
// ---------------------------------------------------------------------------

fn genus1_table(ball: &Ball, targets: Vec<EvenSymMatrix>, max_diag: i64) -> CoefficientTable {
    // full shell sizes per class (zero vector included in class 0, norm 0)
    let mut shells = [[0u64; 9]; 4];
    shells[0][0] = 1;
    for (i, _) in ball.reps.iter().enumerate() {
        let n = ball.norm_of[i] as usize;
        if ball.norm_of[i] > 0 {
            shells[ball.class_of[i] as usize][n] += 2;
        }
    }
    let entries = targets
        .into_iter()
        .map(|t| {
            let n = t.entry(0, 0) as usize;
            let mut e8 = 0u128;
            let mut d16 = 0u128;
            for a in 0..=n {
                let b = n - a;
                let m1 = (shells[0][a] + shells[2][a]) as u128;
                let m2 = (shells[0][b] + shells[2][b]) as u128;
                e8 += m1 * m2;
                for c in 0..4 {
                    d16 += shells[c][a] as u128 * shells[c][b] as u128;
                }
            }
            CoefficientEntry {
                target: t,
                n_e8e8: e8,
                n_d16_plus: d16,
            }
        })
        .collect();
    CoefficientTable {
        genus: 1,
        max_diag,
        entries,
    }
}

// ---------------------------------------------------------------------------
// signed-permutation canonical form of targets
// ---------------------------------------------------------------------------

fn canonical_signed_perm(g: usize, entries: &[i64]) -> Vec<i64> {
    let perms: Vec<Vec<usize>> = all_perms(g);
    let mut best: Option<Vec<i64>> = None;
    let mut image = vec![0i64; g * g];
    for p in &perms {
        for smask in 0..(1u32 << g) {
            for i in 0..g {
                for j in 0..g {
                    let si = if smask >> i & 1 == 1 { -1 } else { 1 };
                    let sj = if smask >> j & 1 == 1 { -1 } else { 1 };
                    image[i * g + j] = si as i64 * sj as i64 * entries[p[i] * g + p[j]];
                }
            }
            if best.as_ref().map_or(true, |b| image < *b) {
                best = Some(image.clone());
            }
        }
    }
    best.unwrap()
}

fn all_perms(g: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..g).collect();
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{direct_sum, gram_d16_plus, gram_e8, representation_count, EnumLimits};

    #[test]
    fn genus1_classical_counts() {
        let t = coefficient_table(1, 8).unwrap();
        let get = |n: i64| {
            t.entries
                .iter()
                .find(|e| e.target.entry(0, 0) == n)
                .unwrap()
        };
        assert_eq!(get(0).n_e8e8, 1);
        assert_eq!(get(0).n_d16_plus, 1);
        assert_eq!(get(2).n_e8e8, 480);
        assert_eq!(get(2).n_d16_plus, 480);
        assert_eq!(get(4).n_e8e8, 61920);
        assert_eq!(get(4).n_d16_plus, 61920);
        assert_eq!(get(6).n_e8e8, 1_050_240);
        assert_eq!(get(6).n_d16_plus, 1_050_240);
        assert_eq!(get(8).n_e8e8, 7_926_240);
        assert_eq!(get(8).n_d16_plus, 7_926_240);
    }

    #[test]
    fn genus2_known_counts_and_witt() {
        let t = coefficient_table(2, 4).unwrap();
        for e in &t.entries {
            assert_eq!(
                e.n_e8e8,
                e.n_d16_plus,
                "rank <= 2 targets cannot separate the lattices: T = {:?}",
                e.target.entries()
            );
        }
        let get = |es: &[i64]| {
            t.entries
                .iter()
                .find(|e| e.target.entries() == es)
                .unwrap()
                .n_e8e8
        };
        assert_eq!(get(&[2, 0, 0, 2]), 175_680);
        assert_eq!(get(&[2, 1, 1, 2]), 26_880);
        assert_eq!(get(&[2, 2, 2, 2]), 480);
    }

    #[test]
    fn genus2_matches_general_counting_engine() {
        let e8e8 = direct_sum(&gram_e8(), &gram_e8());
        let d16 = gram_d16_plus();
        let table = coefficient_table(2, 2).unwrap();
        let limits = EnumLimits {
            max_ops: 500_000_000,
            ..EnumLimits::default()
        };
        for e in &table.entries {
            let a = representation_count(&e8e8, &e.target, &limits).unwrap();
            let b = representation_count(&d16, &e.target, &limits).unwrap();
            assert_eq!(a, e.n_e8e8, "E8+E8 at {:?}", e.target.entries());
            assert_eq!(b, e.n_d16_plus, "D16+ at {:?}", e.target.entries());
        }
    }

    #[test]
    fn csv_shape() {
        let t = coefficient_table(1, 4).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t11,n_e8e8,n_d16plus,diff");
        assert_eq!(lines.next().unwrap(), "0,1,1,0");
        assert_eq!(lines.next().unwrap(), "2,480,480,0");
    }

    #[test]
    fn canonical_form_is_orbit_invariant() {
        // [[2,1],[1,2]] and [[2,-1],[-1,2]] are signed-permutation equivalent
        let a = canonical_signed_perm(2, &[2, 1, 1, 2]);
        let b = canonical_signed_perm(2, &[2, -1, -1, 2]);
        assert_eq!(a, b);
        let c = canonical_signed_perm(2, &[2, 0, 0, 4]);
        let d = canonical_signed_perm(2, &[4, 0, 0, 2]);
        assert_eq!(c, d);
    }
}
