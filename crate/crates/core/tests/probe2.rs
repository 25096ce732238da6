use schottky::sampling::{sample_block_point, sample_points, PointRecipe};
use schottky::schottky::*;
use std::time::Instant;

#[test]
#[ignore]
fn probe_schottky_pipeline() {
    let t0 = Instant::now();
    let coeffs = SchottkyCoefficients::compute(4).unwrap();
    println!("coeffs: {} nonzero of {} targets in {:.1?}", coeffs.terms().len(), coeffs.table_size(), t0.elapsed());
    let (wt, wc) = coeffs.minimal_witness().unwrap();
    println!("witness: {:?} c = {}", wt.entries(), wc);
    let maxc = coeffs.terms().iter().map(|(_, c)| c.unsigned_abs()).max().unwrap();
    println!("max |c| = {maxc}");
    // trace profile
    let mut by_trace = std::collections::BTreeMap::<i64, (usize, f64)>::new();
    for (t, c) in coeffs.terms() {
        let e = by_trace.entry(t.trace()).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += (*c as f64).abs();
    }
    for (tr, (n, s)) in &by_trace {
        println!("trace {tr}: {n} terms, sum|c| = {s:.3e}");
    }

    let pts = sample_points(4, &PointRecipe::genus4_generic(), 42, 10);
    let t1 = Instant::now();
    for (i, p) in pts.iter().enumerate() {
        let ind = schottky_indicator(&coeffs, p, 1e-9).unwrap();
        println!("point {i}: lambda = {:.3}, indicator = {:.4e}", p.min_im_eigenvalue(), ind);
    }
    println!("indicators took {:.1?}", t1.elapsed());

    let t2 = Instant::now();
    let (c, dev) = proportionality(&coeffs, &pts, 1e-9, 1e-9).unwrap();
    println!("proportionality c = {:.15e} + {:.3e}i, max rel dev = {:.3e} ({:.1?})", c.re, c.im, dev, t2.elapsed());

    for k in 0..3 {
        let b = sample_block_point(&PointRecipe::genus4_generic(), 100 + k, 0);
        let ind = schottky_indicator(&coeffs, &b, 1e-9).unwrap();
        println!("block point {k}: indicator = {:.4e}", ind);
    }
}
