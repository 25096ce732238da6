use schottky::lattice::coefficient_table;
use std::time::Instant;

#[test]
#[ignore]
fn probe_genus3() {
    let t0 = Instant::now();
    let t = coefficient_table(3, 6).unwrap();
    println!("genus 3 diag<=6: {} targets in {:.1?}", t.entries.len(), t0.elapsed());
    let bad = t.entries.iter().filter(|e| e.diff() != 0).count();
    println!("nonzero diffs (must be 0): {bad}");
}

#[test]
#[ignore]
fn probe_genus2_full() {
    let t0 = Instant::now();
    let t = coefficient_table(2, 8).unwrap();
    println!("genus 2 diag<=8: {} targets in {:.1?}", t.entries.len(), t0.elapsed());
    let bad = t.entries.iter().filter(|e| e.diff() != 0).count();
    println!("nonzero diffs (must be 0): {bad}");
}

#[test]
#[ignore]
fn probe_genus4() {
    let t0 = Instant::now();
    let t = coefficient_table(4, 4).unwrap();
    println!("genus 4 diag<=4: {} targets in {:.1?}", t.entries.len(), t0.elapsed());
    let nz = t.entries.iter().filter(|e| e.diff() != 0).count();
    let r3bad = t.entries.iter().filter(|e| e.diff() != 0 && e.target.rank() <= 3).count();
    println!("nonzero diffs: {nz}, nonzero at rank<=3 (must be 0): {r3bad}");
    if let Some(w) = t.minimal_separating_target() {
        println!("witness: {:?} diff {}", w.target.entries(), w.diff());
    }
    let d4 = schottky::lattice::EvenSymMatrix::d4_gram();
    if let Some(e) = t.lookup(&d4) {
        println!("D4: {} vs {} diff {}", e.n_e8e8, e.n_d16_plus, e.diff());
    }
}
