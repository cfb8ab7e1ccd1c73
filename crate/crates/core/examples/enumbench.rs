use strata_core::enumerate::{candidates, enumerate, match_families, Bounds};
use std::time::Instant;

fn main() {
    let b = Bounds::default();
    let t0 = Instant::now();
    let cands = candidates(&b);
    println!("candidates: {} in {:?}", cands.len(), t0.elapsed());
    let t1 = Instant::now();
    let adm = enumerate(&b);
    println!("admissible: {} in {:?}", adm.len(), t1.elapsed());
    let report = match_families(&adm);
    println!("families hit: {:?}", report.families_hit());
    println!("empty: {:?}", report.empty_families());
    println!("unmatched: {}", report.unmatched().len());
    for (g, fams) in &report.per_graph {
        if fams.is_empty() {
            println!("UNMATCHED:\n{}", strata_core::text::serialize(g));
        }
    }
    for (id, count) in &report.family_counts {
        println!("family {:2}: {}", id, count);
    }
}
