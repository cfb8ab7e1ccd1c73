use strata_core::enumerate::{enumerate, match_families, Bounds};
use strata_core::text::serialize;

fn main() {
    let adm = enumerate(&Bounds::default());
    let report = match_families(&adm);
    for (g, fams) in &report.per_graph {
        if fams.contains(&14) || fams.contains(&16) {
            println!("families {:?}:\n{}", fams, serialize(g));
        }
        if fams.len() != 1 {
            println!("MULTI/NONE {:?}:\n{}", fams, serialize(g));
        }
    }
}
