use strata_core::graph::{weight, EdgeId, LabeledGraph, Marking, VertexId};
use strata_core::rules::{check, Verdict};

fn main() {
    // K4: T=v0 full; A=v1, B=v2, C=v3 hollow.
    // Edges: TA=3, TB=2, TC=2, AB=3, AC=2, BC=3.
    let v = |s: &str| VertexId::from(s);
    let g = LabeledGraph::source(
        [
            (v("t"), Marking::Full),
            (v("a"), Marking::Hollow),
            (v("b"), Marking::Hollow),
            (v("c"), Marking::Hollow),
        ],
        [
            (EdgeId::from("ta"), v("t"), v("a"), weight(3)),
            (EdgeId::from("tb"), v("t"), v("b"), weight(2)),
            (EdgeId::from("tc"), v("t"), v("c"), weight(2)),
            (EdgeId::from("ab"), v("a"), v("b"), weight(3)),
            (EdgeId::from("ac"), v("a"), v("c"), weight(2)),
            (EdgeId::from("bc"), v("b"), v("c"), weight(3)),
        ],
    )
    .unwrap();
    match check(&g, None).unwrap() {
        Verdict::Admissible(_) => println!("ADMISSIBLE"),
        Verdict::Excluded(cert) => {
            println!("EXCLUDED:\n{}", strata_core::rules::certificate_to_text(&cert));
        }
    }
}
