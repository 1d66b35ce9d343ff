//! Builds the signal flow graph of a short history and reads off linking
//! ranks: per collector set, at every stage, plus the backward trace of
//! active vertices.

use regen::flowgraph::{active_vertex_trace, recovery_rank_at, Vertex};
use regen::params::collector_sets;
use regen::{build_graph, gammoid_rank, FailureHistory, SystemParams};

fn main() -> regen::Result<()> {
    let params = SystemParams::new(4, 3, 2, 53)?;
    let h = FailureHistory::from_failures(4, 2, &[2, 3, 1, 2, 4, 3])?;
    let graph = build_graph(&params, &h, h.len())?;
    println!(
        "{} vertices, {} edges over {} stages (B = {})",
        graph.vertex_count(),
        graph.edge_count(),
        graph.horizon(),
        params.file_size
    );

    let newcomer = graph.node_vertices(1, 2);
    for v in &newcomer {
        let preds: Vec<String> = graph.predecessors(*v).iter().map(Vertex::to_string).collect();
        println!("{v} <- {}", preds.join(", "));
    }

    for c in collector_sets(4, 3) {
        let ranks: Vec<usize> = (0..=h.len()).map(|t| recovery_rank_at(&graph, t, &c)).collect();
        let trace = active_vertex_trace(&graph, &c)?;
        println!(
            "collectors {c:?}: rank by stage {ranks:?}, active sizes {:?}, linked {}",
            trace.sizes, trace.linked_to_source
        );
    }

    // a dependent set: a newcomer symbol together with everything it was built from
    let mut set = newcomer[..1].to_vec();
    set.extend(graph.predecessors(newcomer[0]));
    println!("rank of {} symbols around one newcomer symbol: {}", set.len(), gammoid_rank(&graph, &set));
    Ok(())
}
