//! A long run of repairs under a chosen failure model, with recovery
//! checked at every stage.
//!
//!     cargo run --release --example repair_simulation -- adversarial-worst-node 2000

use regen::sim::{self, FailureModel, Report, RunConfig};

fn main() -> regen::Result<()> {
    let mut args = std::env::args().skip(1);
    let model = FailureModel::parse(&args.next().unwrap_or_else(|| "uniform".into()))?;
    let rounds = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);

    for (n, k, ell) in [(4, 3, 2), (5, 3, 3)] {
        let mut cfg = RunConfig::new(n, k, ell);
        cfg.rounds = rounds;
        cfg.failure_model = model.clone();
        cfg.seed = 1;
        cfg.reconstruct_at = vec![0, rounds / 2, rounds];
        let out = sim::run(&cfg)?;
        let p = out.params;
        println!("(n,k,ell)=({n},{k},{ell}) alpha={} B={} q={}", p.alpha, p.file_size, p.q());
        if let Some(Report::Summary { rounds_completed, passed, io, max_attempts, fpair, error }) = out.reports.last() {
            println!(
                "  {rounds_completed} repairs, passed={passed}, max draws per repair={max_attempts}, F-pair holds={}",
                fpair.holds
            );
            println!(
                "  symbols read {} / sent {} / helper field ops {}",
                io.symbols_read, io.symbols_sent, io.helper_field_ops
            );
            if let Some(e) = error {
                println!("  stopped: {e}");
            }
        }
        let draws: u32 = out.stage_reports().map(|s| s.attempts).sum();
        println!("  mean coefficient draws per repair: {:.2}", f64::from(draws) / rounds.max(1) as f64);
    }
    Ok(())
}
