//! Which symbol each helper sends, stage by stage, and the F-pair check on
//! the resulting history.
//!
//!     cargo run --example choice_function -- 4 2 1 2 3 1 4 2 3

use regen::choice::{cutoff_stage, WindowScope};
use regen::{verify_fpair_condition, FailureHistory};

fn main() -> regen::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let (n, alpha, failures) = match args.as_slice() {
        [n, alpha, rest @ ..] if !rest.is_empty() => (*n, *alpha, rest.to_vec()),
        _ => (4, 2, vec![1, 2, 3, 1, 4, 2, 3]),
    };

    let mut h = FailureHistory::new(n, alpha);
    println!("n = {n}, alpha = {alpha}");
    for &f in &failures {
        let t = h.len();
        let cutoff = cutoff_stage(&h, t, alpha).map_or("-".to_string(), |c| c.to_string());
        let choices = h.record(f)?;
        println!("t={t:<3} F_t={f}  cutoff={cutoff:<3} p_t={choices:?}");
    }

    let v = verify_fpair_condition(&h, alpha, h.len(), WindowScope::All)?;
    println!(
        "F-pair condition: {} ({} pairs, {} windows)",
        if v.holds { "holds" } else { "violated" },
        v.pairs_checked,
        v.windows_checked
    );
    if let Some(w) = v.witness {
        println!("witness: {w:?}");
    }
    print!("\nreplay:\n{}", h.to_replay());
    Ok(())
}
