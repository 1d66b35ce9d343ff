//! Strict-tier repairs: after every repair the linear matroid of the
//! encoding vectors is compared with the gammoid of the flow graph.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use regen::codec::{build_transfer_matrix, init_state, repair, RepairConfig, Tier};
use regen::oracle::{bad_coefficient_bound, OneLayerCheck};
use regen::{FailureHistory, SystemParams};

fn main() -> regen::Result<()> {
    let params = SystemParams::new(4, 3, 2, 53)?;
    let (bad, q) = bad_coefficient_bound(&params);
    println!("at most {bad}/{q} of coefficient draws can break a required set");

    let config = RepairConfig { tier: Tier::Strict, ..RepairConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut state = init_state(&params, 3)?;
    let mut h = FailureHistory::new(4, 2);
    for f in [1, 3, 2, 4, 1, 2] {
        h.record(f)?;
        let required = OneLayerCheck::new(&params, &state.e, f, h.choices(state.t)).basis_count();
        let out = repair(&state, &h, &mut rng, &config)?;
        let verdict = out.iso.as_ref().expect("strict tier reports a verdict");
        let h_t = build_transfer_matrix(&out.record, &params);
        assert_eq!(state.e.mul(&h_t)?, out.state.e);
        println!(
            "t={} node {f}: {} draw(s), {required} required bases, {} subsets compared, isomorphic={}",
            state.t, out.attempts, verdict.subsets_checked, verdict.holds
        );
        state = out.state;
    }
    Ok(())
}
