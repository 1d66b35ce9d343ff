//! Stores a message, repairs nodes by plain symbol transfer, then decodes
//! it from every k-subset of nodes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use regen::codec::{encode_file, helper_extract, init_state, newcomer_compute, reconstruct, repair, IoCounters, RepairConfig};
use regen::params::collector_sets;
use regen::{FailureHistory, SystemParams};

fn main() -> regen::Result<()> {
    let params = SystemParams::new(5, 3, 3, 191)?;
    let message: Vec<u64> = b"regen!".iter().map(|&c| u64::from(c)).collect();
    assert_eq!(message.len(), params.file_size);

    let mut state = init_state(&params, 42)?;
    let mut payloads = encode_file(&message, &state)?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut h = FailureHistory::new(params.n, params.alpha);
    let mut io = IoCounters::default();
    for f in [2, 5, 1, 2, 3, 4, 5, 1] {
        h.record(f)?;
        let out = repair(&state, &h, &mut rng, &RepairConfig::default())?;
        // helpers only copy; the newcomer does all the arithmetic
        let received = helper_extract(&payloads, f, &out.record.choices, &mut io)?;
        payloads[f - 1] = newcomer_compute(f, &received, &out.record.coefficients)?;
        state = out.state;
    }
    println!("{io:?}");

    for c in collector_sets(params.n, params.k) {
        let decoded = reconstruct(&c, &payloads, &state)?;
        let text: String = decoded.iter().map(|&v| v as u8 as char).collect();
        println!("{c:?} -> {text}");
        assert_eq!(decoded, message);
    }
    Ok(())
}
