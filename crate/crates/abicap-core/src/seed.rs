//! Deterministic seed derivation.
//!
//! Every random stream in a run is derived from the master seed through
//! the mixing below, so results are reproducible across hosts and so that
//! editing one condition never perturbs another: an agent stream depends
//! only on `(master_seed, condition name, agent id)`.

/// SplitMix64 finalizer; a cheap 64-bit avalanche.
pub fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// FNV-1a over a label's bytes.
pub fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Stream seed for one agent: `mix(mix(master ^ hash(condition)) ^ agent_id)`.
pub fn agent_seed(master_seed: u64, condition: &str, agent_id: u64) -> u64 {
    mix(mix(master_seed ^ label_hash(condition)) ^ agent_id)
}

/// Seed for the per-condition dyad pairing shuffle.
pub fn pairing_seed(master_seed: u64, condition: &str) -> u64 {
    mix(master_seed ^ label_hash(condition) ^ 0x5044_5941_4452_0001)
}

/// Seed for topology generation; shared by all conditions of an experiment.
pub fn topology_seed(master_seed: u64, instance: u64) -> u64 {
    mix(master_seed ^ mix(0x544f_504f_0000_0000 ^ instance))
}
