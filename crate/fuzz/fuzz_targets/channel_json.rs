// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(ch) = hadamult::codec::channel_from_json(data) else {
        return;
    };
    // Loaded channels are CP by construction; exercising them must not panic.
    let _ = hadamult::channel::is_trace_preserving(&ch);
    if ch.dim_in() <= 16 {
        let rho = hadamult::DensityMatrix::maximally_mixed(ch.dim_in());
        let _ = ch.apply(&rho);
    }
});
