// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(ch) = hadamult_cli::named::named_channel(data) {
        assert!(ch.dim_in() >= 1);
    }
});
