// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(rho) = hadamult::codec::density_from_json(data) {
        assert!((rho.hermitian().trace() - 1.0).abs() <= 1e-10);
    }
});
