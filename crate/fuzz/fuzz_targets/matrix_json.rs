// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(m) = hadamult::codec::matrix_from_json(data) {
        // Whatever loads must re-encode to the same matrix.
        let again = hadamult::codec::matrix_from_json(&hadamult::codec::matrix_to_json(&m)).unwrap();
        assert_eq!(m, again);
    }
    let _ = hadamult::codec::hermitian_from_json(data);
});
