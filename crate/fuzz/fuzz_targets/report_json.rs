// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(rep) = hadamult_cli::ExperimentReport::from_json(data) {
        let _ = rep.to_table();
        let again = hadamult_cli::ExperimentReport::from_json(&rep.to_json()).expect("re-encoded report parses");
        assert_eq!(again.command, rep.command);
    }
    let _ = serde_json::from_str::<hadamult::CertificateReport>(data);
});
