#![no_main]

use hetdp::harness::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = ExperimentConfig::parse(text) {
            let again = ExperimentConfig::parse(&cfg.to_config_string()).expect("round trip");
            assert_eq!(cfg, again);
        }
    }
});
