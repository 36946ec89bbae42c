#![no_main]

use joint_select::experiment::config::{Experiment, ExperimentConfig};
use joint_select::experiment::ConfigLayer;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(layer) = ConfigLayer::from_toml(text) {
        if let Ok(cfg) = ExperimentConfig::resolve(Experiment::Exact, &[&layer]) {
            cfg.pipeline_config().expect("resolved configs are valid");
        }
    }
});
