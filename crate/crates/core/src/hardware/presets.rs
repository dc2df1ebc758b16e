//! Bundled device calibrations. The error rates are synthetic but sit in the
//! range typical of current superconducting devices.

use super::{load_calibration, HardwareError, HardwareModel};

const FALCON27: &str = include_str!("../../data/devices/falcon27.json");
const HUMMINGBIRD65: &str = include_str!("../../data/devices/hummingbird65.json");

pub const NAMES: [&str; 2] = ["falcon27", "hummingbird65"];

pub fn preset(name: &str) -> Result<HardwareModel, HardwareError> {
    match name {
        "falcon27" => load_calibration(FALCON27),
        "hummingbird65" => load_calibration(HUMMINGBIRD65),
        other => Err(HardwareError::UnknownPreset(other.to_string())),
    }
}

/// 27-qubit heavy-hex device.
pub fn falcon27() -> HardwareModel {
    preset("falcon27").expect("bundled calibration is valid")
}

/// 65-qubit heavy-hex device.
pub fn hummingbird65() -> HardwareModel {
    preset("hummingbird65").expect("bundled calibration is valid")
}

/// Raw JSON of a bundled calibration.
pub fn preset_json(name: &str) -> Option<&'static str> {
    match name {
        "falcon27" => Some(FALCON27),
        "hummingbird65" => Some(HUMMINGBIRD65),
        _ => None,
    }
}
