//! Scenarios shipped inside the binary, addressable by name.

use serde_json::json;

use crate::harness::scenario::Scenario;

pub const BUILTIN_NAMES: [&str; 6] = [
    "heat_cosy",
    "couette_cosx",
    "sharpness_p1_nu025",
    "inviscid_cosx",
    "fast_shear",
    "fast_cellular",
];

pub fn builtin(name: &str) -> Option<Scenario> {
    let v = match name {
        "heat_cosy" => json!({
            "name": name,
            "regime": "diffusive_shear",
            "initial": { "lattice": { "kmax": 1, "lmax": 4 }, "terms": [{ "ampl": 1.0, "kx": 0, "ky": 1 }] },
            "flow": "zero",
            "nu": 0.1,
            "times": { "t_end": 5.0, "samples": 51 }
        }),
        "couette_cosx" => json!({
            "name": name,
            "regime": "diffusive_shear",
            "initial": { "lattice": { "kmax": 1, "lmax": 48 }, "terms": [{ "ampl": 1.0, "kx": 1, "ky": 0 }] },
            "flow": "couette",
            "nu": 0.1,
            "dt": 1e-3,
            "times": { "t_end": 5.0, "samples": 501 }
        }),
        // n = ⌈ν^{-1}⌉ = 4
        "sharpness_p1_nu025" => json!({
            "name": name,
            "regime": "diffusive_shear",
            "initial": { "lattice": { "kmax": 1, "lmax": 4 }, "terms": [{ "ampl": 1.0, "kx": 0, "ky": 4 }] },
            "flow": "zero",
            "nu": 0.25,
            "times": { "t_end": 2.0, "samples": 21 }
        }),
        "inviscid_cosx" => json!({
            "name": name,
            "regime": "inviscid",
            "initial": { "lattice": { "kmax": 1, "lmax": 96 }, "terms": [{ "ampl": 1.0, "kx": 1, "ky": 0 }] },
            "flow": "couette",
            "times": { "t_end": 50.0, "samples": 200 }
        }),
        // steady sin y shear plus a zero-mean oscillating cell
        "fast_shear" => json!({
            "name": name,
            "regime": "fast_oscillation",
            "initial": { "lattice": { "kmax": 8, "lmax": 8 }, "terms": [{ "ampl": 1.0, "kx": 1, "ky": 0 }] },
            "flow": {
                "kind": "flow2d",
                "terms": [
                    { "ampl": 1.0, "kx": 0, "ky": 1, "phase_mode": "cos", "time_mode": "steady" },
                    { "ampl": 0.5, "kx": 1, "ky": 1, "phase_mode": "sin", "time_mode": "sin" }
                ],
                "bounds": { "lip": 2.5 },
                "period": 1.0
            },
            "nu": 0.1,
            "A": 100.0,
            "cutoff": 12,
            "eta": 0.5,
            "times": { "t_end": 2.0, "samples": 21 }
        }),
        "fast_cellular" => json!({
            "name": name,
            "regime": "fast_oscillation",
            "initial": { "lattice": { "kmax": 6, "lmax": 6 }, "terms": [{ "ampl": 1.0, "kx": 0, "ky": 1 }, { "ampl": 0.5, "kx": 1, "ky": 1, "phase_mode": "sin" }] },
            "flow": {
                "kind": "flow2d",
                "terms": [
                    { "ampl": 0.5, "kx": 1, "ky": -1, "time_mode": "sin" },
                    { "ampl": -0.5, "kx": 1, "ky": 1, "time_mode": "sin" }
                ],
                "bounds": { "lip": 1.5 },
                "period": 1.0
            },
            "nu": 0.1,
            "A": 200.0,
            "cutoff": 8,
            "times": { "t_end": 2.0, "samples": 21 }
        }),
        _ => return None,
    };
    Some(serde_json::from_value(v).expect("builtin scenarios are well formed"))
}
