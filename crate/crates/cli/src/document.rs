//! JSON documents: circuits (schema version 1), states and certificates.

use std::collections::BTreeMap;

use qdos_core::{Circuit, CircuitOp, Complex, ComplexMatrix, GateKind, StateVector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDocument {
    pub version: u32,
    pub n_qubits: usize,
    pub ops: Vec<OpDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpDocument {
    pub gate: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controls: Option<Controls>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Controls {
    pub qubits: Vec<usize>,
    pub values: Vec<u8>,
}

const U2_KEYS: [&str; 8] = ["a_re", "a_im", "b_re", "b_im", "c_re", "c_im", "d_re", "d_im"];

fn params<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Name and parameters of a gate without its controls.
fn describe(kind: &GateKind) -> (String, BTreeMap<String, f64>) {
    let p = match kind {
        GateKind::Phase(d) | GateKind::Cphase(d) | GateKind::C2phase(d) => params([("delta", *d)]),
        GateKind::Ry(t) => params([("theta", *t)]),
        GateKind::U2(m) => {
            let entries = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
            let values = entries.iter().flat_map(|z| [z.re, z.im]);
            U2_KEYS.iter().map(|k| k.to_string()).zip(values).collect()
        }
        _ => BTreeMap::new(),
    };
    (kind.name().to_string(), p)
}

impl OpDocument {
    pub fn from_op(op: &CircuitOp) -> Self {
        match &op.kind {
            GateKind::Cu { base, control_value } => {
                let (gate, params) = describe(base);
                Self {
                    gate,
                    targets: vec![op.targets[0]],
                    controls: Some(Controls {
                        qubits: vec![op.targets[1]],
                        values: vec![*control_value],
                    }),
                    params,
                }
            }
            GateKind::C2u { base, control_values } => {
                let (gate, params) = describe(base);
                Self {
                    gate,
                    targets: vec![op.targets[0]],
                    controls: Some(Controls {
                        qubits: op.targets[1..].to_vec(),
                        values: control_values.to_vec(),
                    }),
                    params,
                }
            }
            kind => {
                let (gate, params) = describe(kind);
                Self {
                    gate,
                    targets: op.targets.clone(),
                    controls: None,
                    params,
                }
            }
        }
    }

    fn param(&self, key: &str) -> Result<f64, CliError> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| CliError::Parse(format!("gate {} needs parameter '{key}'", self.gate)))
    }

    fn expect_params(&self, keys: &[&str]) -> Result<(), CliError> {
        if let Some(extra) = self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(CliError::Parse(format!("gate {} has unknown parameter '{extra}'", self.gate)));
        }
        if let Some((k, v)) = self.params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(CliError::Parse(format!("gate {} parameter '{k}' is {v}", self.gate)));
        }
        for k in keys {
            self.param(k)?;
        }
        Ok(())
    }

    fn base_kind(&self) -> Result<GateKind, CliError> {
        let kind = match self.gate.as_str() {
            "NOT" => GateKind::Not,
            "H" => GateKind::H,
            "X" => GateKind::PauliX,
            "Y" => GateKind::PauliY,
            "Z" => GateKind::PauliZ,
            "CNOT" => GateKind::Cnot,
            "CNOT_BAR" => GateKind::CnotBar,
            "CNOT_R" => GateKind::CnotR,
            "CNOT_R_BAR" => GateKind::CnotRBar,
            "SWAP" => GateKind::Swap,
            "TOFFOLI" => GateKind::Toffoli,
            "PHASE" | "CPHASE" | "C2PHASE" => {
                self.expect_params(&["delta"])?;
                let d = self.param("delta")?;
                return Ok(match self.gate.as_str() {
                    "PHASE" => GateKind::phase(d),
                    "CPHASE" => GateKind::cphase(d),
                    _ => GateKind::c2phase(d),
                });
            }
            "RY" => {
                self.expect_params(&["theta"])?;
                return Ok(GateKind::ry(self.param("theta")?));
            }
            "U2" => {
                self.expect_params(&U2_KEYS)?;
                let v: Vec<f64> = U2_KEYS.iter().map(|k| self.params[*k]).collect();
                let m = ComplexMatrix::from_rows([
                    [Complex::new(v[0], v[1]), Complex::new(v[2], v[3])],
                    [Complex::new(v[4], v[5]), Complex::new(v[6], v[7])],
                ]);
                return Ok(GateKind::u2(m)?);
            }
            other => return Err(CliError::Parse(format!("unknown gate '{other}'"))),
        };
        self.expect_params(&[])?;
        Ok(kind)
    }

    pub fn to_op(&self) -> Result<CircuitOp, CliError> {
        let base = self.base_kind()?;
        let Some(controls) = &self.controls else {
            return Ok(CircuitOp::new(base, self.targets.clone()));
        };
        if base.n_qubits() != 1 || self.targets.len() != 1 {
            return Err(CliError::Parse(format!(
                "controls apply to single-qubit gates with one target, not {}",
                self.gate
            )));
        }
        if controls.qubits.len() != controls.values.len() {
            return Err(CliError::Parse("control qubits and values differ in length".into()));
        }
        let kind = match controls.values[..] {
            [v] => GateKind::cu(base, v)?,
            [v0, v1] => GateKind::c2u(base, [v0, v1])?,
            _ => {
                return Err(CliError::Parse(format!(
                    "{} controls given; one or two are supported",
                    controls.qubits.len()
                )))
            }
        };
        let mut targets = self.targets.clone();
        targets.extend(&controls.qubits);
        Ok(CircuitOp::new(kind, targets))
    }
}

impl CircuitDocument {
    pub fn from_circuit(c: &Circuit) -> Self {
        Self {
            version: SCHEMA_VERSION,
            n_qubits: c.n_qubits(),
            ops: c.ops().iter().map(OpDocument::from_op).collect(),
        }
    }

    pub fn to_circuit(&self) -> Result<Circuit, CliError> {
        if self.version != SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "unsupported circuit version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        let ops = self.ops.iter().map(OpDocument::to_op).collect::<Result<Vec<_>, _>>()?;
        Ok(Circuit::from_ops(self.n_qubits, ops)?)
    }

    pub fn parse(text: &str) -> Result<Circuit, CliError> {
        let doc: Self = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("circuit: {e}")))?;
        doc.to_circuit()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub n_qubits: usize,
    pub amps: Vec<[f64; 2]>,
}

impl StateDocument {
    pub fn from_state(s: &StateVector) -> Self {
        Self {
            n_qubits: s.n_qubits(),
            amps: s.amps().iter().map(|z| [round_sig(z.re), round_sig(z.im)]).collect(),
        }
    }

    pub fn to_state(&self) -> Result<StateVector, CliError> {
        let state = StateVector::new(self.amps.iter().map(|[re, im]| Complex::new(*re, *im)).collect())?;
        if state.n_qubits() != self.n_qubits {
            return Err(CliError::Parse(format!(
                "{} amplitudes do not describe {} qubits",
                self.amps.len(),
                self.n_qubits
            )));
        }
        Ok(state)
    }

    /// JSON with one `[re, im]` pair per line.
    pub fn to_json(&self) -> String {
        let amps: Vec<String> = self
            .amps
            .iter()
            .map(|pair| format!("    {}", serde_json::to_string(pair).expect("numbers serialize")))
            .collect();
        format!("{{\n  \"n_qubits\": {},\n  \"amps\": [\n{}\n  ]\n}}\n", self.n_qubits, amps.join(",\n"))
    }

    pub fn parse(text: &str) -> Result<StateVector, CliError> {
        let doc: Self = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("state: {e}")))?;
        doc.to_state()
    }
}

/// Rounds to 15 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub residual: f64,
    pub global_phase: f64,
    pub bound: f64,
    pub within_bound: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdos_core::synth::{synth_2q_unitary, synth_c2u, synth_state};
    use qdos_core::gates::gate_matrix;

    #[test]
    fn gates_round_trip() {
        let mut c = Circuit::new(3).unwrap();
        c.add(GateKind::phase(0.25), [0]).unwrap();
        c.add(GateKind::ry(-1.5), [2]).unwrap();
        c.add(GateKind::CnotRBar, [2, 0]).unwrap();
        c.add(GateKind::cphase(1.0), [0, 2]).unwrap();
        c.add(GateKind::c2phase(2.0), [0, 1, 2]).unwrap();
        c.add(GateKind::cu(GateKind::H, 0).unwrap(), [1, 2]).unwrap();
        c.add(GateKind::c2u(GateKind::PauliY, [1, 0]).unwrap(), [2, 0, 1]).unwrap();
        c.add(GateKind::Toffoli, [1, 0, 2]).unwrap();
        let text = serde_json::to_string(&CircuitDocument::from_circuit(&c)).unwrap();
        assert_eq!(CircuitDocument::parse(&text).unwrap(), c);
    }

    #[test]
    fn synthesized_circuits_round_trip() {
        let not = gate_matrix(&GateKind::Not).unwrap();
        let swap = gate_matrix(&GateKind::Swap).unwrap();
        let state = StateVector::new(vec![
            Complex::new(0.5, 0.0),
            Complex::new(0.0, 0.5),
            Complex::new(-0.5, 0.0),
            Complex::new(0.0, -0.5),
        ])
        .unwrap();
        for c in [
            synth_c2u(&not).unwrap().circuit,
            synth_2q_unitary(&swap).unwrap().circuit,
            synth_state(&state).unwrap().circuit,
        ] {
            let text = serde_json::to_string_pretty(&CircuitDocument::from_circuit(&c)).unwrap();
            assert_eq!(CircuitDocument::parse(&text).unwrap(), c);
        }
    }

    #[test]
    fn schema_errors() {
        let bad = [
            r#"{"version":2,"n_qubits":1,"ops":[]}"#,
            r#"{"version":1,"n_qubits":1,"ops":[{"gate":"FOO","targets":[0]}]}"#,
            r#"{"version":1,"n_qubits":1,"ops":[{"gate":"PHASE","targets":[0]}]}"#,
            r#"{"version":1,"n_qubits":1,"ops":[{"gate":"H","targets":[0],"params":{"delta":1}}]}"#,
            r#"{"version":1,"n_qubits":1,"ops":[{"gate":"H","targets":[1]}]}"#,
            r#"{"version":1,"n_qubits":2,"ops":[{"gate":"CNOT","targets":[0],"controls":{"qubits":[1],"values":[1]}}]}"#,
            r#"{"version":1,"n_qubits":1,"ops":[],"extra":true}"#,
        ];
        for text in bad {
            assert_eq!(CircuitDocument::parse(text).unwrap_err().exit_code(), 2, "{text}");
        }
    }

    #[test]
    fn fifteen_digits() {
        assert_eq!(round_sig(std::f64::consts::FRAC_1_SQRT_2), 0.707106781186548);
        assert_eq!(round_sig(1.0), 1.0);
    }
}
