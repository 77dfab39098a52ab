//! Parameterized circuits and their text description format.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::pauli::PauliString;

pub const MAX_WIRES: usize = 12;

/// An ordered gate sequence over `n_wires` wires with `n_params` rotation
/// parameters. Each parameter index in `[0, n_params)` belongs to exactly
/// one rotation gate, so single-parameter shift rules apply verbatim.
#[derive(Debug, Clone)]
pub struct Circuit {
    n_wires: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_wires: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_wires == 0 || n_wires > MAX_WIRES {
            return Err(Error::BadWireCount(n_wires));
        }
        let mut param_uses: Vec<usize> = Vec::new();
        for gate in &gates {
            match gate {
                Gate::Rotation {
                    generator,
                    param_index,
                } => {
                    if generator.n_wires() != n_wires {
                        return Err(Error::PauliLength {
                            expected: n_wires,
                            got: generator.n_wires(),
                        });
                    }
                    if param_uses.len() <= *param_index {
                        param_uses.resize(*param_index + 1, 0);
                    }
                    param_uses[*param_index] += 1;
                }
                _ => {
                    for wire in gate.wires() {
                        if wire >= n_wires {
                            return Err(Error::WireOutOfRange { wire, n_wires });
                        }
                    }
                }
            }
        }
        for (idx, &uses) in param_uses.iter().enumerate() {
            if uses != 1 {
                return Err(Error::ParamIndexCoverage(idx));
            }
        }
        Ok(Self {
            n_wires,
            n_params: param_uses.len(),
            gates,
        })
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::ParamCount {
                expected: self.n_params,
                got: params.len(),
            });
        }
        Ok(())
    }

    /// Serialize to the one-gate-per-line text format. `Circuit::from_text`
    /// round-trips it exactly.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parse the text format:
    ///
    /// ```text
    /// wires 5
    /// rot XIIII 0        # rotation generator and parameter index
    /// cnot 0 1
    /// h 2
    /// unitary 0,1 <re> <im> ... (row-major, 4^k numbers for k wires)
    /// ```
    ///
    /// Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_wires: Option<usize> = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tok = content.split_whitespace();
            let head = tok.next().unwrap();
            let parse_usize = |s: Option<&str>, what: &str| -> Result<usize> {
                s.and_then(|v| v.parse().ok()).ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("expected {what}"),
                })
            };
            match head {
                "wires" => {
                    n_wires = Some(parse_usize(tok.next(), "wire count")?);
                }
                "rot" => {
                    let gen = tok.next().ok_or_else(|| Error::Parse {
                        line,
                        msg: "expected generator string".into(),
                    })?;
                    let generator: PauliString = gen.parse().map_err(|_| Error::Parse {
                        line,
                        msg: format!("invalid generator '{gen}'"),
                    })?;
                    let param_index = parse_usize(tok.next(), "parameter index")?;
                    gates.push(Gate::Rotation {
                        generator,
                        param_index,
                    });
                }
                "cnot" => {
                    let control = parse_usize(tok.next(), "control wire")?;
                    let target = parse_usize(tok.next(), "target wire")?;
                    gates.push(Gate::Cnot { control, target });
                }
                "h" => {
                    let wire = parse_usize(tok.next(), "wire")?;
                    gates.push(Gate::Hadamard { wire });
                }
                "unitary" => {
                    let wires_tok = tok.next().ok_or_else(|| Error::Parse {
                        line,
                        msg: "expected wire list".into(),
                    })?;
                    let wires: Vec<usize> = wires_tok
                        .split(',')
                        .map(|w| {
                            w.parse().map_err(|_| Error::Parse {
                                line,
                                msg: format!("invalid wire '{w}'"),
                            })
                        })
                        .collect::<Result<_>>()?;
                    let nums: Vec<f64> = tok
                        .map(|v| {
                            v.parse().map_err(|_| Error::Parse {
                                line,
                                msg: format!("invalid number '{v}'"),
                            })
                        })
                        .collect::<Result<_>>()?;
                    let dim = 1usize << wires.len();
                    if nums.len() != 2 * dim * dim {
                        return Err(Error::Parse {
                            line,
                            msg: format!(
                                "unitary on {} wires needs {} numbers, got {}",
                                wires.len(),
                                2 * dim * dim,
                                nums.len()
                            ),
                        });
                    }
                    let matrix = nums
                        .chunks(2)
                        .map(|c| Complex64::new(c[0], c[1]))
                        .collect();
                    gates.push(Gate::unitary(matrix, wires)?);
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown entry '{other}'"),
                    });
                }
            }
        }
        let n_wires = n_wires.ok_or(Error::Parse {
            line: 0,
            msg: "missing 'wires' entry".into(),
        })?;
        Circuit::new(n_wires, gates)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wires {}", self.n_wires)?;
        for gate in &self.gates {
            match gate {
                Gate::Rotation {
                    generator,
                    param_index,
                } => writeln!(f, "rot {generator} {param_index}")?,
                Gate::Cnot { control, target } => writeln!(f, "cnot {control} {target}")?,
                Gate::Hadamard { wire } => writeln!(f, "h {wire}")?,
                Gate::Unitary { matrix, wires } => {
                    let wires_s: Vec<String> = wires.iter().map(|w| w.to_string()).collect();
                    write!(f, "unitary {}", wires_s.join(","))?;
                    for z in matrix {
                        write!(f, " {} {}", z.re, z.im)?;
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}
