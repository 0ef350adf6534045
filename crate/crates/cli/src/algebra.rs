//! The `--algebra` grammar: `diag`, `pauli:Q`, `block:SPEC` or `custom:FILE`.

use std::path::PathBuf;
use std::str::FromStr;

use bmin_core::{BlockPattern, SubalgebraBasis};

use crate::docs::AlgebraDocument;
use crate::{read_json, CliError};

#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraSpec {
    Diag,
    Pauli(usize),
    Block(BlockPattern),
    Custom(PathBuf),
}

impl FromStr for AlgebraSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("diag", None) => Ok(AlgebraSpec::Diag),
            ("pauli", Some(q)) => q
                .parse()
                .map(AlgebraSpec::Pauli)
                .map_err(|_| format!("bad qubit count `{q}`")),
            ("block", Some(spec)) => spec.parse().map(AlgebraSpec::Block).map_err(|e| e.to_string()),
            ("custom", Some(path)) if !path.is_empty() => Ok(AlgebraSpec::Custom(PathBuf::from(path))),
            _ => Err(format!("unknown algebra `{s}`; expected diag | pauli:Q | block:SPEC | custom:FILE")),
        }
    }
}

impl AlgebraSpec {
    /// Builds the basis and checks that it acts on `C^n`.
    pub fn resolve(&self, n: usize) -> Result<SubalgebraBasis, CliError> {
        let basis = match self {
            AlgebraSpec::Diag => SubalgebraBasis::diagonal(n),
            AlgebraSpec::Pauli(q) => {
                if *q >= usize::BITS as usize || 1usize << q != n {
                    return Err(CliError::Usage(format!("pauli:{q} acts on C^(2^{q}), matrix is {n} x {n}")));
                }
                SubalgebraBasis::pauli_diagonal(*q)
            }
            AlgebraSpec::Block(p) => SubalgebraBasis::block(p),
            AlgebraSpec::Custom(path) => read_json::<AlgebraDocument>(path)?.resolve()?,
        };
        if basis.n() != n {
            return Err(CliError::Usage(format!("algebra acts on C^{}, matrix is {n} x {n}", basis.n())));
        }
        if matches!(self, AlgebraSpec::Custom(_)) && !basis.verify_closed(1e-8) {
            log::warn!("custom basis does not span a *-algebra");
        }
        Ok(basis)
    }
}
