use std::path::PathBuf;

use ltlab::fgl::FglError;
use ltlab::lubin_tate::LtError;
use ltlab::ring::is_prime;
use ltlab::stabilizer::StabError;
use ltlab::verdicts::VerdictError;
use ltlab::Error;

pub const MAX_P: u64 = 13;
pub const MAX_J: u32 = 4;
pub const MAX_N_DEGREE: usize = 200;
pub const MAX_TRIALS: usize = 10_000;

/// Which height limit applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    /// Arithmetic in the endomorphism ring: `n <= 3`.
    Ring,
    /// Anything that runs the deformation solver: `n <= 2`.
    Solver,
    /// Closed-form rules.
    Rule,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub p: u64,
    pub n: u32,
    pub k: u32,
    pub j: u32,
    pub big_n: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub emit_fixture: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self, class: Class) -> Result<(), String> {
        if !is_prime(self.p) || self.p > MAX_P {
            return Err(format!("--p must be a prime at most {MAX_P}, got {}", self.p));
        }
        if self.n == 0 {
            return Err("--n must be positive".into());
        }
        let max_n = match class {
            Class::Ring => 3,
            Class::Solver => 2,
            Class::Rule => u32::MAX,
        };
        if self.n > max_n {
            return Err(format!("--n must be at most {max_n} for this command, got {}", self.n));
        }
        if self.k == 0 {
            return Err("--k must be positive".into());
        }
        if class == Class::Solver {
            if self.p == 2 {
                return Err("the deformation solver needs an odd prime".into());
            }
            if !(2..=MAX_J).contains(&self.j) {
                return Err(format!("--j must lie in 2..={MAX_J}, got {}", self.j));
            }
            if self.k < self.j + 1 {
                return Err(format!("--k must be at least j + 1 = {}, got {}", self.j + 1, self.k));
            }
        } else if !(1..=MAX_J).contains(&self.j) {
            return Err(format!("--j must lie in 1..={MAX_J}, got {}", self.j));
        }
        if let Some(big_n) = self.big_n {
            if big_n > MAX_N_DEGREE {
                return Err(format!("--N must be at most {MAX_N_DEGREE}, got {big_n}"));
            }
        }
        if self.trials == 0 || self.trials > MAX_TRIALS {
            return Err(format!("--trials must lie in 1..={MAX_TRIALS}, got {}", self.trials));
        }
        Ok(())
    }
}

/// Failures of a post-check inside the library, as opposed to bad input.
pub fn is_internal(e: &Error) -> bool {
    match e {
        Error::Fgl(f) => fgl_internal(f),
        Error::Stab(s) => stab_internal(s),
        Error::Lt(l) => lt_internal(l),
        Error::Verdict(v) => match v {
            VerdictError::Lt(l) => lt_internal(l),
            VerdictError::Stab(s) => stab_internal(s),
            _ => false,
        },
        Error::Arith(_) | Error::Parse(_) | Error::Series(_) => false,
    }
}

fn fgl_internal(e: &FglError) -> bool {
    matches!(e, FglError::IntegralityFailure(_) | FglError::PostCheckFailure(_) | FglError::AxiomFailure(_))
}

fn stab_internal(e: &StabError) -> bool {
    match e {
        StabError::DetPostCheck(_) | StabError::NotAnEndomorphism | StabError::ThetaNotPrincipal(_) => true,
        StabError::Fgl(f) => fgl_internal(f),
        _ => false,
    }
}

fn lt_internal(e: &LtError) -> bool {
    match e {
        LtError::SolverStuck { .. }
        | LtError::Underdetermined { .. }
        | LtError::PostCheck(_)
        | LtError::ResidueNotExpressible { .. } => true,
        LtError::Stab(s) => stab_internal(s),
        LtError::Fgl(f) => fgl_internal(f),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig { p: 3, n: 2, k: 4, j: 3, big_n: None, seed: 0, trials: 10, emit_fixture: None }
    }

    #[test]
    fn ranges() {
        assert!(cfg().validate(Class::Solver).is_ok());
        assert!(RunConfig { p: 17, ..cfg() }.validate(Class::Rule).is_err());
        assert!(RunConfig { p: 9, ..cfg() }.validate(Class::Rule).is_err());
        assert!(RunConfig { n: 3, ..cfg() }.validate(Class::Ring).is_ok());
        assert!(RunConfig { n: 3, ..cfg() }.validate(Class::Solver).is_err());
        assert!(RunConfig { n: 4, ..cfg() }.validate(Class::Ring).is_err());
        assert!(RunConfig { j: 5, ..cfg() }.validate(Class::Ring).is_err());
        assert!(RunConfig { k: 3, ..cfg() }.validate(Class::Solver).is_err());
        assert!(RunConfig { big_n: Some(201), ..cfg() }.validate(Class::Solver).is_err());
        assert!(RunConfig { trials: 0, ..cfg() }.validate(Class::Solver).is_err());
    }

    #[test]
    fn internal_errors() {
        assert!(is_internal(&Error::Lt(LtError::PostCheck("x".into()))));
        assert!(is_internal(&Error::Verdict(VerdictError::Lt(LtError::SolverStuck { layer: 1 }))));
        assert!(!is_internal(&Error::Lt(LtError::NotAUnit)));
        assert!(!is_internal(&Error::Verdict(VerdictError::NotPrime(4))));
    }
}
