use serde::Serialize;

use super::{Axiom, Theory, METAVARIABLES};
use crate::formula::{PropFormula, Substitution};
use crate::kripke::{KripkeError, Model};
use crate::pool::{pool_closure, PoolEntry};

/// Failures listed per scheme; the count is always exact.
pub const MAX_REPORTED: usize = 16;

/// Which substitution instances of the S4, S4.2 and S5 schemes hold on a
/// model, with instances drawn from one representative per extension.
#[derive(Clone, Debug, Serialize)]
pub struct FingerprintReport {
    pub pool: Vec<String>,
    pub depth: usize,
    /// Distinct extensions generated from the pool.
    pub representatives: usize,
    pub schemes: Vec<SchemeReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemeReport {
    pub axiom: String,
    pub scheme: String,
    pub instances: usize,
    pub valid: usize,
    pub failures: Vec<InstanceFailure>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct InstanceFailure {
    pub instance: String,
    pub worlds: Vec<String>,
}

impl SchemeReport {
    pub fn all_valid(&self) -> bool {
        self.valid == self.instances
    }
}

impl FingerprintReport {
    pub fn scheme(&self, a: Axiom) -> &SchemeReport {
        self.schemes
            .iter()
            .find(|s| s.axiom == a.name())
            .expect("every scheme is reported")
    }

    /// True when every instance of every axiom of `t` holds everywhere.
    pub fn validates(&self, t: Theory) -> bool {
        t.axioms().into_iter().all(|a| self.scheme(a).all_valid())
    }
}

pub fn logic_fingerprint(
    m: &Model,
    pool: &[PropFormula],
    depth: usize,
) -> Result<FingerprintReport, KripkeError> {
    let entries = pool_closure(m, pool, depth)?;
    let schemes = Axiom::ALL
        .iter()
        .map(|&a| scheme_report(m, a, &entries))
        .collect();
    Ok(FingerprintReport {
        pool: pool.iter().map(PropFormula::render).collect(),
        depth,
        representatives: entries.len(),
        schemes,
    })
}

pub(crate) fn scheme_report(m: &Model, a: Axiom, entries: &[PoolEntry]) -> SchemeReport {
    let scheme = a.scheme();
    let binary = scheme.atoms().contains(METAVARIABLES[1]);
    let mut report = SchemeReport {
        axiom: a.name().to_string(),
        scheme: scheme.render(),
        instances: 0,
        valid: 0,
        failures: Vec::new(),
    };
    let seconds: Vec<Option<&PoolEntry>> = if binary {
        entries.iter().map(Some).collect()
    } else {
        vec![None]
    };
    for phi in entries {
        for psi in &seconds {
            let ext = m.frame().extension_with(&scheme, &mut |v| {
                if v == METAVARIABLES[0] {
                    phi.ext.clone()
                } else {
                    psi.expect("binary scheme").ext.clone()
                }
            });
            report.instances += 1;
            if ext.count_ones(..) == m.len() {
                report.valid += 1;
                continue;
            }
            if report.failures.len() < MAX_REPORTED {
                let mut s = Substitution::new();
                s.insert(METAVARIABLES[0], phi.formula.clone());
                if let Some(psi) = psi {
                    s.insert(METAVARIABLES[1], psi.formula.clone());
                }
                let worlds = (0..m.len())
                    .filter(|&i| !ext.contains(i))
                    .map(|i| m.world_id(i).to_string())
                    .collect();
                report.failures.push(InstanceFailure {
                    instance: scheme.substitute(&s).render(),
                    worlds,
                });
            }
        }
    }
    report
}
