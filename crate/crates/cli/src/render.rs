//! Text and JSON renderings of machine and reducer results.

use qlam_core::quantum_state::format_amplitude;
use qlam_core::{Amplitude, DensityMatrix, RegisterState, Superposition, Term, Violation};
use serde::Serialize;

#[derive(Serialize)]
pub struct Branch {
    pub amp_re: f64,
    pub amp_im: f64,
    pub register: String,
    /// Only present when the branches do not share one history.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub history: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct StateReport {
    pub status: String,
    pub steps: usize,
    pub history: Vec<String>,
    pub branches: Vec<Branch>,
}

#[derive(Serialize)]
pub struct DensityReport {
    pub labels: Vec<String>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Serialize)]
pub struct ViolationReport {
    pub path: String,
    pub kind: String,
    pub binder: String,
}

#[derive(Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub violations: Vec<ViolationReport>,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub status: String,
    pub steps: usize,
    pub agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<String>,
}

fn branch(amp: &Amplitude, register: &Term, history: Option<Vec<String>>) -> Branch {
    Branch {
        amp_re: clean(amp.re),
        amp_im: clean(amp.im),
        register: register.to_string(),
        history,
    }
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub fn machine_state(status: &str, steps: usize, state: &Superposition) -> StateReport {
    match state.factor_history() {
        Ok((history, reg)) => StateReport {
            status: status.into(),
            steps,
            history: history.frames().iter().map(Term::to_string).collect(),
            branches: reg.branches().map(|(t, a)| branch(a, t, None)).collect(),
        },
        Err(_) => StateReport {
            status: status.into(),
            steps,
            history: Vec::new(),
            branches: state
                .branches()
                .map(|(c, a)| {
                    let frames = c.history.frames().iter().map(Term::to_string).collect();
                    branch(a, &c.register, Some(frames))
                })
                .collect(),
        },
    }
}

pub fn register_state(status: &str, steps: usize, state: &RegisterState) -> StateReport {
    StateReport {
        status: status.into(),
        steps,
        history: Vec::new(),
        branches: state.branches().map(|(t, a)| branch(a, t, None)).collect(),
    }
}

impl StateReport {
    pub fn text(&self) -> String {
        let mut out = format!("status: {}\nsteps: {}\n", self.status, self.steps);
        if !self.history.is_empty() {
            out += &format!("history: {}\n", self.history.join(" ; "));
        }
        for b in &self.branches {
            let amp = format_amplitude(Amplitude::new(b.amp_re, b.amp_im));
            match &b.history {
                Some(h) if !h.is_empty() => out += &format!("{amp}  {} ; {}\n", h.join(" ; "), b.register),
                _ => out += &format!("{amp}  {}\n", b.register),
            }
        }
        out
    }
}

pub fn density(rho: &DensityMatrix) -> DensityReport {
    let rows = |f: fn(&Amplitude) -> f64| {
        rho.matrix
            .row_iter()
            .map(|row| row.iter().map(|a| clean(f(a))).collect())
            .collect()
    };
    DensityReport {
        labels: rho.labels.iter().map(Term::to_string).collect(),
        re: rows(|a| a.re),
        im: rows(|a| a.im),
    }
}

impl DensityReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        for (i, label) in self.labels.iter().enumerate() {
            out += &format!("[{i}] {label}\n");
        }
        for (re, im) in self.re.iter().zip(&self.im) {
            let cells: Vec<String> = re
                .iter()
                .zip(im)
                .map(|(&r, &i)| format_amplitude(Amplitude::new(r, i)))
                .collect();
            out += &cells.join(" ");
            out.push('\n');
        }
        out
    }
}

pub fn violations(vs: &[Violation]) -> CheckReport {
    CheckReport {
        ok: vs.is_empty(),
        violations: vs
            .iter()
            .map(|v| ViolationReport {
                path: v.path.to_string(),
                kind: v.kind.to_string(),
                binder: v.binder.clone(),
            })
            .collect(),
    }
}

/// One line per trace step: the register branches, without the history.
pub fn trace_state(state: &Superposition) -> String {
    state
        .branches()
        .map(|(c, a)| format!("{} {}", format_amplitude(*a), c.register))
        .collect::<Vec<_>>()
        .join(" + ")
}
