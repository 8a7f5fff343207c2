//! Deterministic reports: fixed field order, every number printed with
//! exactly 12 significant digits, plain text by default and a structured
//! JSON mirror behind the same formatting (numbers stay 12-digit strings
//! there so infinities and byte-stability survive the trip).

use crate::bounds::{BoundCertificate, BoundKind, ClosedFormBounds};
use crate::func::VertexFunction;
use crate::solve::EigenPair;
use crate::tree::{Measure, RootedTree};

/// Format with exactly 12 significant digits: positional when the decimal
/// exponent lies in [-4, 12), scientific otherwise, `inf` for infinities.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x == f64::INFINITY {
        return "inf".into();
    }
    if x == f64::NEG_INFINITY {
        return "-inf".into();
    }
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp_str) = sci.split_once('e').unwrap();
    let exp: i32 = exp_str.parse().unwrap();
    if !(-4..12).contains(&exp) {
        return format!("{mantissa}e{exp}");
    }
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);
    let sign = if neg { "-" } else { "" };
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    } else {
        let split = exp as usize + 1;
        if split >= digits.len() {
            format!("{sign}{digits}")
        } else {
            format!("{sign}{}.{}", &digits[..split], &digits[split..])
        }
    }
}

fn fmt_function(f: &VertexFunction) -> String {
    f.values()
        .iter()
        .enumerate()
        .map(|(v, &x)| format!("{v}={}", fmt_sig(x)))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Partial,
    Failed,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Partial => "partial",
            Status::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TreeSummary {
    pub vertices: usize,
    pub max_layer: usize,
    pub total_measure: f64,
}

impl TreeSummary {
    pub fn new(tree: &RootedTree, measure: &Measure) -> Self {
        TreeSummary {
            vertices: tree.vertex_count(),
            max_layer: tree.max_layer(),
            total_measure: measure.total(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExactSummary {
    pub lambda0: f64,
    pub residual: f64,
    pub monotone: bool,
    pub eigenfunction: VertexFunction,
}

impl ExactSummary {
    pub fn new(tree: &RootedTree, pair: &EigenPair) -> Self {
        let monotone = (1..tree.vertex_count())
            .all(|v| pair.g.get(v) > pair.g.get(tree.parent(v).unwrap()));
        ExactSummary {
            lambda0: pair.lambda0,
            residual: pair.residual,
            monotone,
            eigenfunction: pair.g.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClosedFormSummary {
    pub delta: f64,
    pub sup_c: i64,
    pub lower: f64,
    pub upper: f64,
    pub argmax_delta: usize,
}

impl From<&ClosedFormBounds> for ClosedFormSummary {
    fn from(cf: &ClosedFormBounds) -> Self {
        ClosedFormSummary {
            delta: cf.delta,
            sup_c: cf.sup_c,
            lower: cf.lower,
            upper: cf.upper,
            argmax_delta: cf.argmax_delta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DomainCheckSummary {
    pub family: String,
    pub cutoff: Option<usize>,
    pub passed: bool,
    pub violation: Option<(usize, String)>,
}

/// Everything a subcommand reports. Fields render in declaration order;
/// absent options are simply not printed.
#[derive(Debug, Clone)]
pub struct Report {
    pub tree: TreeSummary,
    pub status: Status,
    pub messages: Vec<String>,
    pub exact: Option<ExactSummary>,
    pub closed_form: Option<ClosedFormSummary>,
    pub delta_path_indicator: Option<f64>,
    pub domain_check: Option<DomainCheckSummary>,
    pub certificates: Vec<BoundCertificate>,
    pub approx: Vec<(usize, f64)>,
}

impl Report {
    pub fn new(tree: &RootedTree, measure: &Measure) -> Self {
        Report {
            tree: TreeSummary::new(tree, measure),
            status: Status::Ok,
            messages: Vec::new(),
            exact: None,
            closed_form: None,
            delta_path_indicator: None,
            domain_check: None,
            certificates: Vec::new(),
            approx: Vec::new(),
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "tree: vertices={} max_layer={} total_measure={}\n",
            self.tree.vertices,
            self.tree.max_layer,
            fmt_sig(self.tree.total_measure)
        ));
        out.push_str(&format!("status: {}\n", self.status.name()));
        for msg in &self.messages {
            out.push_str(&format!("message: {msg}\n"));
        }
        if let Some(exact) = &self.exact {
            out.push_str(&format!(
                "exact: lambda0={} residual={} monotone={}\n",
                fmt_sig(exact.lambda0),
                fmt_sig(exact.residual),
                exact.monotone
            ));
            out.push_str(&format!("eigenfunction: {}\n", fmt_function(&exact.eigenfunction)));
        }
        if let Some(cf) = &self.closed_form {
            out.push_str(&format!(
                "closed_form: delta={} sup_c={} lower={} upper={} argmax_delta={}\n",
                fmt_sig(cf.delta),
                cf.sup_c,
                fmt_sig(cf.lower),
                fmt_sig(cf.upper),
                cf.argmax_delta
            ));
        }
        if let Some(d) = self.delta_path_indicator {
            out.push_str(&format!("delta_path_indicator: {}\n", fmt_sig(d)));
        }
        if let Some(dc) = &self.domain_check {
            let cutoff = dc.cutoff.map_or("-".to_string(), |c| c.to_string());
            out.push_str(&format!(
                "domain_check: family={} cutoff={} passed={}\n",
                dc.family, cutoff, dc.passed
            ));
            if let Some((vertex, condition)) = &dc.violation {
                out.push_str(&format!(
                    "domain_violation: vertex={vertex} condition={condition}\n"
                ));
            }
        }
        for cert in &self.certificates {
            let kind = match cert.kind {
                BoundKind::Lower => "lower",
                BoundKind::Upper => "upper",
            };
            let cutoff = cert.tag.cutoff.map_or("-".to_string(), |c| c.to_string());
            out.push_str(&format!(
                "certificate: kind={} family={} cutoff={} value={} vertex={}\n",
                kind,
                cert.tag.family,
                cutoff,
                fmt_sig(cert.value),
                cert.extremal_vertex
            ));
            out.push_str(&format!("witness: {}\n", fmt_function(&cert.witness)));
            let evals = cert.per_vertex[1..]
                .iter()
                .enumerate()
                .map(|(i, &x)| format!("{}={}", i + 1, fmt_sig(x)))
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&format!("evals: {evals}\n"));
        }
        for (m, lambda) in &self.approx {
            out.push_str(&format!("approx: m={m} lambda0={}\n", fmt_sig(*lambda)));
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut fields: Vec<String> = Vec::new();
        fields.push(format!(
            "\"tree\":{{\"vertices\":{},\"max_layer\":{},\"total_measure\":\"{}\"}}",
            self.tree.vertices,
            self.tree.max_layer,
            fmt_sig(self.tree.total_measure)
        ));
        fields.push(format!("\"status\":\"{}\"", self.status.name()));
        fields.push(format!(
            "\"messages\":[{}]",
            self.messages
                .iter()
                .map(|m| format!("\"{}\"", json_escape(m)))
                .collect::<Vec<_>>()
                .join(",")
        ));
        if let Some(exact) = &self.exact {
            fields.push(format!(
                "\"exact\":{{\"lambda0\":\"{}\",\"residual\":\"{}\",\"monotone\":{},\"eigenfunction\":{}}}",
                fmt_sig(exact.lambda0),
                fmt_sig(exact.residual),
                exact.monotone,
                json_values(exact.eigenfunction.values())
            ));
        }
        if let Some(cf) = &self.closed_form {
            fields.push(format!(
                "\"closed_form\":{{\"delta\":\"{}\",\"sup_c\":{},\"lower\":\"{}\",\"upper\":\"{}\",\"argmax_delta\":{}}}",
                fmt_sig(cf.delta),
                cf.sup_c,
                fmt_sig(cf.lower),
                fmt_sig(cf.upper),
                cf.argmax_delta
            ));
        }
        if let Some(d) = self.delta_path_indicator {
            fields.push(format!("\"delta_path_indicator\":\"{}\"", fmt_sig(d)));
        }
        if let Some(dc) = &self.domain_check {
            let violation = match &dc.violation {
                Some((vertex, condition)) => format!(
                    ",\"violation\":{{\"vertex\":{vertex},\"condition\":\"{}\"}}",
                    json_escape(condition)
                ),
                None => String::new(),
            };
            let cutoff = dc.cutoff.map_or("null".to_string(), |c| c.to_string());
            fields.push(format!(
                "\"domain_check\":{{\"family\":\"{}\",\"cutoff\":{cutoff},\"passed\":{}{violation}}}",
                dc.family, dc.passed
            ));
        }
        let certs = self
            .certificates
            .iter()
            .map(|cert| {
                let kind = match cert.kind {
                    BoundKind::Lower => "lower",
                    BoundKind::Upper => "upper",
                };
                let cutoff = cert.tag.cutoff.map_or("null".to_string(), |c| c.to_string());
                format!(
                    "{{\"kind\":\"{kind}\",\"family\":\"{}\",\"cutoff\":{cutoff},\"value\":\"{}\",\"vertex\":{},\"witness\":{},\"evals\":{}}}",
                    cert.tag.family,
                    fmt_sig(cert.value),
                    cert.extremal_vertex,
                    json_values(cert.witness.values()),
                    json_values(&cert.per_vertex[1..])
                )
            })
            .collect::<Vec<_>>()
            .join(",");
        fields.push(format!("\"certificates\":[{certs}]"));
        let approx = self
            .approx
            .iter()
            .map(|(m, l)| format!("{{\"m\":{m},\"lambda0\":\"{}\"}}", fmt_sig(*l)))
            .collect::<Vec<_>>()
            .join(",");
        fields.push(format!("\"approx\":[{approx}]"));
        format!("{{{}}}\n", fields.join(","))
    }
}

fn json_values(values: &[f64]) -> String {
    let inner = values
        .iter()
        .map(|&v| format!("\"{}\"", fmt_sig(v)))
        .collect::<Vec<_>>()
        .join(",");
    format!("[{inner}]")
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
