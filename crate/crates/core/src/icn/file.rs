//! Genome file format:
//!
//! ```text
//! icn-genome v1
//! 0100000000000000001001100000000
//! ctx kind=alldifferent n=4 d=5 p=0 lo=1
//! # Count>0( count_eq_right )
//! ```
//!
//! `kind=` is optional; when present, evaluation refuses spaces of another kind.

use super::genome::Genome;
use super::network::{describe, ErrorFunction, EvalContext};
use crate::concepts::{ConstraintInstance, ConstraintKind};
use crate::error::{Error, Result};

const MAGIC: &str = "icn-genome v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenomeFile {
    pub genome: Genome,
    pub ctx: EvalContext,
    pub kind: Option<ConstraintKind>,
}

impl GenomeFile {
    pub fn for_constraint(genome: Genome, c: &ConstraintInstance) -> Self {
        GenomeFile {
            genome,
            ctx: EvalContext::of(c),
            kind: Some(c.kind()),
        }
    }

    pub fn function(&self) -> Result<ErrorFunction> {
        ErrorFunction::new(self.genome, self.ctx)
    }

    pub fn to_text(&self) -> String {
        let kind = self.kind.map(|k| format!("kind={k} ")).unwrap_or_default();
        format!(
            "{MAGIC}\n{}\nctx {kind}n={} d={} p={} lo={}\n# {}\n",
            self.genome.to_bit_string(),
            self.ctx.n,
            self.ctx.d,
            self.ctx.p,
            self.ctx.lo,
            describe(self.genome)
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        if lines.first() != Some(&MAGIC) {
            return Err(perr(1, format!("expected `{MAGIC}`")));
        }
        let bits = lines
            .get(1)
            .ok_or_else(|| perr(2, "missing genome bits".into()))?;
        let genome = Genome::from_bit_string(bits).map_err(|e| perr(2, e.to_string()))?;
        let ctx_line = lines
            .get(2)
            .and_then(|l| l.strip_prefix("ctx "))
            .ok_or_else(|| perr(3, "expected `ctx ...`".into()))?;
        let (mut n, mut d, mut p, mut lo, mut kind) = (None, None, None, None, None);
        for tok in ctx_line.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| perr(3, format!("expected key=value, got `{tok}`")))?;
            let bad = || perr(3, format!("bad value for `{k}`: `{v}`"));
            match k {
                "kind" => kind = Some(v.parse::<ConstraintKind>().map_err(|_| bad())?),
                "n" => n = Some(v.parse::<usize>().map_err(|_| bad())?),
                "d" => d = Some(v.parse::<u64>().map_err(|_| bad())?),
                "p" => p = Some(v.parse::<i64>().map_err(|_| bad())?),
                "lo" => lo = Some(v.parse::<i64>().map_err(|_| bad())?),
                _ => return Err(perr(3, format!("unknown key `{k}`"))),
            }
        }
        let missing = |k: &str| perr(3, format!("missing `{k}`"));
        let ctx = EvalContext {
            n: n.ok_or_else(|| missing("n"))?,
            d: d.ok_or_else(|| missing("d"))?,
            p: p.ok_or_else(|| missing("p"))?,
            lo: lo.ok_or_else(|| missing("lo"))?,
        };
        match lines.get(3) {
            Some(l) if l.starts_with("# ") => {}
            _ => return Err(perr(4, "expected `# <description>`".into())),
        }
        if lines.len() > 4 {
            return Err(perr(5, "unexpected trailing content".into()));
        }
        let file = GenomeFile { genome, ctx, kind };
        if file.to_text() != text {
            return Err(perr(4, "description does not match the genome".into()));
        }
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::icn::ops::{Aggregation, Arithmetic, Comparison, Transformation};

    #[test]
    fn round_trip_is_bit_exact() {
        let c = ConstraintInstance::new(ConstraintKind::AllDifferent, 4, 1, 5, 0).unwrap();
        let g = Genome::from_ops(
            &[Transformation::CountEqRight],
            Arithmetic::Add,
            Aggregation::CountPositive,
            Comparison::Identity,
        );
        let file = GenomeFile::for_constraint(g, &c);
        let text = file.to_text();
        assert_eq!(
            text,
            "icn-genome v1\n0100000000000000001001100000000\n\
             ctx kind=alldifferent n=4 d=5 p=0 lo=1\n# Count>0( count_eq_right )\n"
        );
        let back = GenomeFile::from_text(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_text(), text);

        let anonymous = GenomeFile { kind: None, ..file };
        assert_eq!(
            GenomeFile::from_text(&anonymous.to_text()).unwrap(),
            anonymous
        );
    }

    #[test]
    fn rejects_tampering() {
        let c = ConstraintInstance::new(ConstraintKind::Minimum, 4, 1, 5, 3).unwrap();
        let g = Genome::from_ops(
            &[Transformation::LtParam],
            Arithmetic::Add,
            Aggregation::Sum,
            Comparison::Identity,
        );
        let text = GenomeFile::for_constraint(g, &c).to_text();
        assert!(GenomeFile::from_text(&text.replace("Sum", "Count>0")).is_err());
        assert!(GenomeFile::from_text(&text.replace("icn-genome v1", "icn-genome v2")).is_err());
        assert!(GenomeFile::from_text(&text.replace("n=4", "n=x")).is_err());
    }
}
