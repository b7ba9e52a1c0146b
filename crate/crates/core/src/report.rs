//! Aggregated verification report and its JSON / CSV forms.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::congruence::{
    congruence_count, paper_a_formula, paper_rank_formula, ExponentMode, HRange, IndexMode,
};
use crate::curve::{enumerate_paper_index_set, CurveParams};
use crate::engine::{cartier_matrix, p_rank_of};
use crate::error::{Error, Result};
use crate::points::{count_points, maximal_count, MAX_FIELD_SIZE};

pub const DEFAULT_GENUS_CAP: u64 = 2000;

/// Agreement and integrality flags of one instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFlags {
    pub hypotheses_hold: bool,
    pub a_equals_g_minus_rank: bool,
    pub rank_matches_cc_honest: bool,
    pub rank_matches_cc_paper: bool,
    pub formula_rank_integral: bool,
    pub formula_a_integral: bool,
    pub rank_matches_formula: bool,
    pub a_matches_formula: bool,
    pub paper_basis_matches_genus: bool,
    /// Hypotheses hold but a closed formula is non-integral or disagrees
    /// with the matrix.
    pub formula_finding: bool,
}

impl ReportFlags {
    const NAMES: [&'static str; 10] = [
        "hypotheses_hold",
        "a_equals_g_minus_rank",
        "rank_matches_cc_honest",
        "rank_matches_cc_paper",
        "formula_rank_integral",
        "formula_a_integral",
        "rank_matches_formula",
        "a_matches_formula",
        "paper_basis_matches_genus",
        "formula_finding",
    ];

    fn values(&self) -> [bool; 10] {
        [
            self.hypotheses_hold,
            self.a_equals_g_minus_rank,
            self.rank_matches_cc_honest,
            self.rank_matches_cc_paper,
            self.formula_rank_integral,
            self.formula_a_integral,
            self.rank_matches_formula,
            self.a_matches_formula,
            self.paper_basis_matches_genus,
            self.formula_finding,
        ]
    }

    /// `;`-joined names of the flags that are set.
    pub fn to_compact(&self) -> String {
        Self::NAMES
            .iter()
            .zip(self.values())
            .filter(|(_, v)| *v)
            .map(|(n, _)| *n)
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn from_compact(text: &str) -> Result<Self> {
        let mut f = ReportFlags::default();
        for name in text.split(';').filter(|s| !s.is_empty()) {
            let slot = match name {
                "hypotheses_hold" => &mut f.hypotheses_hold,
                "a_equals_g_minus_rank" => &mut f.a_equals_g_minus_rank,
                "rank_matches_cc_honest" => &mut f.rank_matches_cc_honest,
                "rank_matches_cc_paper" => &mut f.rank_matches_cc_paper,
                "formula_rank_integral" => &mut f.formula_rank_integral,
                "formula_a_integral" => &mut f.formula_a_integral,
                "rank_matches_formula" => &mut f.rank_matches_formula,
                "a_matches_formula" => &mut f.a_matches_formula,
                "paper_basis_matches_genus" => &mut f.paper_basis_matches_genus,
                "formula_finding" => &mut f.formula_finding,
                other => return Err(Error::Parse(format!("unknown flag {other:?}"))),
            };
            *slot = true;
        }
        Ok(f)
    }
}

/// Field order is part of the output contract.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub p: u64,
    pub s: u32,
    pub m: u64,
    pub n: u64,
    pub q: u64,
    pub g: u64,
    pub matrix_rank: u64,
    pub a_number: u64,
    pub p_rank: u64,
    /// Honest exponents, derived basis, full h-range.
    pub cc_honest: u64,
    /// System as printed, literal index set, half h-range.
    pub cc_paper: u64,
    pub formula_rank_num: i128,
    pub formula_rank_den: i128,
    pub formula_a_num: i128,
    pub formula_a_den: i128,
    pub flags: ReportFlags,
    /// `#X(F_{q^2})`, absent when `q^2` exceeds the brute-force limit.
    pub points_total: Option<u64>,
    pub maximal: Option<bool>,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub genus_cap: u64,
    pub count_points: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            genus_cap: DEFAULT_GENUS_CAP,
            count_points: true,
        }
    }
}

pub fn check_genus_cap(params: &CurveParams, cap: u64) -> Result<()> {
    if params.g > cap {
        return Err(Error::GenusCapExceeded {
            genus: params.g,
            cap,
        });
    }
    Ok(())
}

/// Runs every computation for one parameter set. Disagreements end up in
/// the flags; only internal inconsistencies are errors.
pub fn verify(params: &CurveParams) -> Result<VerificationReport> {
    verify_with(params, VerifyOptions::default())
}

pub fn verify_with(params: &CurveParams, opts: VerifyOptions) -> Result<VerificationReport> {
    check_genus_cap(params, opts.genus_cap)?;
    let mat = cartier_matrix(params)?;
    let matrix_rank = mat.rank() as u64;
    let a_number = params.g - matrix_rank;
    let p_rank = p_rank_of(&mat) as u64;
    let cc_honest = congruence_count(
        params,
        ExponentMode::Honest,
        IndexMode::DerivedBasis,
        HRange::Full,
    )?;
    let cc_paper = congruence_count(
        params,
        ExponentMode::PaperLiteral,
        IndexMode::PaperLiteral,
        HRange::Half,
    )?;
    let formula_a = paper_a_formula(params);
    let formula_rank = paper_rank_formula(params).value;

    let (points_total, maximal) =
        if opts.count_points && (params.q as u128) * (params.q as u128) <= MAX_FIELD_SIZE as u128 {
            let count = count_points(params, 2 * params.s as usize)?;
            let maximal = count.total as u128 == maximal_count(params);
            if maximal && p_rank != 0 {
                return Err(Error::SupersingularityViolation {
                    p_rank: p_rank as usize,
                });
            }
            (Some(count.total), Some(maximal))
        } else {
            (None, None)
        };

    let hypotheses_hold = params.hypotheses.all_hold();
    let rank_matches_formula = formula_rank.equals(matrix_rank);
    let a_matches_formula = formula_a.equals(a_number);
    let flags = ReportFlags {
        hypotheses_hold,
        a_equals_g_minus_rank: a_number + matrix_rank == params.g,
        rank_matches_cc_honest: cc_honest == matrix_rank,
        rank_matches_cc_paper: cc_paper == matrix_rank,
        formula_rank_integral: formula_rank.is_integral(),
        formula_a_integral: formula_a.is_integral(),
        rank_matches_formula,
        a_matches_formula,
        paper_basis_matches_genus: enumerate_paper_index_set(params).len() as u64 == params.g,
        formula_finding: hypotheses_hold && !(rank_matches_formula && a_matches_formula),
    };
    Ok(VerificationReport {
        p: params.p(),
        s: params.s,
        m: params.m,
        n: params.n,
        q: params.q,
        g: params.g,
        matrix_rank,
        a_number,
        p_rank,
        cc_honest,
        cc_paper,
        formula_rank_num: formula_rank.numer(),
        formula_rank_den: formula_rank.denom(),
        formula_a_num: formula_a.numer(),
        formula_a_den: formula_a.denom(),
        flags,
        points_total,
        maximal,
    })
}

/// An instance a sweep did not compute, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub p: u64,
    pub s: u32,
    pub m: u64,
    pub n: u64,
    pub q: u64,
    pub g: u64,
    pub skip_reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum SweepRecord {
    Report(VerificationReport),
    Skipped(SkipRecord),
}

// serde's untagged buffering cannot carry i128, so dispatch on the
// presence of `skip_reason` by hand.
impl<'de> Deserialize<'de> for SweepRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(d)?;
        let skipped = value.get("skip_reason").is_some();
        if skipped {
            serde_json::from_value(value).map(SweepRecord::Skipped)
        } else {
            serde_json::from_value(value).map(SweepRecord::Report)
        }
        .map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub const CSV_COLUMNS: [&str; 18] = [
    "p",
    "s",
    "m",
    "n",
    "q",
    "g",
    "matrix_rank",
    "a_number",
    "p_rank",
    "cc_honest",
    "cc_paper",
    "formula_rank_num",
    "formula_rank_den",
    "formula_a_num",
    "formula_a_den",
    "flags",
    "points_total",
    "maximal",
];

const SKIP_PREFIX: &str = "skipped:";

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl SweepRecord {
    fn csv_fields(&self) -> Vec<String> {
        match self {
            SweepRecord::Report(r) => vec![
                r.p.to_string(),
                r.s.to_string(),
                r.m.to_string(),
                r.n.to_string(),
                r.q.to_string(),
                r.g.to_string(),
                r.matrix_rank.to_string(),
                r.a_number.to_string(),
                r.p_rank.to_string(),
                r.cc_honest.to_string(),
                r.cc_paper.to_string(),
                r.formula_rank_num.to_string(),
                r.formula_rank_den.to_string(),
                r.formula_a_num.to_string(),
                r.formula_a_den.to_string(),
                r.flags.to_compact(),
                opt(&r.points_total),
                opt(&r.maximal),
            ],
            SweepRecord::Skipped(s) => {
                let mut row = vec![
                    s.p.to_string(),
                    s.s.to_string(),
                    s.m.to_string(),
                    s.n.to_string(),
                    s.q.to_string(),
                    s.g.to_string(),
                ];
                row.extend(std::iter::repeat_n(String::new(), 9));
                row.push(format!("{SKIP_PREFIX}{}", s.skip_reason));
                row.extend([String::new(), String::new()]);
                row
            }
        }
    }

    fn from_csv_fields(rec: &csv::StringRecord) -> Result<Self> {
        if rec.len() != CSV_COLUMNS.len() {
            return Err(Error::Parse(format!(
                "expected {} columns, found {}",
                CSV_COLUMNS.len(),
                rec.len()
            )));
        }
        fn num<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize) -> Result<T> {
            rec[idx]
                .parse()
                .map_err(|_| Error::Parse(format!("bad value in column {}", CSV_COLUMNS[idx])))
        }
        fn opt_num<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize) -> Result<Option<T>> {
            if rec[idx].is_empty() {
                Ok(None)
            } else {
                num(rec, idx).map(Some)
            }
        }
        if let Some(reason) = rec[15].strip_prefix(SKIP_PREFIX) {
            return Ok(SweepRecord::Skipped(SkipRecord {
                p: num(rec, 0)?,
                s: num(rec, 1)?,
                m: num(rec, 2)?,
                n: num(rec, 3)?,
                q: num(rec, 4)?,
                g: num(rec, 5)?,
                skip_reason: reason.to_string(),
            }));
        }
        Ok(SweepRecord::Report(VerificationReport {
            p: num(rec, 0)?,
            s: num(rec, 1)?,
            m: num(rec, 2)?,
            n: num(rec, 3)?,
            q: num(rec, 4)?,
            g: num(rec, 5)?,
            matrix_rank: num(rec, 6)?,
            a_number: num(rec, 7)?,
            p_rank: num(rec, 8)?,
            cc_honest: num(rec, 9)?,
            cc_paper: num(rec, 10)?,
            formula_rank_num: num(rec, 11)?,
            formula_rank_den: num(rec, 12)?,
            formula_a_num: num(rec, 13)?,
            formula_a_den: num(rec, 14)?,
            flags: ReportFlags::from_compact(&rec[15])?,
            points_total: opt_num(rec, 16)?,
            maximal: opt_num(rec, 17)?,
        }))
    }
}

fn csv_line(fields: &[String]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(fields)
        .map_err(|e| Error::IoFailure(e.to_string()))?;
    w.into_inner().map_err(|e| Error::IoFailure(e.to_string()))
}

pub fn csv_header() -> Vec<u8> {
    let cols: Vec<String> = CSV_COLUMNS.iter().map(|s| s.to_string()).collect();
    csv_line(&cols).expect("in-memory write")
}

/// One serialized record: a JSON line, or a CSV row without header.
pub fn emit_record(record: &SweepRecord, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out =
                serde_json::to_vec(record).map_err(|e| Error::IoFailure(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => csv_line(&record.csv_fields()),
    }
}

pub fn emit_report(report: &VerificationReport, format: Format) -> Result<Vec<u8>> {
    emit_record(&SweepRecord::Report(report.clone()), format)
}

/// Parses line-delimited JSON records.
pub fn parse_json_lines(text: &str) -> Result<Vec<SweepRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

/// Parses a CSV document with header.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::Parse("unexpected CSV header".into()));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            SweepRecord::from_csv_fields(&rec)
        })
        .collect()
}

/// Writes records in order; the CSV header goes out once, and only if the
/// destination was empty.
pub struct ReportWriter<W: Write> {
    inner: W,
    format: Format,
    header_pending: bool,
}

impl<W: Write> ReportWriter<W> {
    pub fn new(inner: W, format: Format, destination_empty: bool) -> Self {
        ReportWriter {
            inner,
            format,
            header_pending: format == Format::Csv && destination_empty,
        }
    }

    pub fn start(&mut self) -> Result<()> {
        if self.header_pending {
            self.inner.write_all(&csv_header())?;
            self.header_pending = false;
        }
        Ok(())
    }

    pub fn write(&mut self, record: &SweepRecord) -> Result<()> {
        self.start()?;
        self.inner.write_all(&emit_record(record, self.format)?)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.start()?;
        self.inner.flush()?;
        Ok(self.inner)
    }
}
