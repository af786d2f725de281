//! CSV sheets: the manual validation sheet and human ratings.

use std::path::Path;

use spellbench_core::scoring::prefs::{Choice, PreferenceRecord, Question};
use spellbench_core::scoring::validation::{ValidationRow, Verdict};

use crate::error::{AppError, AppResult, ResultExt};
use crate::fsio;

pub const VALIDATION_HEADER: [&str; 7] = [
    "model",
    "prompt_id",
    "sample_index",
    "target",
    "reading",
    "ocr_verdict",
    "manual_label",
];
pub const RATINGS_HEADER: [&str; 5] = ["prompt_id", "category", "question", "rater_id", "choice"];

pub fn render_validation_sheet(rows: &[ValidationRow]) -> AppResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(VALIDATION_HEADER).internal_err("cannot write CSV")?;
    for r in rows {
        let idx = r.sample_index.to_string();
        let label = r.manual_label.map_or("", Verdict::as_str);
        w.write_record([
            r.model.as_str(),
            &r.prompt_id,
            &idx,
            &r.target,
            r.reading.as_deref().unwrap_or(""),
            r.ocr_verdict.as_str(),
            label,
        ])
        .internal_err("cannot write CSV")?;
    }
    w.into_inner().internal_err("cannot write CSV")
}

fn check_header(found: &csv::StringRecord, want: &[&str], what: &str) -> AppResult<()> {
    let prefix: Vec<&str> = found.iter().take(want.len()).map(str::trim).collect();
    if prefix != want {
        return Err(AppError::user(format!(
            "{what} header must start with {}, found {}",
            want.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

/// Parses a sheet. Extra trailing columns (reviewer notes) are ignored; an
/// empty `reading` cell means no text was detected.
pub fn parse_validation_sheet(bytes: &[u8]) -> AppResult<Vec<ValidationRow>> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(bytes);
    check_header(r.headers().user_err("cannot read sheet header")?, &VALIDATION_HEADER, "validation sheet")?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.user_err(format!("validation sheet line {line}"))?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let bad = |what: &str| AppError::user(format!("validation sheet line {line}: {what}"));
        let sample_index = field(2).trim().parse().map_err(|_| bad("invalid sample_index"))?;
        let ocr_verdict = Verdict::parse(field(5)).ok_or_else(|| bad("ocr_verdict must be correct or incorrect"))?;
        let manual_label = match field(6).trim() {
            "" => None,
            v => Some(Verdict::parse(v).ok_or_else(|| bad(&format!("manual_label {v:?} must be correct or incorrect")))?),
        };
        rows.push(ValidationRow {
            model: field(0).to_string(),
            prompt_id: field(1).to_string(),
            sample_index,
            target: field(3).to_string(),
            reading: Some(field(4)).filter(|s| !s.is_empty()).map(String::from),
            ocr_verdict,
            manual_label,
        });
    }
    Ok(rows)
}

pub fn read_validation_sheet(path: &Path) -> AppResult<Vec<ValidationRow>> {
    let bytes = std::fs::read(path).user_err(format!("cannot read {}", path.display()))?;
    parse_validation_sheet(&bytes).map_err(|e| e.context(format!("in {}", path.display())))
}

pub fn write_validation_sheet(rows: &[ValidationRow], path: &Path) -> AppResult<()> {
    fsio::write_atomic(path, &render_validation_sheet(rows)?)
}

pub fn parse_ratings(bytes: &[u8]) -> AppResult<Vec<PreferenceRecord>> {
    let mut r = csv::Reader::from_reader(bytes);
    check_header(r.headers().user_err("cannot read ratings header")?, &RATINGS_HEADER, "ratings")?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.user_err(format!("ratings line {line}"))?;
        let ctx = |e: spellbench_core::Error| AppError::from(e).context(format!("ratings line {line}"));
        out.push(PreferenceRecord {
            prompt_id: rec[0].to_string(),
            category: rec[1].to_string(),
            question: Question::parse(&rec[2]).map_err(ctx)?,
            rater_id: rec[3].to_string(),
            choice: Choice::parse(&rec[4]).map_err(ctx)?,
        });
    }
    Ok(out)
}

pub fn read_ratings(path: &Path) -> AppResult<Vec<PreferenceRecord>> {
    let bytes = std::fs::read(path).user_err(format!("cannot read {}", path.display()))?;
    parse_ratings(&bytes).map_err(|e| e.context(format!("in {}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sheet_round_trip() {
        let rows = vec![
            ValidationRow {
                model: "m".into(),
                prompt_id: "spell-0001-aa".into(),
                sample_index: 3,
                target: "say \"hi\", ok".into(),
                reading: None,
                ocr_verdict: Verdict::Incorrect,
                manual_label: None,
            },
            ValidationRow {
                model: "m".into(),
                prompt_id: "spell-0002-bb".into(),
                sample_index: 0,
                target: "x".into(),
                reading: Some("X".into()),
                ocr_verdict: Verdict::Correct,
                manual_label: Some(Verdict::Correct),
            },
        ];
        let bytes = render_validation_sheet(&rows).unwrap();
        assert!(bytes.starts_with(b"model,prompt_id,sample_index,target,reading,ocr_verdict,manual_label\n"));
        assert_eq!(parse_validation_sheet(&bytes).unwrap(), rows);
    }

    #[test]
    fn sheet_errors() {
        let bad = b"model,prompt_id,sample_index,target,reading,ocr_verdict,manual_label\nm,p,0,t,r,correct,maybe\n";
        let e = parse_validation_sheet(bad).unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("maybe"), "{e}");
        assert!(parse_validation_sheet(b"a,b\n").is_err());
        let notes = b"model,prompt_id,sample_index,target,reading,ocr_verdict,manual_label,notes\nm,p,0,t,r,incorrect,correct,misshape\n";
        assert_eq!(parse_validation_sheet(notes).unwrap()[0].manual_label, Some(Verdict::Correct));
    }

    #[test]
    fn ratings() {
        let text = b"prompt_id,category,question,rater_id,choice\np1,Text,TextAccuracy,r1,A\np1,Text,TextAccuracy,r2,indifferent\n";
        let recs = parse_ratings(text).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].choice, Choice::Indifferent);
        let bad = b"prompt_id,category,question,rater_id,choice\np1,Text,TextAccuracy,r1,C\n";
        assert!(parse_ratings(bad).unwrap_err().to_string().contains("line 2"));
    }
}
