use serde::Serialize;

use crate::args::Format;
use crate::CliError;

/// Renders records as a CSV table under `header`, or as a JSON array of objects with the
/// same field names. Undefined values become empty CSV fields and JSON `null`. The header
/// is written even when there are no rows.
pub fn render<T: Serialize>(
    rows: &[T],
    header: &[&str],
    format: Format,
) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut wtr = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(Vec::new());
            wtr.write_record(header)
                .map_err(|e| CliError::Data(format!("cannot encode header: {e}")))?;
            for row in rows {
                wtr.serialize(row)
                    .map_err(|e| CliError::Data(format!("cannot encode row: {e}")))?;
            }
            wtr.into_inner()
                .map_err(|e| CliError::Data(format!("cannot encode table: {e}")))
        }
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows)
                .map_err(|e| CliError::Data(format!("cannot encode json: {e}")))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
