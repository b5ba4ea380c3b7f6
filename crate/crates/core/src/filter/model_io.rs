use std::io::{self, BufRead, Write};

use crate::corpus::FilterModel;

/// First line of every model file.
pub const MODEL_FORMAT: &str = "paramine-filter-model\t1";

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("reading model: {0}")]
    Read(#[from] io::Error),
    #[error("model line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Header line, then `feature\tname\tmean\tscale\tweight` per feature, then
/// `bias\tvalue`. Numbers carry 17 significant digits so reading is exact.
pub fn write_model<W: Write>(model: &FilterModel, mut sink: W) -> io::Result<()> {
    writeln!(sink, "{MODEL_FORMAT}")?;
    for (i, name) in model.feature_names.iter().enumerate() {
        writeln!(
            sink,
            "feature\t{name}\t{:.16e}\t{:.16e}\t{:.16e}",
            model.means[i], model.scales[i], model.weights[i]
        )?;
    }
    writeln!(sink, "bias\t{:.16e}", model.bias)
}

pub fn read_model<R: BufRead>(source: R) -> Result<FilterModel, ModelFileError> {
    let mut model = FilterModel::zeroed(Vec::new());
    let mut saw_bias = false;
    let mut lines = source.lines().enumerate();
    let bad = |line: usize, message: &str| ModelFileError::Format { line, message: message.to_owned() };
    let header = lines.next().map(|(_, l)| l).transpose()?;
    if header.as_deref() != Some(MODEL_FORMAT) {
        return Err(bad(1, "missing or unsupported format header"));
    }
    for (idx, line) in lines {
        let line = line?;
        let n = idx + 1;
        if line.is_empty() {
            continue;
        }
        if saw_bias {
            return Err(bad(n, "content after bias line"));
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let num = |s: &str| -> Result<f64, ModelFileError> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(n, &format!("bad number {s:?}")))
        };
        match cols.as_slice() {
            ["feature", name, mean, scale, weight] => {
                model.feature_names.push(name.to_string());
                model.means.push(num(mean)?);
                model.scales.push(num(scale)?);
                model.weights.push(num(weight)?);
            }
            ["bias", value] => {
                model.bias = num(value)?;
                saw_bias = true;
            }
            _ => return Err(bad(n, "expected a feature or bias line")),
        }
    }
    if !saw_bias {
        return Err(bad(0, "missing bias line"));
    }
    if !model.is_consistent() {
        return Err(bad(0, "non-positive scale"));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(read_model(&b""[..]), Err(ModelFileError::Format { line: 1, .. })));
        let no_bias = format!("{MODEL_FORMAT}\nfeature\ta\t0\t1\t0\n");
        assert!(read_model(no_bias.as_bytes()).is_err());
        let zero_scale = format!("{MODEL_FORMAT}\nfeature\ta\t0\t0\t0\nbias\t0\n");
        assert!(read_model(zero_scale.as_bytes()).is_err());
        let junk = format!("{MODEL_FORMAT}\nweights 1 2 3\nbias\t0\n");
        assert!(matches!(read_model(junk.as_bytes()), Err(ModelFileError::Format { line: 2, .. })));
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(
            params in proptest::collection::vec((any::<f64>(), 1e-9f64..1e9, any::<f64>()), 0..12),
            bias in any::<f64>(),
        ) {
            let params: Vec<_> = params.into_iter().filter(|(m, _, w)| m.is_finite() && w.is_finite()).collect();
            prop_assume!(bias.is_finite());
            let model = FilterModel {
                feature_names: (0..params.len()).map(|i| format!("f{i}")).collect(),
                means: params.iter().map(|p| p.0).collect(),
                scales: params.iter().map(|p| p.1).collect(),
                weights: params.iter().map(|p| p.2).collect(),
                bias,
            };
            let mut buf = Vec::new();
            write_model(&model, &mut buf).unwrap();
            let back = read_model(&buf[..]).unwrap();
            prop_assert_eq!(back.feature_names, model.feature_names);
            prop_assert_eq!(back.means.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), model.means.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(back.scales, model.scales);
            prop_assert_eq!(back.weights, model.weights);
            prop_assert_eq!(back.bias.to_bits(), model.bias.to_bits());
        }
    }
}
