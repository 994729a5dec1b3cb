use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::metrics::{psnr_from_mse, MetricsLog, MetricsRecord};
use crate::network::{ForwardTrace, Mlp};
use crate::optim::{mse_loss, AdamConfig, AdamState, Regularizer};
use crate::rng::{streams, Rng};
use crate::signals::SignalDataset;
use crate::tensor::Matrix;

/// Rows per forward pass when evaluating a whole dataset.
const EVAL_CHUNK: usize = 1 << 14;

/// Network output for every row of `coords`, evaluated in fixed-size chunks.
pub fn predict_chunked(mlp: &Mlp, coords: &Matrix) -> Result<Matrix> {
    if coords.rows() <= EVAL_CHUNK {
        return mlp.predict(coords);
    }
    let parts = (0..coords.rows())
        .step_by(EVAL_CHUNK)
        .map(|s| mlp.predict(&coords.slice_rows(s, (s + EVAL_CHUNK).min(coords.rows()))))
        .collect::<Result<Vec<_>>>()?;
    Matrix::vstack(&parts)
}

/// Data-term MSE of `mlp` over the whole dataset.
pub fn dataset_mse(mlp: &Mlp, data: &SignalDataset) -> Result<f64> {
    let pred = predict_chunked(mlp, &data.coords)?;
    Ok(mse_loss(&pred, &data.targets)?.0)
}

fn label_epoch(e: usize, msg: &str) -> Error {
    Error::Numeric(format!("epoch {e}: {msg}"))
}

fn with_epoch(e: usize) -> impl Fn(Error) -> Error {
    move |err| match err {
        Error::Numeric(msg) => label_epoch(e, &msg),
        other => other,
    }
}

/// Trains a fresh network on `data`.
///
/// Record `k` holds the full-dataset loss after `k` completed epochs, so
/// labels run from 1 to `epochs` and the body is empty when `epochs` is 0.
/// PSNR uses a peak value of 1. `on_record` sees each record as it is logged.
pub fn train(
    config: &ExperimentConfig,
    data: &SignalDataset,
    mut on_record: impl FnMut(&MetricsRecord),
) -> Result<(Mlp, MetricsLog)> {
    config.validate()?;
    let mut mlp = Mlp::init(config.mlp_spec(data.in_dim(), data.out_dim())?)?;
    let mut adam = AdamState::new(&mlp, AdamConfig::default());
    let reg = if config.weight_decay > 0.0 {
        Regularizer::L2 {
            weight: config.weight_decay,
        }
    } else {
        Regularizer::None
    };
    let mut log = MetricsLog::with_sharpness_layers(mlp.sharpness_values().len());
    let mut record = |log: &mut MetricsLog, mlp: &Mlp, epoch: usize, loss: f64| -> Result<()> {
        if !loss.is_finite() {
            return Err(label_epoch(
                epoch,
                &format!("loss became non-finite (last logged loss {:?})", log.last().map(|r| r.loss)),
            ));
        }
        let rec = MetricsRecord {
            epoch,
            loss,
            psnr: Some(psnr_from_mse(loss, 1.0)),
            lr: config.lr_schedule.lr_at(config.lr, epoch),
            sharpness: mlp.sharpness_values(),
        };
        on_record(&rec);
        log.push(rec)
    };
    let due = |k: usize| k > 0 && (k % config.eval_every == 0 || k == config.epochs);
    let n = data.len();
    let full_batch = config.batch_size == 0 || config.batch_size >= n;
    let mut trace = ForwardTrace::default();

    if full_batch {
        for k in 0..=config.epochs {
            if k == config.epochs {
                if due(k) {
                    let loss = dataset_mse(&mlp, data).map_err(with_epoch(k))?;
                    record(&mut log, &mlp, k, loss)?;
                }
                break;
            }
            let pred = mlp.forward_into(&data.coords, &mut trace).map_err(with_epoch(k))?;
            let (loss, d_out) = mse_loss(&pred, &data.targets)?;
            if due(k) {
                record(&mut log, &mlp, k, loss)?;
            } else if !loss.is_finite() {
                return Err(label_epoch(k, "loss became non-finite"));
            }
            let mut grads = mlp.backward(&trace, &d_out)?;
            reg.add_gradient(&mlp, &mut grads);
            adam.step(&mut mlp, &grads, config.lr_schedule.lr_at(config.lr, k))?;
        }
    } else {
        let mut shuffle = Rng::with_stream(config.seed, streams::SHUFFLE);
        let mut order: Vec<usize> = (0..n).collect();
        for k in 0..config.epochs {
            shuffle.shuffle(&mut order);
            let lr = config.lr_schedule.lr_at(config.lr, k);
            for batch in order.chunks(config.batch_size) {
                let x = data.coords.select_rows(batch);
                let y = data.targets.select_rows(batch);
                let pred = mlp.forward_into(&x, &mut trace).map_err(with_epoch(k))?;
                let (loss, d_out) = mse_loss(&pred, &y)?;
                if !loss.is_finite() {
                    return Err(label_epoch(k, "batch loss became non-finite"));
                }
                let mut grads = mlp.backward(&trace, &d_out)?;
                reg.add_gradient(&mlp, &mut grads);
                adam.step(&mut mlp, &grads, lr)?;
            }
            if due(k + 1) {
                let loss = dataset_mse(&mlp, data).map_err(with_epoch(k + 1))?;
                record(&mut log, &mlp, k + 1, loss)?;
            }
        }
    }
    Ok((mlp, log))
}
