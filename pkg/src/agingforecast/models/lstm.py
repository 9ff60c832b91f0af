"""LSTM with hand-written backpropagation through time.

Cell equations, acting on the concatenation [h(t-1); x(t)]:

    f = sigmoid(W_f [h; x] + b_f)          forget gate
    i = sigmoid(W_i [h; x] + b_i)          input gate
    cbar = tanh(W_c [h; x] + b_c)          candidate update
    c = c_prev * f + cbar * i              cell state
    o = sigmoid(W_h [h; x] + b_h)          output gate
    h = o * tanh(c)                        hidden state
    y = W_o h + b_o                        per-step linear readout

State starts at zero for every cycle and never crosses cycle
boundaries.  Training batches whole cycles, padded to the longest member
with a loss mask, and backpropagates through the full (untruncated)
sequence; masked padded steps receive zero output gradient and therefore
contribute exactly nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from agingforecast.data.cycles import CycleDataset
from agingforecast.errors import FitError
from agingforecast.models.sgd import (
    EarlyStopper,
    EpochRecord,
    NesterovOptimizer,
    SgdConfig,
    clip_gradients,
    validation_split,
)
from agingforecast.seeding import rng_for

GATE_NAMES = ("forget", "input", "candidate", "output")


@dataclass
class LstmModel:
    """Gate weights of shape (m, m + d_x), output layer (d_y, m)."""

    w_f: np.ndarray
    b_f: np.ndarray
    w_i: np.ndarray
    b_i: np.ndarray
    w_c: np.ndarray
    b_c: np.ndarray
    w_h: np.ndarray
    b_h: np.ndarray
    w_o: np.ndarray
    b_o: np.ndarray

    def __post_init__(self):
        m = self.w_f.shape[0]
        for name in ("w_f", "w_i", "w_c", "w_h"):
            if getattr(self, name).shape != self.w_f.shape:
                raise ValueError("gate matrices must share a shape")
        if self.w_o.shape[1] != m:
            raise ValueError("output layer width must equal the hidden size")

    @property
    def hidden_size(self) -> int:
        return self.w_f.shape[0]

    @property
    def d_in(self) -> int:
        return self.w_f.shape[1] - self.w_f.shape[0]

    @property
    def d_out(self) -> int:
        return self.w_o.shape[0]

    def parameters(self) -> list[np.ndarray]:
        return [self.w_f, self.b_f, self.w_i, self.b_i, self.w_c, self.b_c,
                self.w_h, self.b_h, self.w_o, self.b_o]

    def copy(self) -> "LstmModel":
        return LstmModel(*(p.copy() for p in self.parameters()))

    def astype(self, dtype) -> "LstmModel":
        return LstmModel(*(p.astype(dtype) for p in self.parameters()))


def init_lstm(d_in: int, hidden: int, d_out: int, seed: int,
              dtype=np.float64) -> LstmModel:
    """Uniform fan-in scaled init for every matrix, zero biases."""
    rng = rng_for(seed, "lstm-init")
    fan_in = hidden + d_in
    bound = 1.0 / np.sqrt(fan_in)

    def gate():
        return rng.uniform(-bound, bound, size=(hidden, fan_in)).astype(dtype)

    w_f, w_i, w_c, w_h = gate(), gate(), gate(), gate()
    out_bound = 1.0 / np.sqrt(hidden)
    w_o = rng.uniform(-out_bound, out_bound, size=(d_out, hidden)).astype(dtype)
    zeros = lambda n: np.zeros(n, dtype=dtype)
    return LstmModel(w_f, zeros(hidden), w_i, zeros(hidden), w_c, zeros(hidden),
                     w_h, zeros(hidden), w_o, zeros(d_out))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_cell_step(
    model: LstmModel, h_prev: np.ndarray, c_prev: np.ndarray, x: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """One reference cell update on 1-D state vectors."""
    if h_prev.shape[-1] != model.hidden_size or x.shape[-1] != model.d_in:
        raise ValueError("state or input dimension mismatch")
    hx = np.concatenate([h_prev, x], axis=-1)
    f = _sigmoid(model.w_f @ hx + model.b_f)
    i = _sigmoid(model.w_i @ hx + model.b_i)
    cbar = np.tanh(model.w_c @ hx + model.b_c)
    c = c_prev * f + cbar * i
    o = _sigmoid(model.w_h @ hx + model.b_h)
    h = o * np.tanh(c)
    return h, c


# --- fused fast path -------------------------------------------------------
# One (m+d_x, 4m) matrix multiplies the concatenated state per step; the
# column blocks are the f/i/candidate/output gates in that order.  It is
# algebraically identical to the per-gate form of lstm_cell_step.

def _fuse(model: LstmModel) -> tuple[np.ndarray, np.ndarray]:
    w = np.concatenate(
        [model.w_f.T, model.w_i.T, model.w_c.T, model.w_h.T], axis=1
    )
    b = np.concatenate([model.b_f, model.b_i, model.b_c, model.b_h])
    return np.ascontiguousarray(w), b


def _unfuse(model: LstmModel, w: np.ndarray, b: np.ndarray,
            w_o: np.ndarray, b_o: np.ndarray) -> LstmModel:
    m = model.hidden_size
    return LstmModel(
        w_f=np.ascontiguousarray(w[:, 0 * m : 1 * m].T), b_f=b[0 * m : 1 * m].copy(),
        w_i=np.ascontiguousarray(w[:, 1 * m : 2 * m].T), b_i=b[1 * m : 2 * m].copy(),
        w_c=np.ascontiguousarray(w[:, 2 * m : 3 * m].T), b_c=b[2 * m : 3 * m].copy(),
        w_h=np.ascontiguousarray(w[:, 3 * m : 4 * m].T), b_h=b[3 * m : 4 * m].copy(),
        w_o=w_o.copy(), b_o=b_o.copy(),
    )


def _forward_batch(w, b, w_o, b_o, m, x_seq):
    """Run the recurrence over x_seq (T, B, d_x); returns caches."""
    t_len, batch, _ = x_seq.shape
    dtype = x_seq.dtype
    h = np.zeros((batch, m), dtype=dtype)
    c = np.zeros((batch, m), dtype=dtype)
    zs, fs, is_, cbars, os_, cs, tcs = [], [], [], [], [], [], []
    c_prevs = []
    preds = np.empty((t_len, batch, w_o.shape[0]), dtype=dtype)
    for t in range(t_len):
        z = np.concatenate([h, x_seq[t]], axis=1)
        g = z @ w + b
        f = _sigmoid(g[:, :m])
        i = _sigmoid(g[:, m : 2 * m])
        cbar = np.tanh(g[:, 2 * m : 3 * m])
        o = _sigmoid(g[:, 3 * m :])
        c_prevs.append(c)
        c = c * f + cbar * i
        tc = np.tanh(c)
        h = o * tc
        preds[t] = h @ w_o.T + b_o
        zs.append(z); fs.append(f); is_.append(i); cbars.append(cbar)
        os_.append(o); cs.append(c); tcs.append(tc)
    return preds, dict(z=zs, f=fs, i=is_, cbar=cbars, o=os_, c=cs, tc=tcs,
                       c_prev=c_prevs)


def _backward_batch(w, w_o, m, cache, d_preds):
    """BPTT given dLoss/dPred per step; returns grads (dW, db, dWo, dbo)."""
    t_len = len(cache["z"])
    dtype = w.dtype
    d_w = np.zeros_like(w)
    d_b = np.zeros(w.shape[1], dtype=dtype)
    d_wo = np.zeros_like(w_o)
    d_bo = np.zeros(w_o.shape[0], dtype=dtype)
    dh_next = np.zeros((cache["z"][0].shape[0], m), dtype=dtype)
    dc_next = np.zeros_like(dh_next)
    for t in reversed(range(t_len)):
        z, f, i = cache["z"][t], cache["f"][t], cache["i"][t]
        cbar, o, tc = cache["cbar"][t], cache["o"][t], cache["tc"][t]
        c_prev = cache["c_prev"][t]
        h = o * tc
        dy = d_preds[t]
        d_wo += dy.T @ h
        d_bo += dy.sum(axis=0)
        dh = dy @ w_o + dh_next
        do = dh * tc
        dc = dc_next + dh * o * (1.0 - tc * tc)
        df = dc * c_prev
        di = dc * cbar
        dcbar = dc * i
        dg = np.concatenate(
            [
                df * f * (1.0 - f),
                di * i * (1.0 - i),
                dcbar * (1.0 - cbar * cbar),
                do * o * (1.0 - o),
            ],
            axis=1,
        )
        d_w += z.T @ dg
        d_b += dg.sum(axis=0)
        dz = dg @ w.T
        dh_next = dz[:, :m]
        dc_next = dc * f
    return d_w, d_b, d_wo, d_bo


def _pad_batch(inputs: list[np.ndarray], targets: list[np.ndarray], dtype):
    """Stack variable-length cycles into (T, B, .) arrays plus a mask."""
    t_max = max(x.shape[0] for x in inputs)
    batch = len(inputs)
    d_x, d_y = inputs[0].shape[1], targets[0].shape[1]
    x_seq = np.zeros((t_max, batch, d_x), dtype=dtype)
    y_seq = np.zeros((t_max, batch, d_y), dtype=dtype)
    mask = np.zeros((t_max, batch), dtype=dtype)
    for j, (x, y) in enumerate(zip(inputs, targets)):
        x_seq[: x.shape[0], j] = x
        y_seq[: y.shape[0], j] = y
        mask[: x.shape[0], j] = 1.0
    return x_seq, y_seq, mask


def lstm_loss_and_grads(
    model: LstmModel,
    inputs: list[np.ndarray],
    targets: list[np.ndarray],
) -> tuple[float, list[np.ndarray]]:
    """Masked squared-error loss (mean over unmasked steps, summed over
    targets) and exact gradients in parameters() order."""
    w, b = _fuse(model)
    dtype = w.dtype
    x_seq, y_seq, mask = _pad_batch(inputs, targets, dtype)
    preds, cache = _forward_batch(w, b, model.w_o, model.b_o,
                                  model.hidden_size, x_seq)
    n_steps = float(mask.sum())
    err = (preds - y_seq) * mask[:, :, None]
    loss = float(np.sum(err * err) / n_steps)
    d_preds = (2.0 / n_steps) * err
    d_w, d_b, d_wo, d_bo = _backward_batch(w, model.w_o, model.hidden_size,
                                           cache, d_preds)
    m = model.hidden_size
    grads = [
        np.ascontiguousarray(d_w[:, 0 * m : 1 * m].T), d_b[0 * m : 1 * m],
        np.ascontiguousarray(d_w[:, 1 * m : 2 * m].T), d_b[1 * m : 2 * m],
        np.ascontiguousarray(d_w[:, 2 * m : 3 * m].T), d_b[2 * m : 3 * m],
        np.ascontiguousarray(d_w[:, 3 * m : 4 * m].T), d_b[3 * m : 4 * m],
        d_wo, d_bo,
    ]
    return loss, grads


def lstm_forward_cycle(model: LstmModel, inputs: np.ndarray) -> np.ndarray:
    """Per-step predictions for one cycle; state starts at zero."""
    inputs = np.asarray(inputs)
    if inputs.ndim != 2 or inputs.shape[1] != model.d_in:
        raise ValueError(f"expected (T, {model.d_in}) inputs")
    w, b = _fuse(model)
    x_seq = inputs.astype(w.dtype)[:, None, :]
    preds, _ = _forward_batch(w, b, model.w_o, model.b_o, model.hidden_size,
                              x_seq)
    return preds[:, 0, :]


def lstm_train(
    model: LstmModel, train: CycleDataset, sgd: SgdConfig,
) -> tuple[LstmModel, list[EpochRecord]]:
    """Cycle-batched Nesterov SGD with untruncated BPTT, gradient-norm
    clipping, and early stopping on a cycle-level validation split."""
    if train.n_cycles < 2:
        raise ValueError("need at least 2 cycles to carve out validation")
    dtype = sgd.np_dtype
    model = model.astype(dtype)

    split_rng = rng_for(sgd.seed, "validation-split")
    train_idx, val_idx = validation_split(
        train.n_cycles, sgd.validation_fraction, split_rng
    )
    cycles = list(train.cycles)
    train_cycles = [cycles[i] for i in train_idx]
    val_sets = [
        (cycles[i].inputs.astype(dtype), cycles[i].targets.astype(dtype))
        for i in val_idx
    ]

    w, b = _fuse(model)
    w_o = model.w_o.copy()
    b_o = model.b_o.copy()
    params = [w, b, w_o, b_o]
    opt = NesterovOptimizer(params, sgd.learning_rate, sgd.momentum)
    stopper = EarlyStopper(patience=sgd.patience)
    best_snapshot = [p.copy() for p in params]
    history: list[EpochRecord] = []
    m = model.hidden_size

    for epoch in range(sgd.max_epochs):
        order = rng_for(sgd.seed, "shuffle", epoch).permutation(len(train_cycles))
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, len(train_cycles), sgd.batch_size):
            members = [train_cycles[j] for j in order[start : start + sgd.batch_size]]
            x_seq, y_seq, mask = _pad_batch(
                [cyc.inputs.astype(dtype) for cyc in members],
                [cyc.targets.astype(dtype) for cyc in members],
                dtype,
            )
            ahead = opt.lookahead(params)
            preds, cache = _forward_batch(ahead[0], ahead[1], ahead[2],
                                          ahead[3], m, x_seq)
            n_steps = float(mask.sum())
            err = (preds - y_seq) * mask[:, :, None]
            loss = float(np.sum(err * err) / n_steps)
            if not np.isfinite(loss):
                raise FitError(
                    f"NaN/inf loss at epoch {epoch}; try a lower learning rate"
                )
            d_w, d_b, d_wo, d_bo = _backward_batch(
                ahead[0], ahead[2], m, cache, (2.0 / n_steps) * err
            )
            grads = [d_w, d_b, d_wo, d_bo]
            clip_gradients(grads, sgd.clip_norm)
            opt.step(params, grads)
            epoch_loss += loss
            n_batches += 1

        val_mse = _validation_mse(w, b, w_o, b_o, m, val_sets)
        history.append(EpochRecord(epoch, epoch_loss / max(1, n_batches), val_mse))
        if stopper.update(epoch, val_mse):
            best_snapshot = [p.copy() for p in params]
        if stopper.should_stop:
            break

    return _unfuse(model, *best_snapshot), history


def _validation_mse(w, b, w_o, b_o, m, val_sets) -> float:
    per_cycle = []
    for x, y in val_sets:
        preds, _ = _forward_batch(w, b, w_o, b_o, m, x[:, None, :])
        per_cycle.append(float(np.mean((preds[:, 0, :] - y) ** 2)))
    return float(np.mean(per_cycle))
