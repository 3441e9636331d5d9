"""Clocked simulation of a PipelineModel.

Two engines share the same semantics.  ``step`` advances one clock on Python
integers (gate-level full adders for structural designs) and can write a
register trace.  ``run_cycles`` evaluates the same network for every cycle at
once with numpy, which is what long streams use; tests hold the two engines to
identical register traces.

Registers reset to zero.  Absent inputs clock zeros into the pipe and are
marked invalid; an output is valid exactly ``latency`` cycles after a valid
input entered.
"""

from __future__ import annotations

import numpy as np

from dwt97.errors import RangeError, RegisterOverflow, ShapeError
from dwt97.lifting import BandPair, as_signal, mirror_index
from dwt97.rtlsim.adders import Word, ripple_add, ripple_add_array
from dwt97.rtlsim.model import PipelineModel, signed_width

INPUT_NODES = ("even_in", "odd_in")
OUTPUT_NODES = ("low_out", "high_out")

# Pairs of symmetric extension on each side: an output pair depends on input
# pairs n-2 .. n+2.
GUARD_PAIRS = 2


def _operand_width(node, nodes):
    lo, hi = node.sum_range
    width = signed_width(lo, hi)
    for t in node.terms:
        tlo, thi = nodes[t.src].declared_range
        width = max(width, signed_width(tlo << t.shift, thi << t.shift))
    return width


def _gate_add(node, a, b, width):
    """Structural adder on Python ints: sign-extend and ripple."""
    (ta, va), (tb, vb) = (node.terms[0], a), (node.terms[1], b)
    x = Word(va << ta.shift, width)
    y = Word(vb << tb.shift, width)
    if ta.sign < 0:
        raise ValueError(f"{node.name}: subtrahend must be the second operand")
    return ripple_add(x, y, subtract=tb.sign < 0).value


def _evaluate(model: PipelineModel, name: str, operands, structural: bool):
    node = model.nodes[name]
    if node.op == "mul":
        (v,) = operands
        return (v * node.const.scaled_int) >> node.shr
    if node.op == "pass":
        (t,), (v,) = node.terms, operands
        return (t.sign * (v << t.shift)) >> node.shr
    if structural:
        width = _operand_width(node, model.nodes)
        return _gate_add(node, *operands, width) >> node.shr
    total = sum(t.sign * (v << t.shift) for t, v in zip(node.terms, operands))
    return total >> node.shr


def _check(model, name, value, cycle):
    lo, hi = model.nodes[name].declared_range
    if not lo <= value <= hi:
        raise RegisterOverflow(name, value, cycle, (lo, hi))


def step(model: PipelineModel, pair=None):
    """Advance one clock.

    ``pair`` is ``(even, odd)`` or ``None`` for a bubble.  Returns the
    ``(low, high)`` pair that entered ``latency`` cycles earlier, or ``None``
    while no valid pair is due.
    """
    if not model.history:
        ages = model.readers()
        model.history = {n: [0] * ages[n] for n in model.order if ages[n] > 0}
    structural = model.kind.structural
    cycle = model.cycle
    if pair is not None:
        even, odd = (int(v) for v in pair)
        inputs = {"even_in": even, "odd_in": odd}
    else:
        inputs = {"even_in": 0, "odd_in": 0}
    current = {}
    for name in model.order:
        node = model.nodes[name]
        if node.op == "input":
            current[name] = inputs[name]
            continue
        operands = []
        for t in node.terms:
            age = model.age(node, t)
            operands.append(current[t.src] if age == 0 else model.history[t.src][age - 1])
        current[name] = _evaluate(model, name, operands, structural)
    registered = model.registered()
    for name in registered:
        _check(model, name, current[name], cycle)
    if model.trace is not None:
        fields = "\t".join(f"{n}={current[n]}" for n in registered)
        model.trace.write(f"{cycle}\t{fields}\n")
    for name, hist in model.history.items():
        hist.insert(0, current[name])
        hist.pop()
    model.valid.append(pair is not None)
    model.cycle += 1
    due = cycle - model.latency
    if due >= 0 and model.valid[due]:
        return current["low_out"], current["high_out"]
    return None


def _delayed(values, age):
    """Register contents ``age`` cycles back along the last axis; reset is zero."""
    if age == 0:
        return values
    out = np.zeros_like(values)
    if age < values.shape[-1]:
        out[..., age:] = values[..., :-age]
    return out


def run_cycles(model: PipelineModel, even, odd, check=True) -> dict:
    """Evaluate every node for every cycle; the last axis is the clock.

    ``even``/``odd`` hold the input pins per cycle (bubbles as zeros).  Returns
    the per-cycle value of every node.  With ``check`` the earliest register
    range violation (by cycle, then evaluation order) raises RegisterOverflow,
    as the cycle engine would have.
    """
    even = np.asarray(even, dtype=np.int64)
    odd = np.asarray(odd, dtype=np.int64)
    if even.shape != odd.shape:
        raise ShapeError("even and odd pin streams differ in shape")
    structural = model.kind.structural
    values = {}
    for name in model.order:
        node = model.nodes[name]
        if node.op == "input":
            values[name] = even if name == "even_in" else odd
            continue
        ops = [_delayed(values[t.src], model.age(node, t)) for t in node.terms]
        if node.op == "mul":
            out = (ops[0] * node.const.scaled_int) >> node.shr
        elif node.op == "pass":
            t = node.terms[0]
            out = (t.sign * (ops[0] << t.shift)) >> node.shr
        elif structural:
            ta, tb = node.terms
            width = _operand_width(node, model.nodes)
            out = ripple_add_array(ops[0] << ta.shift, ops[1] << tb.shift, width,
                                   subtract=tb.sign < 0) >> node.shr
        else:
            out = sum(t.sign * (v << t.shift) for t, v in zip(node.terms, ops)) >> node.shr
        values[name] = out
    if check:
        first = None
        for rank, name in enumerate(model.registered()):
            lo, hi = model.nodes[name].declared_range
            bad = (values[name] < lo) | (values[name] > hi)
            if bad.any():
                cycles = np.nonzero(bad.reshape(-1, bad.shape[-1]).any(axis=0))[0]
                key = (int(cycles[0]), rank)
                if first is None or key < first[0]:
                    flat = values[name].reshape(-1, bad.shape[-1])[:, cycles[0]]
                    col = bad.reshape(-1, bad.shape[-1])[:, cycles[0]]
                    first = (key, name, int(flat[col][0]))
        if first is not None:
            (cycle, _), name, value = first
            raise RegisterOverflow(name, value, cycle, model.nodes[name].declared_range)
    return values


def _pin_streams(signals, latency):
    """Extend, split into pairs and append a flush of ``latency`` bubbles."""
    n = signals.shape[-1]
    idx = mirror_index(np.arange(-2 * GUARD_PAIRS, n + 2 * GUARD_PAIRS), n)
    ext = signals[..., idx]
    pad = [(0, 0)] * (ext.ndim - 1) + [(0, latency)]
    even = np.pad(ext[..., 0::2], pad)
    odd = np.pad(ext[..., 1::2], pad)
    return even, odd


def _as_byte_signal(s):
    s = as_signal(s)
    arr = np.asarray(s)
    if arr.dtype.kind == "f" and not np.all(arr == np.round(arr)):
        raise RangeError("datapath samples must be integers")
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < -128 or arr.max() > 127):
        raise RangeError("datapath samples must be signed 8-bit")
    return arr


def run_stream(model: PipelineModel, s, engine="cycle") -> BandPair:
    """Drive a whole signal through the pipe: symmetric extension, one pair per
    clock, flush, and discard of the guard outputs.

    ``engine="cycle"`` clocks ``step``; ``engine="batch"`` uses ``run_cycles``
    and also accepts a stack of equal-length signals.
    """
    arr = _as_byte_signal(s)
    half = arr.shape[-1] // 2
    even, odd = _pin_streams(arr, model.latency)
    pairs = half + 2 * GUARD_PAIRS
    model.reset()
    if engine == "batch":
        values = run_cycles(model, even, odd)
        sl = slice(model.latency + GUARD_PAIRS, model.latency + GUARD_PAIRS + half)
        return BandPair(values["low_out"][..., sl], values["high_out"][..., sl])
    if engine != "cycle":
        raise ValueError(f"unknown engine {engine!r}")
    if arr.ndim != 1:
        raise ShapeError("the cycle engine streams one signal at a time")
    outputs = []
    for c in range(pairs + model.latency):
        pair = (even[c], odd[c]) if c < pairs else None
        out = step(model, pair)
        if out is not None:
            outputs.append(out)
    if len(outputs) != pairs:
        raise RuntimeError(f"expected {pairs} output pairs, got {len(outputs)}")
    kept = outputs[GUARD_PAIRS:GUARD_PAIRS + half]
    low = np.array([p[0] for p in kept], dtype=np.int64)
    high = np.array([p[1] for p in kept], dtype=np.int64)
    return BandPair(low, high)


def stream_pairs(model: PipelineModel, pairs, check=True) -> dict:
    """Stream raw (even, odd) pairs with no boundary handling and a flush.

    Returns the per-cycle values of every node (see ``run_cycles``).
    """
    pairs = np.asarray(pairs, dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ShapeError("pairs must have shape (count, 2)")
    if pairs.size and (pairs.min() < -128 or pairs.max() > 127):
        raise RangeError("datapath samples must be signed 8-bit")
    even = np.pad(pairs[:, 0], (0, model.latency))
    odd = np.pad(pairs[:, 1], (0, model.latency))
    return run_cycles(model, even, odd, check=check)
