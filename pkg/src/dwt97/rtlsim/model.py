"""Register/stage networks for the five lifting datapath designs.

A design is a dataflow graph of nodes.  Each node computes one value per
sample pair ``n``; an operand ``Term(src, offset, shift, sign)`` reads
``sign * (src[n + offset] << shift)``.  A node placed at stage ``s`` computes
pair ``n`` during clock cycle ``n + s``.  The age of an operand is
``stage(node) - stage(src) - offset``: age 0 is a combinational connection
inside one stage, age 1 reads the source's register, and larger ages read a
delay line of ``age - 1`` extra registers.

The stage map is data produced by a scheduler and may be replaced; the model
validates causality and, for the pipelined designs, the one-addition-per-stage
rule.
"""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from dwt97.fixpoint import (
    FRAC_BITS,
    CoeffSet,
    canonical_coeffs,
    shared_pair,
    shift_add_plan,
    signed_width,
)


class DesignKind(enum.IntEnum):
    BehavioralMultiplier = 1
    BehavioralShiftAdd = 2
    BehavioralPipelinedShiftAdd = 3
    StructuralShiftAdd = 4
    StructuralPipelinedShiftAdd = 5

    @property
    def pipelined(self) -> bool:
        return self in (DesignKind.BehavioralPipelinedShiftAdd, DesignKind.StructuralPipelinedShiftAdd)

    @property
    def structural(self) -> bool:
        return self in (DesignKind.StructuralShiftAdd, DesignKind.StructuralPipelinedShiftAdd)

    @property
    def generic_multiplier(self) -> bool:
        return self is DesignKind.BehavioralMultiplier


# Declared register ranges of the reference datapath.  Not sound for every
# byte input: see bounds.derived_ranges.
PUBLISHED_RANGES = {
    "input": (-128, 127),
    "after_alpha": (-530, 530),
    "after_beta": (-184, 184),
    "after_gamma": (-205, 205),
    "after_delta": (-366, 366),
    "low": (-298, 298),
    "high": (-252, 252),
}

RANGE_LABELS = tuple(PUBLISHED_RANGES)


class Term(NamedTuple):
    src: str
    offset: int = 0
    shift: int = 0
    sign: int = 1


@dataclass
class Node:
    name: str
    op: str  # input | add | pass | mul
    group: str
    terms: tuple = ()
    const: object = None  # ScaledCoeff for mul nodes
    shr: int = 0
    label: str | None = None  # key into the register range table
    stage: int = 0
    sum_range: tuple | None = None  # before the output shift
    declared_range: tuple | None = None
    tz: int = 0  # guaranteed trailing zero bits of the value
    sum_tz: int = 0

    @property
    def adders(self) -> int:
        return 1 if self.op == "add" else 0


@dataclass(frozen=True)
class RegisterSpec:
    name: str
    width: int
    declared_range: tuple

    def __post_init__(self):
        lo, hi = self.declared_range
        if lo > hi or signed_width(lo, hi) > self.width:
            raise ValueError(f"{self.name}: range {self.declared_range} does not fit {self.width} bits")


class StageAssignment(NamedTuple):
    stage: int
    nodes: tuple
    adders: int
    depth: int  # longest combinational adder chain inside the stage


@dataclass
class PipelineModel:
    kind: DesignKind
    coeffs: CoeffSet
    nodes: dict
    order: tuple  # topological evaluation order
    ranges: dict
    # simulation state, owned by rtlsim.sim
    cycle: int = 0
    history: dict = field(default_factory=dict)
    valid: list = field(default_factory=list)
    trace: object = None

    @property
    def latency(self) -> int:
        return self.nodes["low_out"].stage

    @property
    def stages(self):
        return stage_assignments(self)

    @property
    def stage_count(self) -> int:
        return self.latency

    def age(self, node: Node, term: Term) -> int:
        return node.stage - self.nodes[term.src].stage - term.offset

    def readers(self):
        """Maximum operand age per source node."""
        ages = {name: 0 for name in self.nodes}
        for node in self.nodes.values():
            for t in node.terms:
                ages[t.src] = max(ages[t.src], self.age(node, t))
        return ages

    def registered(self):
        """Names of nodes whose value is held in a register."""
        ages = self.readers()
        return [
            n for n in self.order
            if ages[n] >= 1 or self.nodes[n].op == "input" or n in ("low_out", "high_out")
        ]

    @property
    def registers(self):
        """Every register: node registers plus delay-line copies (``name@k``)."""
        ages = self.readers()
        specs = []
        for name in self.registered():
            node = self.nodes[name]
            width = register_width(node)
            specs.append(RegisterSpec(name, width, node.declared_range))
            for k in range(1, ages[name]):
                specs.append(RegisterSpec(f"{name}@{k}", width, node.declared_range))
        return specs

    def register(self, label: str) -> RegisterSpec:
        for spec in self.registers:
            node = self.nodes.get(spec.name)
            if node is not None and node.label == label:
                return spec
        raise KeyError(label)

    def clone(self) -> "PipelineModel":
        trace, self.trace = self.trace, None
        try:
            return copy.deepcopy(self)
        finally:
            self.trace = trace

    def reset(self):
        self.cycle = 0
        self.history = {}
        self.valid = []


def register_width(node: Node) -> int:
    lo, hi = node.declared_range
    return signed_width(lo, hi)


def stored_bits(node: Node) -> int:
    """Flip-flops a register needs; known-zero low bits are not stored."""
    return max(register_width(node) - node.tz, 1)


def adder_width(node: Node, nodes: dict) -> int:
    """Full-adder cells the node's adder needs.

    Low bits where only one operand can be non-zero pass straight through, so
    the adder spans from the larger operand trailing-zero count up to the
    sum's sign bit.
    """
    lo, hi = node.sum_range
    width = signed_width(lo, hi)
    low = max(t.shift + nodes[t.src].tz for t in node.terms)
    return max(width - low, 1)


# ---------------------------------------------------------------------------
# graph construction

# (step, result label, operand stream, neighbour offsets, addend stream)
LIFTING_STEPS = (
    ("alpha", "after_alpha", "even_in", (0, 1), "odd_in"),
    ("beta", "after_beta", "alpha", (-1, 0), "even_in"),
    ("gamma", "after_gamma", "beta", (0, 1), "alpha"),
    ("delta", "after_delta", "gamma", (-1, 0), "beta"),
)
SCALING_STEPS = (
    ("inv_k", "low", "delta"),
    ("neg_k", "high", "gamma"),
)


class _Builder:
    def __init__(self, kind: DesignKind, coeffs: CoeffSet):
        self.kind = kind
        self.coeffs = coeffs
        self.nodes: dict[str, Node] = {}

    def add(self, node: Node) -> str:
        if node.name in self.nodes:
            raise ValueError(f"duplicate node {node.name}")
        self.nodes[node.name] = node
        return node.name

    def build(self):
        self.add(Node("even_in", "input", "input", label="input"))
        self.add(Node("odd_in", "input", "input", label="input"))
        for step, label, operand, offsets, addend in LIFTING_STEPS:
            pre = self.add(Node(
                f"{step}.pre", "add", step,
                terms=tuple(Term(operand, d) for d in offsets),
            ))
            self.multiply(step, Term(pre), Term(addend, 0), label)
        for step, label, operand in SCALING_STEPS:
            self.multiply(step, Term(operand, 0), None, label)
        self.add(Node("low_out", "pass", "output", terms=(Term("inv_k"),)))
        self.add(Node("high_out", "pass", "output", terms=(Term("neg_k"),)))
        return self.nodes

    def multiply(self, step, x: Term, addend: Term | None, label):
        """Emit nodes computing ``addend + floor(x * c / 256)`` named ``step``."""
        coeff = self.coeffs[step]
        if self.kind.generic_multiplier:
            name = f"{step}.mul" if addend else step
            self.add(Node(name, "mul", step, terms=(x,), const=coeff, shr=FRAC_BITS,
                          label=None if addend else label))
            if addend:
                self.add(Node(step, "add", step, terms=(addend, Term(name)), label=label))
            return
        plan = shift_add_plan(coeff)
        terms = [Term(x.src, x.offset, shift, sign) for shift, sign in plan.terms]
        share = shared_pair(plan)
        if share is not None:
            gap, first, second = share
            t = self.add(Node(
                f"{step}.t", "add", step,
                terms=(Term(x.src, x.offset, 0), Term(x.src, x.offset, gap)),
            ))
            used = {first, first + gap, second, second + gap}
            terms = [tm for tm in terms if tm.shift not in used]
            terms += [Term(t, 0, first), Term(t, 0, second)]
            terms.sort(key=lambda tm: (tm.sign < 0, tm.shift))
        if self.kind.pipelined:
            self._tree(step, terms, addend, label)
        else:
            self._chain(step, terms, addend, label)

    def _chain(self, step, terms, addend, label):
        # partial products summed one after another, then floor, then the addend
        prod = step if addend is None else f"{step}.prod"
        if len(terms) == 1:
            self.add(Node(prod, "pass", step, terms=(terms[0],), shr=FRAC_BITS,
                          label=None if addend else label))
        else:
            acc = terms[0]
            for i, tm in enumerate(terms[1:], 1):
                last = i == len(terms) - 1
                name = prod if last else f"{step}.acc{i}"
                self.add(Node(name, "add", step, terms=(acc, tm),
                              shr=FRAC_BITS if last else 0,
                              label=label if last and addend is None else None))
                acc = Term(name)
        if addend is not None:
            self.add(Node(step, "add", step, terms=(addend, Term(prod)), label=label))

    def _tree(self, step, terms, addend, label):
        # floor(x*c/256) + a == floor((x*c + (a << 8)) / 256), so the addend
        # joins the reduction tree and the floor moves to the root.
        if addend is not None:
            terms = terms + [Term(addend.src, addend.offset, FRAC_BITS, 1)]
        # earliest-ready pair first; ties keep term order
        pool = [(self._level(tm.src, step), i, tm) for i, tm in enumerate(terms)]
        if len(pool) == 1:
            self.add(Node(step, "pass", step, terms=(pool[0][2],), shr=FRAC_BITS, label=label))
            return
        serial = len(pool)
        k = 0
        while len(pool) > 1:
            pool.sort(key=lambda p: (p[0], p[1]))
            (la, _, a), (lb, _, b), rest = pool[0], pool[1], pool[2:]
            if a.sign < 0:
                a, b = b, a
            k += 1
            root = not rest
            name = step if root else f"{step}.s{k}"
            self.add(Node(name, "add", step, terms=(a, b),
                          shr=FRAC_BITS if root else 0, label=label if root else None))
            pool = rest + [(max(la, lb) + 1, serial + k, Term(name))]

    def _level(self, name, step):
        # adders between the step's external operands and this node
        node = self.nodes[name]
        if node.group != step:
            return 0
        return 1 + max((self._level(t.src, step) for t in node.terms), default=0)


def _toposort(nodes: dict) -> tuple:
    order, seen = [], set()

    def visit(name, path=()):
        if name in seen:
            return
        if name in path:
            raise ValueError(f"combinational loop through {name}")
        for t in nodes[name].terms:
            visit(t.src, path + (name,))
        seen.add(name)
        order.append(name)

    for name in nodes:
        visit(name)
    return tuple(order)


# ---------------------------------------------------------------------------
# scheduling

def schedule(nodes: dict, order, policy: str) -> dict:
    """ASAP stage map.

    ``policy="step"`` keeps each lifting step combinational inside one stage;
    ``policy="adder"`` registers every node, so each stage holds at most one
    addition on any path.  Both output registers share the final stage.
    """
    stage = {}
    if policy not in ("step", "adder"):
        raise ValueError(f"unknown scheduling policy {policy!r}")
    groups = {}
    for name in order:
        groups.setdefault(nodes[name].group, []).append(name)
    for name in order:
        node = nodes[name]
        if node.op == "input":
            stage[name] = 0
            continue
        if node.group == "output":
            continue
        if policy == "adder":
            stage[name] = max(stage[t.src] + t.offset + 1 for t in node.terms)
        elif name not in stage:
            members = set(groups[node.group])
            s = 0
            for m in groups[node.group]:
                for t in nodes[m].terms:
                    if t.src not in members:
                        s = max(s, stage[t.src] + t.offset + 1)
            for m in members:
                stage[m] = s
    out = max(stage[t.src] + t.offset + 1 for n in groups["output"] for t in nodes[n].terms)
    for name in groups["output"]:
        stage[name] = out
    return stage


def stage_schedule(kind, coeffs=None):
    """Stage-by-stage listing of a pipelined design's arithmetic."""
    kind = DesignKind(kind)
    if not kind.pipelined:
        raise ValueError(f"{kind.name} is not a pipelined design")
    return build_design(kind, coeffs).stages


def stage_assignments(model: PipelineModel):
    depth = combinational_depth(model)
    by_stage = {}
    for name in model.order:
        by_stage.setdefault(model.nodes[name].stage, []).append(name)
    out = []
    for s in range(model.latency + 1):
        names = tuple(by_stage.get(s, ()))
        out.append(StageAssignment(
            s, names,
            sum(model.nodes[n].adders for n in names),
            max((depth[n] for n in names), default=0),
        ))
    return out


def node_weight(node: Node) -> int:
    if node.op == "add":
        return 1
    if node.op == "mul":
        # an array multiplier sums one partial-product row per constant bit
        return node.const.bit_width - 1
    return 0


def combinational_depth(model: PipelineModel) -> dict:
    """Adders on the longest combinational path ending at each node."""
    depth = {}
    for name in model.order:
        node = model.nodes[name]
        inner = [depth[t.src] for t in node.terms if model.age(node, t) == 0]
        depth[name] = node_weight(node) + max(inner, default=0)
    return depth


def critical_path(model: PipelineModel) -> int:
    return max(combinational_depth(model).values())


def validate(model: PipelineModel):
    """Check causality and, for pipelined designs, one addition per stage."""
    for name in model.order:
        node = model.nodes[name]
        for t in node.terms:
            age = model.age(node, t)
            if age < 0:
                raise ValueError(f"{name} reads {t.src}[n{t.offset:+d}] before it exists")
            if age == 0 and (t.offset != 0 or model.nodes[t.src].op == "input"):
                raise ValueError(f"{name}: combinational read of {t.src} needs offset 0 and a non-input source")
    if model.kind.pipelined and critical_path(model) > 1:
        raise ValueError("pipelined design has a stage with more than one addition on a path")
    lo, hi = model.nodes["low_out"].stage, model.nodes["high_out"].stage
    if lo != hi:
        raise ValueError("output registers must share a stage")


# ---------------------------------------------------------------------------
# ranges

def _term_range(t: Term, nodes):
    lo, hi = nodes[t.src].declared_range
    lo, hi = t.sign * (lo << t.shift), t.sign * (hi << t.shift)
    return min(lo, hi), max(lo, hi)


def _linear_form(name, nodes, roots):
    """Value of a node as {root: coefficient} over independent root registers."""
    if name in roots:
        return {name: Fraction(1)}
    node = nodes[name]
    form = {}
    for t in node.terms:
        for r, c in _linear_form(t.src, nodes, roots).items():
            form[r] = form.get(r, 0) + t.sign * c * (1 << t.shift)
    return form


def assign_ranges(nodes: dict, order, ranges: dict):
    """Fill in sum/declared ranges and trailing-zero counts.

    Labelled registers take the range table; everything else is derived by
    exact interval arithmetic over linear forms in independent registers, so
    in-range operands can never overflow an unlabelled node.
    """
    roots = set()
    for name in order:
        node = nodes[name]
        if node.op == "input":
            node.declared_range = ranges[node.label]
            node.sum_range = node.declared_range
            node.tz = node.sum_tz = 0
            roots.add(name)
            continue
        if node.op == "mul":
            lo, hi = nodes[node.terms[0].src].declared_range
            c = node.const.scaled_int
            node.sum_range = (min(lo * c, hi * c), max(lo * c, hi * c))
            node.sum_tz = 0
        else:
            form = {}
            for t in node.terms:
                for r, c in _linear_form(t.src, nodes, roots).items():
                    form[r] = form.get(r, 0) + t.sign * c * (1 << t.shift)
            lo = hi = 0
            for r, c in form.items():
                rlo, rhi = nodes[r].declared_range
                lo += min(c * rlo, c * rhi)
                hi += max(c * rlo, c * rhi)
            node.sum_range = (int(lo), int(hi))
            node.sum_tz = min(t.shift + nodes[t.src].tz for t in node.terms)
        lo, hi = node.sum_range
        derived = (lo >> node.shr, hi >> node.shr)
        node.tz = max(node.sum_tz - node.shr, 0)
        if node.label is not None:
            node.declared_range = ranges[node.label]
        else:
            node.declared_range = derived
        if node.shr or node.label is not None or node.op == "mul" or _is_pre_add(node):
            roots.add(name)


def _is_pre_add(node):
    # operands from different sample positions are independent roots
    return node.name.endswith(".pre")


def build_design(kind, coeffs=None, ranges=None, stages=None) -> PipelineModel:
    """Build the register network of one design.

    ``ranges`` maps the seven register labels to declared ranges (default: the
    published table).  ``stages`` optionally replaces the scheduler's stage map.
    """
    kind = DesignKind(kind)
    coeffs = coeffs or canonical_coeffs()
    ranges = dict(PUBLISHED_RANGES if ranges is None else ranges)
    missing = set(RANGE_LABELS) - set(ranges)
    if missing:
        raise ValueError(f"range table lacks {sorted(missing)}")
    nodes = _Builder(kind, coeffs).build()
    order = _toposort(nodes)
    stage_map = schedule(nodes, order, "adder" if kind.pipelined else "step")
    if stages is not None:
        stage_map.update(stages)
    for name, s in stage_map.items():
        nodes[name].stage = s
    assign_ranges(nodes, order, ranges)
    model = PipelineModel(kind, coeffs, nodes, order, ranges)
    validate(model)
    return model


def build_all(coeffs=None, ranges=None):
    return [build_design(k, coeffs, ranges) for k in DesignKind]
