"""Line-oriented problem files.

::

    # comments start with '#'
    space X segment 0 6 step 1          # or: space S circle 1 base 1/32 step 1/16
    resolution 1/4                      # subdivide every space to this step
    map F : X -> X piecewise            # piecewise | samples | family F0 F1 t | compose G F
      [0,1) -> {0}
      {1} -> [0,1]
    end
    set N = [2,5]                       # first space unless 'set N in Y = ...'
    check isolating F N                 # harness directives, see harness.py
    expect index F N "k=1: rank 1, frobenius [x - 1]"

Sets are parsed on the grids at the requested resolution, so every endpoint
must be a breakpoint there.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .grid import CubSet, Grid1D, GridError, SetSyntaxError, parse_region
from .mvmap import CombMap, MapError, PiecewiseSpec, SampleSpec, compose, convex_family


class ProblemError(ValueError):
    """Malformed problem file."""


class UndefinedName(KeyError):
    """A directive refers to a space, map or set that is not declared."""

    def __str__(self):
        return self.args[0] if self.args else "undefined name"


@dataclass
class SpaceDecl:
    kind: str
    lo: Fraction
    hi: Fraction  # segment end, or circle length
    step: Fraction
    base: Fraction = Fraction(0)

    def grid(self, step: Fraction | None = None) -> Grid1D:
        step = step if step is not None else self.step
        if self.kind == "segment":
            return Grid1D.segment(self.lo, self.hi, step)
        return Grid1D.circle(self.hi, step, self.base)


@dataclass
class MapDecl:
    name: str
    domain: str
    codomain: str
    kind: str
    args: list[str]
    body: list[str]
    line: int


@dataclass
class Directive:
    keyword: str
    args: list[str]
    line: int
    text: str


@dataclass
class Problem:
    spaces: dict[str, SpaceDecl] = field(default_factory=dict)
    maps: dict[str, MapDecl] = field(default_factory=dict)
    sets: dict[str, tuple[str, str]] = field(default_factory=dict)
    resolution: Fraction | None = None
    checks: list[Directive] = field(default_factory=list)
    expects: list[Directive] = field(default_factory=list)
    source: str = ""

    # -- lookup

    def space_names(self) -> list[str]:
        return list(self.spaces)

    def default_map(self) -> str:
        for name, m in self.maps.items():
            if m.domain == m.codomain:
                return name
        raise UndefinedName("no self-map declared")

    def instance(self, resolution=None) -> "Instance":
        return Instance(self, Fraction(resolution) if resolution is not None else self.resolution)


class Instance:
    """A problem realised on grids of one resolution."""

    def __init__(self, problem: Problem, resolution: Fraction | None):
        self.problem = problem
        self.resolution = resolution
        self._grids: dict[str, Grid1D] = {}
        self._maps: dict[str, CombMap] = {}

    def grid(self, space: str) -> Grid1D:
        if space not in self.problem.spaces:
            raise UndefinedName(f"undefined space {space!r}")
        if space not in self._grids:
            decl = self.problem.spaces[space]
            base = decl.grid()
            if self.resolution is None or self.resolution == decl.step:
                self._grids[space] = base
            else:
                k = decl.step / self.resolution
                if k.denominator != 1 or k < 1:
                    raise ProblemError(f"resolution {self.resolution} does not subdivide step {decl.step} of {space}")
                self._grids[space] = base.subdivide(int(k))[0]
        return self._grids[space]

    def map(self, name: str) -> CombMap:
        if name not in self.problem.maps:
            raise UndefinedName(f"undefined map {name!r}")
        if name not in self._maps:
            self._maps[name] = self._build(self.problem.maps[name])
        return self._maps[name]

    def _build(self, decl: MapDecl) -> CombMap:
        dom, cod = self.grid(decl.domain), self.grid(decl.codomain)
        try:
            if decl.kind == "piecewise":
                return PiecewiseSpec.parse(decl.body, cod).build(dom, cod)
            if decl.kind == "samples":
                pts, vals = [], []
                for row in decl.body:
                    if "->" not in row:
                        raise ProblemError(f"line {decl.line}: sample needs 'x -> y': {row!r}")
                    x, y = row.split("->")
                    pts.append(Fraction(x.strip()))
                    vals.append(Fraction(y.strip()))
                return SampleSpec(pts, vals).build(dom, cod)
            if decl.kind == "family":
                f0, f1, lam = decl.args
                return convex_family(self.map(f0), self.map(f1), Fraction(lam))
            if decl.kind == "compose":
                outer, inner = decl.args
                return compose(self.map(outer), self.map(inner))
        except (MapError, GridError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, (ProblemError, UndefinedName)):
                raise
            raise ProblemError(f"map {decl.name} (line {decl.line}): {exc}") from exc
        raise ProblemError(f"unknown map kind {decl.kind!r}")

    def set(self, name: str, space: str | None = None):
        """Named set (or literal set text) on the grid of its space."""
        if name in self.problem.sets:
            space_name, text = self.problem.sets[name]
        else:
            if not any(ch in name for ch in "[({∅") and name not in {"X", "S"}:
                raise UndefinedName(f"undefined set {name!r}")
            space_name, text = space or self.problem.space_names()[0], name
        region = parse_region(text, self.grid(space_name))
        return region.as_cubset() if region.is_closed() else region

    def closed_set(self, name: str, space: str | None = None):
        s = self.set(name, space)
        if not isinstance(s, CubSet):
            raise ProblemError(f"set {name} is not closed")
        return s


def _fraction(tok: str, line: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ProblemError(f"line {line}: not a rational number: {tok!r}") from None


def parse_problem(text: str) -> Problem:
    prob = Problem(source=text)
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        raw = lines[i]
        lineno = i + 1
        i += 1
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "space":
            toks = rest.split()
            if len(toks) < 3 or (toks[1] == "segment" and len(toks) < 4):
                raise ProblemError(f"line {lineno}: space needs a name, kind and bounds")
            name, kind = toks[0], toks[1]
            opts = dict(zip(toks[4::2], toks[5::2])) if kind == "segment" else dict(zip(toks[3::2], toks[4::2]))
            if kind == "segment":
                lo, hi = _fraction(toks[2], lineno), _fraction(toks[3], lineno)
            elif kind == "circle":
                lo, hi = Fraction(0), _fraction(toks[2], lineno)
            else:
                raise ProblemError(f"line {lineno}: unknown space kind {kind!r}")
            unknown = set(opts) - {"step", "base"}
            if unknown:
                raise ProblemError(f"line {lineno}: unknown space options {sorted(unknown)}")
            step = _fraction(opts.get("step", "1"), lineno)
            base = _fraction(opts.get("base", "0"), lineno)
            if kind == "segment" and "base" in opts:
                raise ProblemError(f"line {lineno}: segments take no base point")
            prob.spaces[name] = SpaceDecl(kind, lo, hi, step, base)
            try:
                prob.spaces[name].grid()
            except GridError as exc:
                raise ProblemError(f"line {lineno}: {exc}") from exc
        elif head == "resolution":
            prob.resolution = _fraction(rest, lineno)
        elif head == "map":
            if ":" not in rest or "->" not in rest:
                raise ProblemError(f"line {lineno}: expected 'map NAME : DOM -> COD KIND ...'")
            name, _, sig = rest.partition(":")
            dom, _, tail = sig.partition("->")
            toks = tail.split()
            if len(toks) < 2:
                raise ProblemError(f"line {lineno}: map needs a codomain and a kind")
            cod, kind, args = toks[0], toks[1], toks[2:]
            decl = MapDecl(name.strip(), dom.strip(), cod, kind, args, [], lineno)
            if kind in ("piecewise", "samples"):
                while True:
                    if i >= len(lines):
                        raise ProblemError(f"line {lineno}: map {decl.name} has no 'end'")
                    body = lines[i].split("#", 1)[0].strip()
                    i += 1
                    if body == "end":
                        break
                    if body:
                        decl.body.append(body)
            elif kind == "family" and len(args) != 3:
                raise ProblemError(f"line {lineno}: family needs F0 F1 lambda")
            elif kind == "compose" and len(args) != 2:
                raise ProblemError(f"line {lineno}: compose needs OUTER INNER")
            elif kind not in ("family", "compose"):
                raise ProblemError(f"line {lineno}: unknown map kind {kind!r}")
            for sp in (decl.domain, decl.codomain):
                if sp not in prob.spaces:
                    raise UndefinedName(f"line {lineno}: undefined space {sp!r}")
            prob.maps[decl.name] = decl
        elif head == "set":
            name, eq, text = rest.partition("=")
            if not eq:
                raise ProblemError(f"line {lineno}: expected 'set NAME = ...'")
            parts = name.split()
            if len(parts) == 3 and parts[1] == "in":
                sname, space = parts[0], parts[2]
            elif len(parts) == 1:
                sname, space = parts[0], None
            else:
                raise ProblemError(f"line {lineno}: bad set declaration")
            if space is None:
                if not prob.spaces:
                    raise ProblemError(f"line {lineno}: set declared before any space")
                space = next(iter(prob.spaces))
            if space not in prob.spaces:
                raise UndefinedName(f"line {lineno}: undefined space {space!r}")
            if not text.strip():
                raise ProblemError(f"line {lineno}: empty set text")
            prob.sets[sname] = (space, text.strip())
        elif head in ("check", "expect"):
            try:
                toks = shlex.split(rest)
            except ValueError as exc:
                raise ProblemError(f"line {lineno}: {exc}") from exc
            if not toks:
                raise ProblemError(f"line {lineno}: empty {head} directive")
            d = Directive(toks[0], toks[1:], lineno, rest)
            (prob.checks if head == "check" else prob.expects).append(d)
        else:
            raise ProblemError(f"line {lineno}: unknown keyword {head!r}")
    if not prob.spaces:
        raise ProblemError("no space declared")
    return prob


def load_problem(path) -> Problem:
    return parse_problem(Path(path).read_text(encoding="utf-8"))


def validate_sets(prob: Problem, resolution=None):
    """Parse every named set once, surfacing syntax errors early."""
    inst = prob.instance(resolution)
    for name in prob.sets:
        try:
            inst.set(name)
        except SetSyntaxError as exc:
            raise ProblemError(f"set {name}: {exc}") from exc
