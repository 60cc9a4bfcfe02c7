"""Certificate, probe and formal-sum files.

The files are sectioned text::

    # affine refinement certificate
    [certificate]
    space = hpi
    representation = pi-affine
    target = indicator(0, 1)
    grid = -1, 2, 1024

    [terms]
    1 * affine(1, 0)
    -2^(-1/2) * affine(1/2, 0)
    -2^(-1/2) * affine(1/2, 1/2)

Keyed sections hold ``key = value`` lines; ``[terms]`` and ``[elements]``
hold one ``coefficient * element`` or one element literal per line. Every
parse error carries the file, line and column.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from tokenize import TokenError

import sympy
from sympy import SympifyError
from sympy.parsing.sympy_parser import convert_xor, parse_expr, rationalize, standard_transformations

from .coefficients import CoefficientQuadrature, MatrixCoefficient, transfer_certificate
from .config import RunConfig
from .dependency import (
    CertificateSpace,
    DependencyCertificate,
    GroupFunctionSpace,
    RepresentationSpace,
    SequenceSpace,
    Term,
)
from .exceptions import FormalSumError, LintransError, LiteralSyntaxError
from .groupring import CoefficientMode, FormalSum, to_exact
from .groups import GroupElement, HeisenbergLatticeElement, parse_element
from .numerics import Grid, ParameterAxis, ParameterBox, QuadratureKind, QuadratureRule, SampledFunction
from .profiles import parse_profile
from .representations import RepresentationKind, RepresentationTag

logger = logging.getLogger(__name__)

_SECTION = re.compile(r"^\[([a-z-]+)\]$")
_TERM = re.compile(r"^(?:(?P<coefficient>.*)\*)?\s*(?P<element>[a-z]+\s*\(.*\))\s*$")
_NUMBER = re.compile(r"\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")
_COEFFICIENT_CHARS = re.compile(r"^[0-9A-Za-z.+\-*/^() ]+$")
_COEFFICIENT_NAMES = {"I": sympy.I, "i": sympy.I, "j": sympy.I, "sqrt": sympy.sqrt, "pi": sympy.pi}

_KEYS = {
    "certificate": {
        "space", "representation", "target", "grid", "tolerance", "admissible",
        "box-a", "box-b", "quadrature-support", "quadrature-breakpoints",
    },
    "probe": {
        "space", "representation", "function", "grid", "threshold", "floor", "mode",
        "admissible", "box-a", "box-b", "quadrature-support", "quadrature-breakpoints",
    },
    "formal-sum": {"mode"},
    "lattice": {"r"},
}
_ROWS = {"terms", "elements", "function"}


@dataclass
class Section:
    name: str
    line: int
    entries: dict[str, tuple[str, int]] = field(default_factory=dict)
    rows: list[tuple[str, int]] = field(default_factory=list)


class SectionedText:
    """The sections of one file, with location-aware accessors."""

    def __init__(self, text: str, source: str = "<string>"):
        self.source = source
        self.sections: dict[str, Section] = {}
        current = None
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            header = _SECTION.match(line)
            if header:
                name = header.group(1)
                if name not in _KEYS and name not in _ROWS:
                    self.error(f"Unknown section [{name}].", number)
                if name in self.sections:
                    self.error(f"Section [{name}] appears twice.", number)
                current = self.sections[name] = Section(name, number)
                continue
            if current is None:
                self.error("Content before the first section header.", number)
            if current.name in _ROWS:
                current.rows.append((line, number))
                continue
            key, separator, value = line.partition("=")
            key = key.strip()
            if not separator:
                self.error(f"Expected 'key = value' in [{current.name}].", number)
            if key not in _KEYS[current.name]:
                known = ", ".join(sorted(_KEYS[current.name]))
                self.error(f"Unknown key {key!r} in [{current.name}]; expected one of {known}.", number)
            if key in current.entries:
                self.error(f"Key {key!r} given twice.", number)
            current.entries[key] = (value.strip(), number)

    @classmethod
    def read(cls, path: str | Path) -> SectionedText:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise LiteralSyntaxError(f"Cannot read file: {exc.strerror}.", source=str(path)) from exc
        return cls(text, str(path))

    def error(self, message: str, line: int = 0, column: int = 0):
        raise LiteralSyntaxError(message, source=self.source, line=line, column=column)

    def section(self, name: str) -> Section:
        if name not in self.sections:
            self.error(f"Missing section [{name}].")
        return self.sections[name]

    def value(self, section: str, key: str, default: str | None = None) -> tuple[str | None, int]:
        entries = self.section(section).entries
        if key in entries:
            return entries[key]
        if default is None:
            self.error(f"Missing key {key!r} in [{section}].", self.section(section).line)
        return default, self.section(section).line

    def has(self, section: str, key: str) -> bool:
        return section in self.sections and key in self.sections[section].entries

    def numbers(self, text: str, line: int, *, count: int | None = None) -> list[Fraction]:
        values = []
        for token in (part.strip() for part in text.split(",")):
            try:
                values.append(Fraction(token))
            except (ValueError, ZeroDivisionError):
                self.error(f"{token!r} is not a real number.", line)
        if count is not None and len(values) != count:
            self.error(f"Expected {count} comma-separated numbers, got {len(values)}.", line)
        return values

    def real(self, section: str, key: str, default: float) -> float:
        if not self.has(section, key):
            return default
        text, line = self.value(section, key)
        return float(self.numbers(text, line, count=1)[0])


def parse_coefficient(text: str, *, mode: CoefficientMode, source: str = "<string>", line: int = 0, column: int = 0):
    """A complex coefficient such as ``-2^(-1/2)``, ``(1 + i)/2`` or ``sqrt(2)*I``.

    Exact mode returns a Gaussian rational and rejects irrational values.
    """
    text = text.strip() or "1"
    if not _COEFFICIENT_CHARS.match(text):
        raise LiteralSyntaxError(f"Unexpected character in coefficient {text!r}.", source=source, line=line, column=column)
    for name in re.findall(r"[A-Za-z_]+", _NUMBER.sub(" ", text)):
        if name not in _COEFFICIENT_NAMES:
            raise LiteralSyntaxError(f"Unknown name {name!r} in coefficient.", source=source, line=line, column=column)
    transformations = standard_transformations + (convert_xor,)
    if mode is CoefficientMode.EXACT:
        transformations += (rationalize,)
    try:
        expression = parse_expr(text, local_dict=dict(_COEFFICIENT_NAMES), transformations=transformations)
    except (SyntaxError, TokenError, SympifyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise LiteralSyntaxError(f"Malformed coefficient {text!r}.", source=source, line=line, column=column) from exc
    if expression.free_symbols or expression.has(sympy.zoo, sympy.nan, sympy.oo):
        raise LiteralSyntaxError(f"Coefficient {text!r} is not a finite number.", source=source, line=line, column=column)
    if mode is CoefficientMode.EXACT:
        try:
            return to_exact(sympy.nsimplify(expression) if expression.has(sympy.Float) else expression)
        except FormalSumError as exc:
            raise LiteralSyntaxError(str(exc), source=source, line=line, column=column) from exc
    return complex(expression.evalf(30))


def parse_terms(document: SectionedText, section: str, *, mode: CoefficientMode) -> list[tuple[object, GroupElement]]:
    terms = []
    for text, line in document.section(section).rows:
        match = _TERM.match(text)
        if not match:
            document.error(f"Expected 'coefficient * element', got {text!r}.", line)
        coefficient = match.group("coefficient") or ""
        value = parse_coefficient(coefficient, mode=mode, source=document.source, line=line, column=1)
        element = parse_element(match.group("element"), source=document.source, line=line)
        terms.append((value, element))
    if not terms:
        document.error(f"Section [{section}] is empty.", document.section(section).line)
    return terms


def parse_elements(document: SectionedText, section: str = "elements") -> list[GroupElement]:
    elements = [parse_element(text, source=document.source, line=line) for text, line in document.section(section).rows]
    if not elements:
        document.error(f"Section [{section}] is empty.", document.section(section).line)
    return elements


def _representation(document: SectionedText, section: str) -> RepresentationTag:
    name, line = document.value(section, "representation")
    try:
        return RepresentationTag.named(name)
    except LintransError as exc:
        document.error(str(exc), line)


def _grid(document: SectionedText, section: str, rep: RepresentationTag, config: RunConfig) -> Grid:
    if not document.has(section, "grid"):
        if rep.kind is RepresentationKind.AFFINE_PLUS:
            return config.half_line_grid()
        return config.plane_grid() if rep.dimension == 2 else config.line_grid()
    text, line = document.value(section, "grid")
    lower, upper, points = document.numbers(text, line, count=3)
    if points.denominator != 1:
        document.error("The grid point count must be an integer.", line)
    try:
        if rep.dimension == 2:
            return Grid.square(float(lower), float(upper), int(points))
        return Grid.line(float(lower), float(upper), int(points))
    except LintransError as exc:
        document.error(str(exc), line)


def _function(document: SectionedText, section: str, key: str, grid: Grid) -> SampledFunction:
    text, line = document.value(section, key)
    profile = parse_profile(text, source=document.source, line=line)
    return SampledFunction.from_profile(grid, profile)


def _box(document: SectionedText, section: str, config: RunConfig) -> ParameterBox:
    if not (document.has(section, "box-a") or document.has(section, "box-b")):
        return config.transfer_box()
    axes = []
    for name in ("a", "b"):
        text, line = document.value(section, f"box-{name}")
        parts = [part.strip() for part in text.split(",")]
        log_scale = parts[-1] == "log"
        if log_scale:
            parts = parts[:-1]
        lower, upper, points = document.numbers(", ".join(parts), line, count=3)
        try:
            axes.append(
                ParameterAxis(name, float(lower), float(upper), QuadratureRule(panels=int(points)), log_scale=log_scale)
            )
        except LintransError as exc:
            document.error(str(exc), line)
    return ParameterBox(tuple(axes))


def _quadrature(document: SectionedText, section: str) -> CoefficientQuadrature | None:
    if not document.has(section, "quadrature-support"):
        return None
    text, line = document.value(section, "quadrature-support")
    lower, upper = document.numbers(text, line, count=2)
    breakpoints = ()
    if document.has(section, "quadrature-breakpoints"):
        points, points_line = document.value(section, "quadrature-breakpoints")
        breakpoints = tuple(float(value) for value in document.numbers(points, points_line))
    rule = QuadratureRule(QuadratureKind.GAUSS_LEGENDRE, panels=64, nodes_per_panel=16)
    try:
        return CoefficientQuadrature((float(lower), float(upper)), breakpoints, rule)
    except LintransError as exc:
        document.error(str(exc), line)


# Certificates --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CertificateDocument:
    source: str
    certificate: DependencyCertificate
    tolerance: float
    space: CertificateSpace
    admissible: SampledFunction | None = None
    box: ParameterBox | None = None
    quadrature: CoefficientQuadrature | None = None

    def resolve(self) -> DependencyCertificate:
        """The certificate to verify: as written, or transferred to the group."""
        if self.space is CertificateSpace.HPI:
            return self.certificate
        return transfer_certificate(
            self.certificate.rep,
            self.certificate,
            self.admissible,
            self.box,
            quadrature=self.quadrature,
            tolerance=self.tolerance,
        )


def load_certificate(path: str | Path, config: RunConfig) -> CertificateDocument:
    document = SectionedText.read(path)
    return certificate_from(document, config)


def certificate_from(document: SectionedText, config: RunConfig) -> CertificateDocument:
    space_text, space_line = document.value("certificate", "space")
    try:
        space = CertificateSpace(space_text)
    except ValueError:
        document.error(f"Unknown certificate space {space_text!r}; expected hpi or l2g.", space_line)
    rep = _representation(document, "certificate")
    grid = _grid(document, "certificate", rep, config)
    target = _function(document, "certificate", "target", grid)
    tolerance = document.real("certificate", "tolerance", config.tol_identity)
    terms = [Term(coefficient, element) for coefficient, element in parse_terms(document, "terms", mode=CoefficientMode.FLOAT)]
    try:
        certificate = DependencyCertificate(CertificateSpace.HPI, tuple(terms), target, rep)
    except LintransError as exc:
        document.error(str(exc), document.section("terms").line)

    if space is CertificateSpace.HPI:
        return CertificateDocument(document.source, certificate, tolerance, space)
    admissible = _function(document, "certificate", "admissible", grid)
    box = _box(document, "certificate", config)
    quadrature = _quadrature(document, "certificate")
    logger.debug("Read a %d-term l2g certificate from %s", len(terms), document.source)
    return CertificateDocument(document.source, certificate, tolerance, space, admissible, box, quadrature)


# Probes --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProbeDocument:
    source: str
    space: object
    elements: list
    function: object
    threshold: float
    floor: float


def load_probe(path: str | Path, config: RunConfig) -> ProbeDocument:
    document = SectionedText.read(path)
    return probe_from(document, config)


def probe_from(document: SectionedText, config: RunConfig) -> ProbeDocument:
    space_text, space_line = document.value("probe", "space")
    threshold = document.real("probe", "threshold", config.tol_spectral)
    floor = document.real("probe", "floor", config.tol_inconclusive)
    elements = parse_elements(document)

    if space_text == "sequence":
        mode_text, mode_line = document.value("probe", "mode", CoefficientMode.FLOAT.value)
        mode = _mode(document, mode_text, mode_line)
        pairs = parse_terms(document, "function", mode=mode)
        try:
            function = FormalSum(pairs, mode=mode)
        except LintransError as exc:
            document.error(str(exc), document.section("function").line)
        return ProbeDocument(document.source, SequenceSpace(), elements, function, threshold, floor)

    rep = _representation(document, "probe")
    grid = _grid(document, "probe", rep, config)
    function = _function(document, "probe", "function", grid)
    if space_text == "hpi":
        return ProbeDocument(document.source, RepresentationSpace(rep), elements, function, threshold, floor)
    if space_text == "l2g":
        admissible = _function(document, "probe", "admissible", grid)
        target = MatrixCoefficient(rep, function, admissible, _box(document, "probe", config), _quadrature(document, "probe"))
        return ProbeDocument(document.source, GroupFunctionSpace(), elements, target, threshold, floor)
    document.error(f"Unknown probe space {space_text!r}; expected hpi, l2g or sequence.", space_line)


# Formal sums and lattices -----------------------------------------------------------


def _mode(document: SectionedText, text: str, line: int) -> CoefficientMode:
    try:
        return CoefficientMode(text)
    except ValueError:
        document.error(f"Unknown coefficient mode {text!r}; expected exact or float.", line)


def load_formal_sum(path: str | Path) -> FormalSum:
    document = SectionedText.read(path)
    return formal_sum_from(document)


def formal_sum_from(document: SectionedText) -> FormalSum:
    mode_text, mode_line = document.value("formal-sum", "mode", CoefficientMode.EXACT.value)
    mode = _mode(document, mode_text, mode_line)
    pairs = parse_terms(document, "terms", mode=mode)
    try:
        return FormalSum(pairs, mode=mode)
    except LintransError as exc:
        document.error(str(exc), document.section("terms").line)


def load_lattice(path: str | Path) -> tuple[list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]], int | None]:
    """Points (a, b) from heis literals in [elements], and ``r`` from [lattice] if given."""
    document = SectionedText.read(path)
    points = []
    for element in parse_elements(document):
        if not isinstance(element, HeisenbergLatticeElement):
            document.error(f"Lattice files list heis(...) elements, got {element.literal()}.")
        points.append((element.a, element.b))
    r = None
    if document.has("lattice", "r"):
        text, line = document.value("lattice", "r")
        value = document.numbers(text, line, count=1)[0]
        if value.denominator != 1 or value <= 0:
            document.error("r must be a positive integer.", line)
        r = int(value)
    return points, r
