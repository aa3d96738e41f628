"""Domain types shared by every module.

A scalar retarded component is

    z'(t) = lam * z(t) + gamma * z(t - tau) + b * u(t),

and a diagonal system is a (possibly rule-generated) family of such
components sharing one delay ``tau``.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import (
    DelayNonPositive,
    EigenvalueOutOfRange,
    ParseError,
    ValidationError,
)

Number = Union[int, float, complex]


@dataclass(frozen=True)
class ToleranceProfile:
    quad_tol: float = 1e-9
    root_tol: float = 1e-12
    branch_tol: float = 1e-9
    boundary_eps: float = 1e-6

    def __post_init__(self):
        for name in ("quad_tol", "root_tol", "branch_tol", "boundary_eps"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be a positive finite number, got {value!r}")


DEFAULT_TOL = ToleranceProfile()


def _finite_complex(value, name):
    try:
        z = complex(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} is not a number: {value!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError(f"{name} must be finite, got {z!r}")
    return z


@dataclass(frozen=True)
class ComponentParams:
    """One scalar component ``(lam, gamma, b, tau)``.

    Construction only normalises types; call :func:`validate_component`
    to enforce the hypotheses.
    """

    lam: complex
    gamma: complex
    b: complex = 1.0
    tau: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lam", _finite_complex(self.lam, "lambda"))
        object.__setattr__(self, "gamma", _finite_complex(self.gamma, "gamma"))
        object.__setattr__(self, "b", _finite_complex(self.b, "b"))
        try:
            tau = float(self.tau)
        except (TypeError, ValueError):
            raise ValidationError(f"tau is not a real number: {self.tau!r}") from None
        if not math.isfinite(tau):
            raise ValidationError(f"tau must be finite, got {tau!r}")
        object.__setattr__(self, "tau", tau)

    @property
    def a(self) -> float:
        return self.lam.real

    @property
    def beta(self) -> float:
        return self.lam.imag

    @property
    def gamma_rot(self) -> complex:
        return reduce_params(self.lam, self.gamma, self.tau)[1]

    @property
    def boundary_hypothesis(self) -> bool:
        """True when Re(lam) sits exactly on the admissible edge 1/tau."""
        return self.tau > 0 and math.isclose(self.a * self.tau, 1.0, rel_tol=0, abs_tol=1e-15)


def reduce_params(lam: Number, gamma: Number, tau: float) -> tuple[float, complex]:
    """Return ``(Re lam, gamma * exp(-i Im(lam) tau))``.

    Everything downstream depends on ``lam`` only through its real part
    once ``gamma`` has been rotated this way.
    """
    if not tau > 0:
        raise DelayNonPositive(f"tau must be positive, got {tau!r}")
    lam = complex(lam)
    gamma = complex(gamma)
    return lam.real, gamma * cmath.exp(-1j * lam.imag * tau)


def validate_component(p: ComponentParams) -> ComponentParams:
    if not p.tau > 0:
        raise DelayNonPositive(f"tau must be positive, got {p.tau!r}")
    # a == 1/tau is allowed and flagged via ``boundary_hypothesis``
    if p.a * p.tau > 1.0 and not p.boundary_hypothesis:
        raise EigenvalueOutOfRange(
            f"Re(lambda)={p.a!r} exceeds 1/tau={1.0 / p.tau!r}"
        )
    return p


# ---------------------------------------------------------------------------
# sequence rules k -> value, k = 1, 2, ...


@dataclass(frozen=True)
class Constant:
    value: complex

    def __call__(self, k: int) -> complex:
        return complex(self.value)

    def to_dict(self):
        return {"kind": "constant", "value": _encode_complex(self.value)}


@dataclass(frozen=True)
class Power:
    """``scale * k**exponent``; the heat spectrum is ``Power(-1, 2)``."""

    scale: complex
    exponent: float

    def __call__(self, k: int) -> complex:
        return complex(self.scale) * float(k) ** self.exponent

    def to_dict(self):
        return {"kind": "power", "scale": _encode_complex(self.scale), "exponent": self.exponent}


@dataclass(frozen=True)
class Geometric:
    """``scale * base**k``."""

    base: complex
    scale: complex = 1.0

    def __call__(self, k: int) -> complex:
        return complex(self.scale) * complex(self.base) ** k

    def to_dict(self):
        return {
            "kind": "geometric",
            "base": _encode_complex(self.base),
            "scale": _encode_complex(self.scale),
        }


@dataclass(frozen=True)
class Explicit:
    values: tuple

    def __call__(self, k: int) -> complex:
        if not 1 <= k <= len(self.values):
            raise ValidationError(f"explicit rule has no entry for k={k}")
        return complex(self.values[k - 1])

    def to_dict(self):
        return {"kind": "explicit", "values": [_encode_complex(v) for v in self.values]}


SequenceRule = Union[Constant, Power, Geometric, Explicit]

HEAT_LAMBDA = Power(-1.0, 2.0)
PRESETS = ("generic", "heat", "direct")


def as_rule(rule) -> SequenceRule:
    """Coerce a number or rule into a rule."""
    if isinstance(rule, (Constant, Power, Geometric, Explicit)):
        return rule
    if isinstance(rule, (int, float, complex)):
        return Constant(complex(rule))
    raise ValidationError(f"cannot interpret {rule!r} as a sequence rule")


@dataclass(frozen=True)
class DiagonalDelaySystem:
    """A diagonal retarded system truncated at ``N`` components.

    ``preset`` selects how the rules map to components:

    * ``generic``: component k is ``(lambda_rule(k), gamma_rule(k), b_rule(k))``;
    * ``heat``: as generic with ``lambda_k = -k**2`` fixed;
    * ``direct``: the pure-delay system ``z' = A z(t - tau) + B u``, where
      ``lambda_rule`` gives the eigenvalues of ``A``. Component k is then the
      retarded component ``(0, lambda_rule(k), b_rule(k))``.

    When ``explicit`` is given, it lists the components directly.
    """

    tau: float
    N: int
    preset: str = "generic"
    lambda_rule: Optional[SequenceRule] = None
    gamma_rule: Optional[SequenceRule] = None
    b_rule: Optional[SequenceRule] = None
    explicit: Optional[tuple] = field(default=None)

    def __post_init__(self):
        if not (isinstance(self.tau, (int, float)) and math.isfinite(self.tau)):
            raise ValidationError(f"tau must be a finite real number, got {self.tau!r}")
        if not self.tau > 0:
            raise DelayNonPositive(f"tau must be positive, got {self.tau!r}")
        if isinstance(self.N, bool) or not isinstance(self.N, int) or self.N < 1:
            raise ValidationError(f"N must be a positive integer, got {self.N!r}")
        if self.preset not in PRESETS:
            raise ValidationError(f"unknown preset {self.preset!r}; expected one of {PRESETS}")
        if self.explicit is not None:
            comps = tuple(self.explicit)
            if not comps:
                raise ValidationError("explicit component list is empty")
            if self.preset != "generic":
                raise ValidationError("explicit components require preset 'generic'")
            if self.N > len(comps):
                raise ValidationError(f"N={self.N} exceeds the {len(comps)} explicit components")
            for c in comps:
                if c.tau != self.tau:
                    raise ValidationError(
                        f"explicit components must share tau={self.tau!r}, found {c.tau!r}"
                    )
                validate_component(c)
            object.__setattr__(self, "explicit", comps)
            return
        if self.preset == "heat":
            if self.lambda_rule is not None and self.lambda_rule != HEAT_LAMBDA:
                raise ValidationError("heat preset fixes lambda_k = -k^2; drop lambda_rule")
            object.__setattr__(self, "lambda_rule", HEAT_LAMBDA)
        if self.preset == "direct" and self.gamma_rule is not None:
            raise ValidationError("direct preset takes its delayed eigenvalues from lambda_rule")
        needed = ["lambda_rule", "b_rule"] + ([] if self.preset == "direct" else ["gamma_rule"])
        for name in needed:
            rule = getattr(self, name)
            if rule is None:
                raise ValidationError(f"preset {self.preset!r} requires {name}")
            object.__setattr__(self, name, as_rule(rule))
            if isinstance(getattr(self, name), Explicit) and len(getattr(self, name).values) < self.N:
                raise ValidationError(f"{name} lists fewer than N={self.N} values")

    def component(self, k: int) -> ComponentParams:
        """Return the validated k-th component (1-based)."""
        if not 1 <= k <= self.N:
            raise ValidationError(f"component index {k} outside 1..{self.N}")
        if self.explicit is not None:
            return self.explicit[k - 1]
        if self.preset == "direct":
            p = ComponentParams(0.0, self.lambda_rule(k), self.b_rule(k), self.tau)
        else:
            p = ComponentParams(self.lambda_rule(k), self.gamma_rule(k), self.b_rule(k), self.tau)
        return validate_component(p)

    def components(self, n: Optional[int] = None) -> list[ComponentParams]:
        n = self.N if n is None else n
        return [self.component(k) for k in range(1, n + 1)]

    def truncated(self, n: int) -> "DiagonalDelaySystem":
        if not 1 <= n <= self.N:
            raise ValidationError(f"cannot truncate to {n} components (N={self.N})")
        explicit = None if self.explicit is None else self.explicit[:n]
        return DiagonalDelaySystem(
            self.tau, n, self.preset, self.lambda_rule, self.gamma_rule, self.b_rule, explicit
        )

    def to_dict(self) -> dict:
        out = {"tau": self.tau, "preset": self.preset, "N": self.N}
        if self.explicit is not None:
            out["explicit_components"] = [
                {
                    "lambda": _encode_complex(c.lam),
                    "gamma": _encode_complex(c.gamma),
                    "b": _encode_complex(c.b),
                }
                for c in self.explicit
            ]
            return out
        if self.preset != "heat":
            out["lambda_rule"] = self.lambda_rule.to_dict()
        if self.gamma_rule is not None:
            out["gamma_rule"] = self.gamma_rule.to_dict()
        out["b_rule"] = self.b_rule.to_dict()
        return out


# ---------------------------------------------------------------------------
# system-spec documents


def _encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _decode_complex(raw, field_name):
    if isinstance(raw, bool):
        raise ParseError("expected a number or [re, im] pair", field=field_name)
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, (list, tuple)) and len(raw) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw
    ):
        return complex(raw[0], raw[1])
    if isinstance(raw, str):
        try:
            return parse_complex(raw)
        except ValueError:
            pass
    raise ParseError(f"expected a number or [re, im] pair, got {raw!r}", field=field_name)


def parse_complex(text: str) -> complex:
    """Parse ``"a+bi"`` style strings (``i`` or ``j`` accepted)."""
    s = text.strip().replace(" ", "").replace("i", "j")
    if not s:
        raise ValueError("empty complex literal")
    if s.endswith("j") and (s == "j" or s[-2] in "+-"):
        s = s[:-1] + "1j"
    return complex(s)


def _decode_rule(raw, field_name) -> SequenceRule:
    if not isinstance(raw, dict):
        # shorthand: a bare number means a constant sequence
        return Constant(_decode_complex(raw, field_name))
    kind = raw.get("kind")
    try:
        if kind == "constant":
            return Constant(_decode_complex(raw["value"], f"{field_name}.value"))
        if kind == "power":
            exponent = raw["exponent"]
            if isinstance(exponent, bool) or not isinstance(exponent, (int, float)):
                raise ParseError("exponent must be real", field=f"{field_name}.exponent")
            return Power(_decode_complex(raw.get("scale", 1.0), f"{field_name}.scale"), float(exponent))
        if kind == "geometric":
            return Geometric(
                _decode_complex(raw["base"], f"{field_name}.base"),
                _decode_complex(raw.get("scale", 1.0), f"{field_name}.scale"),
            )
        if kind == "explicit":
            values = raw["values"]
            if not isinstance(values, list):
                raise ParseError("values must be a list", field=f"{field_name}.values")
            return Explicit(
                tuple(_decode_complex(v, f"{field_name}.values[{i}]") for i, v in enumerate(values))
            )
    except KeyError as exc:
        raise ParseError(f"missing key {exc.args[0]!r}", field=field_name) from None
    raise ParseError(f"unknown rule kind {kind!r}", field=field_name)


_KNOWN_KEYS = {"tau", "preset", "N", "lambda_rule", "gamma_rule", "b_rule", "explicit_components"}


def system_from_dict(doc: dict) -> DiagonalDelaySystem:
    if not isinstance(doc, dict):
        raise ParseError("system spec must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", field=sorted(unknown)[0])
    if "tau" not in doc:
        raise ParseError("missing required key", field="tau")
    tau = doc["tau"]
    if isinstance(tau, bool) or not isinstance(tau, (int, float)):
        raise ParseError("tau must be a real number", field="tau")
    preset = doc.get("preset", "generic")

    if "explicit_components" in doc:
        raw = doc["explicit_components"]
        if not isinstance(raw, list):
            raise ParseError("must be a list", field="explicit_components")
        comps = []
        for i, entry in enumerate(raw):
            where = f"explicit_components[{i}]"
            if not isinstance(entry, dict):
                raise ParseError("must be an object", field=where)
            comp_tau = entry.get("tau", tau)
            comps.append(
                ComponentParams(
                    _decode_complex(entry.get("lambda"), f"{where}.lambda"),
                    _decode_complex(entry.get("gamma"), f"{where}.gamma"),
                    _decode_complex(entry.get("b", 1.0), f"{where}.b"),
                    comp_tau,
                )
            )
        if not comps:
            raise ValidationError("explicit component list is empty")
        N = doc.get("N", len(comps))
        return DiagonalDelaySystem(float(tau), N, preset, explicit=tuple(comps))

    if "N" not in doc:
        raise ParseError("missing required key", field="N")
    rules = {}
    for name in ("lambda_rule", "gamma_rule", "b_rule"):
        if name in doc:
            rules[name] = _decode_rule(doc[name], name)
    return DiagonalDelaySystem(float(tau), doc["N"], preset, **rules)


def parse_system_spec(text: str) -> DiagonalDelaySystem:
    """Parse a JSON system-spec document into a validated system.

    Example document (the heat-rod spectrum)::

        {"tau": 1, "preset": "heat", "N": 50,
         "gamma_rule": {"kind": "constant", "value": 0.1},
         "b_rule": {"kind": "geometric", "base": 0.5}}
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return system_from_dict(doc)


def serialize_system(system: DiagonalDelaySystem) -> str:
    return json.dumps(system.to_dict(), indent=2, sort_keys=True)
