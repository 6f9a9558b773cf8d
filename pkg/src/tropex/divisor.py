"""Piecewise-linear functions and the mixing collection of a vertex.

Divisors are formal: a divisor on the base X_v is an integer combination of
Σ-ray names, and a divisor on Y_v has a horizontal part (one symbol per ray
of the fibre fan) and a basal part pulled back from X_v.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .analysis import FibreFan, fibre_fan
from .complex import ComplexIso, ConeComplex, quotient_complex
from .errors import InputError, StructuralError
from .expansion import SubdivisionMap, TropicalExpansion, VertexData
from .lattice import IntMatrix, Vector, coordinates, dot, rational_inverse, solve_integer_linear

FormalSum = dict[str, int]


def clean(d: dict[str, int]) -> FormalSum:
    return {k: v for k, v in sorted(d.items()) if v != 0}


def add_sums(*terms: FormalSum, scale: Sequence[int] | None = None) -> FormalSum:
    out: dict[str, int] = {}
    for i, t in enumerate(terms):
        c = 1 if scale is None else scale[i]
        for k, v in t.items():
            out[k] = out.get(k, 0) + c * v
    return clean(out)


def format_sum(d: FormalSum, zero: str = "0") -> str:
    """Render a formal sum, positive terms first: ``{"D2": 1, "D1": -1}`` -> ``D2 - D1``."""
    items = [(k, v) for k, v in d.items() if v]
    if not items:
        return zero
    items.sort(key=lambda kv: (kv[1] < 0, kv[0]))
    parts = []
    for i, (k, v) in enumerate(items):
        mag = abs(v)
        term = k if mag == 1 else f"{mag}{k}"
        if i == 0:
            parts.append(term if v > 0 else f"-{term}")
        else:
            parts.append(("+ " if v > 0 else "- ") + term)
    return " ".join(parts)


@dataclass
class PLFunction:
    """One integral covector per cone, written in ambient coordinates.

    Covectors are only meaningful on the span of their cone; compatibility
    is checked on ray generators.
    """

    complex: ConeComplex
    covectors: dict[int, Vector]

    def value(self, cid: int, x: Sequence[int]) -> int:
        return dot(self.covectors[cid], x)

    def ray_values(self) -> dict[str, int]:
        """Value on each ray generator, keyed by ray name."""
        out = {}
        for r, name in enumerate(self.complex.ray_names):
            cid = self.complex.ray_cone_id(r)
            out[name] = self.value(cid, self.complex.rays[r])
        return out

    def check_compatible(self) -> None:
        cx = self.complex
        for c in cx:
            for f in cx.faces_of(c):
                for r in cx.ray_vectors(f):
                    if self.value(c, r) != self.value(f, r):
                        raise StructuralError(
                            f"PL function is not face compatible on {cx.cone_label(f)} ⊆ {cx.cone_label(c)}")

    def __add__(self, other: "PLFunction") -> "PLFunction":
        return self.combine(other, 1)

    def __sub__(self, other: "PLFunction") -> "PLFunction":
        return self.combine(other, -1)

    def combine(self, other: "PLFunction", sign: int) -> "PLFunction":
        if other.complex is not self.complex:
            raise ValueError("PL functions live on different complexes")
        cov = {c: tuple(a + sign * b for a, b in zip(self.covectors[c], other.covectors[c])) for c in self.covectors}
        return PLFunction(self.complex, cov)

    def scale(self, k: int) -> "PLFunction":
        return PLFunction(self.complex, {c: tuple(k * a for a in v) for c, v in self.covectors.items()})


def zero_pl(cx: ConeComplex) -> PLFunction:
    return PLFunction(cx, {c: (0,) * cx.rank for c in cx})


def linear_pl(cx: ConeComplex, covector: Sequence[int]) -> PLFunction:
    covector = tuple(int(x) for x in covector)
    if len(covector) != cx.rank:
        raise ValueError("covector length does not match the complex rank")
    return PLFunction(cx, {c: covector for c in cx})


def ray_divisor_pl(sigma: ConeComplex, ray: int | str) -> PLFunction:
    """The PL function that is 1 on the given ray and 0 on every other ray.

    Every cone containing the ray must be smooth; other cones get the zero
    covector.
    """
    if isinstance(ray, str):
        if ray not in sigma.ray_names:
            raise InputError(f"unknown ray {ray!r}")
        ray = sigma.ray_names.index(ray)
    cov = {}
    for c in sigma:
        keys = sigma.cone_keys[c]
        if ray not in keys:
            cov[c] = (0,) * sigma.rank
            continue
        if not sigma.cone(c).is_smooth():
            raise InputError(f"cone {sigma.cone_label(c)} is not smooth; ray divisors need smooth cones")
        order = sorted(keys)
        A = IntMatrix.from_rows([sigma.rays[i] for i in order], ncols=sigma.rank)
        b = [int(i == ray) for i in order]
        x = solve_integer_linear(A, b)
        if x is None:
            raise StructuralError("smooth cone admits no dual covector")
        cov[c] = x
    pl = PLFunction(sigma, cov)
    pl.check_compatible()
    return pl


def character_pl(sigma: ConeComplex, cid: int, m: Sequence[int]) -> PLFunction:
    """Σ_i m_i · (ray divisor of the i-th ray of the cone), as a formal sum of PL functions."""
    rays = sorted(sigma.cone_keys[cid])
    if len(m) != len(rays):
        raise InputError("character has the wrong length")
    out = zero_pl(sigma)
    for k, r in zip(m, rays):
        if k:
            out = out + ray_divisor_pl(sigma, r).scale(int(k))
    return out


def lift_to_product(f: PLFunction, target: ConeComplex, m: int) -> PLFunction:
    """Pull f back along Σ x τ -> Σ: the covector (m_σ, 0) on σ x κ."""
    cov = {}
    for t in target:
        s = target.origin[t][0]
        cov[t] = tuple(f.covectors[s]) + (0,) * m
    return PLFunction(target, cov)


def pullback_pl(f: PLFunction, sub: SubdivisionMap) -> PLFunction:
    """Restrict a PL function on Σ x τ to the cones of Υ."""
    if f.complex is not sub.target:
        raise ValueError("PL function must live on the target of the subdivision")
    cov = {w: f.covectors[t] for w, t in sub.assignment.items()}
    pl = PLFunction(sub.source, cov)
    pl.check_compatible()
    return pl


def pullback_from_sigma(exp: TropicalExpansion, f: PLFunction) -> PLFunction:
    return pullback_pl(lift_to_product(f, exp.sub.target, exp.m), exp.sub)


def tau_linear_pl(exp: TropicalExpansion, lam: Sequence[int]) -> PLFunction:
    """p*(λ) on Υ for a linear function λ on N_τ."""
    return linear_pl(exp.upsilon, (0,) * exp.n + tuple(int(x) for x in lam))


def vertex_translation(f: PLFunction, exp: TropicalExpansion, v: VertexData) -> tuple[Vector, PLFunction]:
    """The λ with p*(λ) = f on ω_v, and p*(λ) itself."""
    W = exp.upsilon.cone(v.omega_v).lattice_basis
    PW = exp.P @ W
    rhs = [dot(f.covectors[v.omega_v], col) for col in W.columns()]
    # λ·(P w_j) = f(w_j) for each basis vector w_j of N_ω
    inv = rational_inverse(PW.T)
    if inv is None:
        raise StructuralError("vertex cone does not map isomorphically onto τ")
    lam = [sum(inv[i][k] * Fraction(rhs[k]) for k in range(len(rhs))) for i in range(len(rhs))]
    if any(x.denominator != 1 for x in lam):
        raise StructuralError("translation on τ is not integral")
    lam_v = tuple(int(x) for x in lam)
    return lam_v, tau_linear_pl(exp, lam_v)


def normalize_at_vertex(f: PLFunction, exp: TropicalExpansion, v: VertexData) -> PLFunction:
    """f - p*(λ), where λ is the linear function on τ agreeing with f on ω_v."""
    _, g = vertex_translation(f, exp, v)
    out = f - g
    for r in exp.upsilon.ray_vectors(v.omega_v):
        if out.value(v.omega_v, r) != 0:
            raise StructuralError("normalised function does not vanish on ω_v")
    out.check_compatible()
    return out


# ---------------------------------------------------------------------------
# Restriction to Y_v
# ---------------------------------------------------------------------------

@dataclass
class DivisorExpression:
    """A divisor on Y_v: horizontal symbols (fibre-fan rays) plus pulled-back base symbols."""

    horizontal: FormalSum
    basal: FormalSum
    horizontal_rays: dict[str, Vector] = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not any(self.horizontal.values()) and not any(self.basal.values())

    def render(self) -> str:
        terms = {f"E[{k}]": v for k, v in self.horizontal.items()}
        terms.update({f"pi*{k}": v for k, v in self.basal.items()})
        return format_sum(terms)


def _star_step_cones(exp: TropicalExpansion, v: VertexData) -> list[int]:
    ups = exp.upsilon
    return [w for w in ups.cofaces[v.omega_v] if ups.dim(w) == exp.m + 1]


def restrict_to_component(f: PLFunction, exp: TropicalExpansion, v: VertexData,
                          witness: Optional[ComplexIso] = None, phi: Optional[FibreFan] = None) -> DivisorExpression:
    """Read off the divisor of f on Y_v from its values on the star of ω_v.

    Each cone ω_v + u of the star, one dimension up, gives a toric divisor of
    Y_v with coefficient f(u).  If r(ω_v + u) stays in σ_v the divisor is
    horizontal (a ray of Φ_v); otherwise it lies over the boundary divisor of
    X_v named by the Σ-ray ρ' with σ(ω_v + u) = σ_v + ρ'.
    """
    ups = exp.upsilon
    sig = exp.sigma
    w0 = v.omega_v
    for r in ups.ray_vectors(w0):
        if f.value(w0, r) != 0:
            raise InputError("PL function does not vanish on ω_v")
    phi = phi or fibre_fan(exp, v)
    horizontal_cones = {phi.provenance[phi.fan.ray_cone_id(i)]: i for i in range(len(phi.fan.rays))}
    horizontal: dict[str, int] = {}
    hrays: dict[str, Vector] = {}
    basal: dict[str, int] = {}
    basal_src: dict[str, int] = {}
    base_rays = ups.cone_keys[w0]
    sv_rays = sig.cone_keys[v.sigma_v]
    for w in sorted(_star_step_cones(exp, v), key=lambda c: sorted(ups.cone_keys[c])):
        c = ups.cone(w)
        if not c.is_smooth():
            raise InputError(f"cone {ups.cone_label(w)} is not smooth")
        extra = sorted(ups.cone_keys[w] - base_rays)
        if len(extra) != 1:
            raise InputError(f"cone {ups.cone_label(w)} is not ω_v plus one ray")
        val = f.value(w, ups.rays[extra[0]])
        if w in horizontal_cones:
            i = horizontal_cones[w]
            name = phi.fan.ray_names[i]
            horizontal[name] = val
            hrays[name] = phi.fan.rays[i]
            continue
        s = exp.sigma_of(w)
        new = sorted(sig.cone_keys[s] - sv_rays)
        if sig.dim(s) != sig.dim(v.sigma_v) + 1 or len(new) != 1 or not sig.is_face(v.sigma_v, s):
            raise InputError(f"cone {ups.cone_label(w)} does not lie over a boundary divisor of X_v")
        sym = exp.divisor_symbol(new[0])
        if sym in basal and basal[sym] != val:
            raise InputError(f"restriction is not pulled back from X_v along {sym} (component values differ)")
        basal[sym] = val
        basal_src[sym] = w
    if witness is not None:
        _check_against_witness(exp, v, witness, horizontal_cones, basal_src)
    return DivisorExpression(clean(horizontal), clean(basal), hrays)


def _check_against_witness(exp: TropicalExpansion, v: VertexData, witness: ComplexIso,
                           horizontal_cones: dict[int, int], basal_src: dict[str, int]) -> None:
    """Horizontal rays must go to fibre rays of the product and basal rays to base rays."""
    A = quotient_complex(exp.upsilon, v.omega_v)
    base = quotient_complex(exp.sigma, v.sigma_v)
    nbase = len(base.rays)
    for r in range(len(A.rays)):
        w = A.origin[A.ray_cone_id(r)]
        target = witness.ray_map.get(r)
        if target is None:
            raise StructuralError("witness does not map every ray")
        is_fibre = target >= nbase
        if (w in horizontal_cones) != is_fibre:
            raise StructuralError("horizontal/basal split disagrees with the bundle witness")


# ---------------------------------------------------------------------------
# Mixing collection
# ---------------------------------------------------------------------------

@dataclass
class MixingCollection:
    """L: M_{σ_v} -> formal divisors on X_v, stored on the basis dual to the rays of σ_v."""

    vertex: str
    basis: list[str]
    values: dict[str, FormalSum]
    difference: dict[str, FormalSum]
    restrictions: dict[str, DivisorExpression]
    computable: bool = True
    reason: Optional[str] = None

    def value_at(self, m: Sequence[int]) -> FormalSum:
        """L(m) for m in coordinates of the dual basis."""
        return add_sums(*[self.values[b] for b in self.basis], scale=list(m))

    def is_standard(self) -> bool:
        return all(not d for d in self.difference.values())


def _smoothness_problem(exp: TropicalExpansion, v: VertexData) -> Optional[str]:
    sig, ups = exp.sigma, exp.upsilon
    for c in sig.cofaces[v.sigma_v]:
        if not sig.cone(c).is_smooth():
            return f"cone {sig.cone_label(c)} of the star of σ_v is not smooth"
    for w in ups.cofaces[v.omega_v]:
        if not ups.cone(w).is_smooth():
            return f"cone {ups.cone_label(w)} of the star of ω_v is not smooth"
    return None


def mixing_for_character(exp: TropicalExpansion, v: VertexData, m: Sequence[int],
                         phi: Optional[FibreFan] = None, witness: Optional[ComplexIso] = None
                         ) -> tuple[FormalSum, DivisorExpression]:
    """L(m) together with the restricted divisor it was read from."""
    phi = phi or fibre_fan(exp, v)
    sig = exp.sigma
    rays = sorted(sig.cone_keys[v.sigma_v])
    f = character_pl(sig, v.sigma_v, m)
    g = normalize_at_vertex(pullback_from_sigma(exp, f), exp, v)
    expr = restrict_to_component(g, exp, v, witness=witness, phi=phi)
    # the horizontal part must be the divisor of the character m on the fibre
    for i, name in enumerate(phi.fan.ray_names):
        expect = dot(m, phi.fan.rays[i])
        if expr.horizontal.get(name, 0) != expect:
            raise StructuralError(f"horizontal coefficient on {name} is {expr.horizontal.get(name, 0)}, "
                                  f"expected {expect}")
    standard = {exp.divisor_symbol(r): int(k) for r, k in zip(rays, m)}
    value = add_sums(standard, expr.basal, scale=[1, -1])
    return value, expr


def mixing_collection(exp: TropicalExpansion, v: VertexData, witness: Optional[ComplexIso] = None) -> MixingCollection:
    """Run the smooth-case algorithm on each basis character of M_{σ_v}."""
    sig = exp.sigma
    rays = sorted(sig.cone_keys[v.sigma_v])
    basis = [sig.ray_names[r] for r in rays]
    problem = _smoothness_problem(exp, v)
    if problem is not None:
        return MixingCollection(v.name, basis, {}, {}, {}, False, f"not computable by the smooth algorithm: {problem}")
    phi = fibre_fan(exp, v)
    values, diff, restr = {}, {}, {}
    for i, name in enumerate(basis):
        m = [int(j == i) for j in range(len(rays))]
        try:
            value, expr = mixing_for_character(exp, v, m, phi=phi, witness=witness)
        except InputError as exc:
            # the star is not a product near ω_v, so Y_v is not a bundle over X_v
            return MixingCollection(v.name, basis, {}, {}, {}, False, f"not computable: {exc}")
        values[name] = value
        diff[name] = add_sums(value, {exp.divisor_symbol(rays[i]): 1}, scale=[1, -1])
        restr[name] = expr
    return MixingCollection(v.name, basis, values, diff, restr)
