# spectral/operators.py

import numpy as np

from ..errors import NegativePowerOnMean, NotSolenoidal
from .fields import Field, ScalarField, VectorField, SymTFField
from .symbols import band_symbol, annulus_symbol

MEAN_TOLERANCE = 1e-12
SOLENOIDAL_TOLERANCE = 1e-8


def _inverse_square(grid) -> np.ndarray:
    """1/|m|² with the zero mode set to 0."""
    mod2 = grid.modulus ** 2
    out = np.zeros_like(mod2)
    np.divide(1.0, mod2, out=out, where=mod2 > 0)
    return out


def frac_laplacian(f: Field, r: float) -> Field:
    """
    Λ^r = (−Δ)^{r/2} as the multiplier |m|^r.

    For r >= 0 the zero mode is passed through unchanged; for r < 0 the
    input must be mean-zero and the zero mode of the output is 0.

    Raises:
        NegativePowerOnMean: If r < 0 and the field has a nonzero mean.
    """
    grid = f.grid
    mod = grid.modulus
    if r < 0:
        if np.max(np.abs(np.atleast_1d(f.mean()))) > MEAN_TOLERANCE:
            raise NegativePowerOnMean(f"Λ^{r:g} applied to a field with nonzero mean")
        symbol = np.zeros_like(mod)
        np.power(mod, r, out=symbol, where=mod > 0)
    else:
        symbol = np.power(mod, r)
        symbol[0, 0] = 1.0
    return f._new(f.coeffs * symbol)


def mean_free(f: Field) -> Field:
    coeffs = f.coeffs.copy()
    coeffs[..., 0, 0] = 0.0
    return f._new(coeffs)


def grad(f: ScalarField) -> VectorField:
    g = f.grid
    return VectorField(g, np.stack([1j * g.m1 * f.coeffs, 1j * g.m2 * f.coeffs]))


def div(v: VectorField) -> ScalarField:
    g = v.grid
    return ScalarField(g, 1j * g.m1 * v.coeffs[0] + 1j * g.m2 * v.coeffs[1])


def div_tensor(A: SymTFField) -> VectorField:
    """(div A)_i = ∂_j A^{ij} with A²² = −A¹¹."""
    g = A.grid
    a11, a12 = A.coeffs
    return VectorField(g, np.stack([
        1j * g.m1 * a11 + 1j * g.m2 * a12,
        1j * g.m1 * a12 - 1j * g.m2 * a11,
    ]))


def curl_perp(v: VectorField) -> ScalarField:
    """∇^⊥·v = −∂₂v₁ + ∂₁v₂."""
    g = v.grid
    return ScalarField(g, -1j * g.m2 * v.coeffs[0] + 1j * g.m1 * v.coeffs[1])


def perp(v: VectorField) -> VectorField:
    """v^⊥ = (−v₂, v₁)."""
    return VectorField(v.grid, np.stack([-v.coeffs[1], v.coeffs[0]]))


def leray_project(v: VectorField) -> VectorField:
    """Projection onto mean-zero divergence-free fields: v̂ − m(m·v̂)/|m|², zero mode dropped."""
    g = v.grid
    inv = _inverse_square(g)
    dot = (g.m1 * v.coeffs[0] + g.m2 * v.coeffs[1]) * inv
    coeffs = np.stack([v.coeffs[0] - g.m1 * dot, v.coeffs[1] - g.m2 * dot])
    coeffs[:, 0, 0] = 0.0
    return VectorField(g, coeffs)


def inverse_divergence(f: VectorField) -> SymTFField:
    """
    Inverse divergence ℬ.

    With g = ℙℙ_{≠0}f, returns (ℬf)^{ij} = −∂_jΛ^{−2}g_i − ∂_iΛ^{−2}g_j,
    a symmetric trace-free field with div(ℬf) = g.
    """
    grid = f.grid
    g = leray_project(f).coeffs * _inverse_square(grid)
    a11 = -2j * grid.m1 * g[0]
    a12 = -1j * grid.m2 * g[0] - 1j * grid.m1 * g[1]
    return SymTFField(grid, np.stack([a11, a12]))


def dealias(f: Field) -> Field:
    return f._new(f.coeffs * f.grid.dealias_mask)


def _product(grid, values: np.ndarray, kind) -> Field:
    return kind(grid, grid.forward(values) * grid.dealias_mask)


def _gradient_values(v: VectorField) -> np.ndarray:
    """Physical ∂_i v_j as an array indexed [i, j]."""
    g = v.grid
    d = np.stack([1j * g.m1 * v.coeffs, 1j * g.m2 * v.coeffs])
    return g.inverse(d)


def advect(u: VectorField, b: VectorField) -> VectorField:
    """(u·∇)b, dealiased."""
    uv = u.values()
    db = _gradient_values(b)
    out = uv[0] * db[0] + uv[1] * db[1]
    return _product(u.grid, out, VectorField)


def grad_transpose(b: VectorField, u: VectorField) -> VectorField:
    """(∇b)^T·u with components Σ_j ∂_i b_j u_j, dealiased."""
    uv = u.values()
    db = _gradient_values(b)
    out = np.stack([db[0, 0] * uv[0] + db[0, 1] * uv[1], db[1, 0] * uv[0] + db[1, 1] * uv[1]])
    return _product(u.grid, out, VectorField)


def perp_curl(a: VectorField, b: VectorField) -> VectorField:
    """(Λa)^⊥(∇^⊥·b), dealiased; the bilinear form behind the SQG nonlinearity."""
    u = frac_laplacian(a, 1.0).values()
    s = curl_perp(b).values()
    out = np.stack([-u[1] * s, u[0] * s])
    return _product(a.grid, out, VectorField)


def scalar_times(s: ScalarField, v: VectorField) -> VectorField:
    """Pointwise s·v, dealiased."""
    return _product(v.grid, s.values() * v.values(), VectorField)


def dot(u: VectorField, v: VectorField) -> ScalarField:
    """Pointwise u·v, dealiased."""
    uv, vv = u.values(), v.values()
    return _product(u.grid, uv[0] * vv[0] + uv[1] * vv[1], ScalarField)


def l2(f: Field) -> float:
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))


def check_solenoidal(v: VectorField, tolerance: float = SOLENOIDAL_TOLERANCE) -> None:
    """
    Raises:
        NotSolenoidal: If ‖div v‖ > tolerance·‖v‖ (coefficient ℓ² norms).
    """
    size = l2(v)
    divergence = l2(div(v))
    if size > 0 and divergence > tolerance * size:
        raise NotSolenoidal(f"‖div v‖ = {divergence:.3e} exceeds {tolerance:g}·‖v‖ = {tolerance * size:.3e}")


def sqg_nonlinearity(v: VectorField) -> VectorField:
    """
    u^⊥(∇^⊥·v) with u = Λv, dealiased.

    Raises:
        NotSolenoidal: If v is not divergence-free.
    """
    check_solenoidal(v)
    return perp_curl(v, v)


def sqg_nonlinearity_expanded(v: VectorField) -> VectorField:
    """(u·∇)v − (∇v)^T·u with u = Λv, computed term by term."""
    u = frac_laplacian(v, 1.0)
    return advect(u, v) - grad_transpose(v, u)


def band_project(f: VectorField, k, lam: float) -> VectorField:
    """
    ℙ_{λ,k}: multiplier K̂(m/λ − k) followed by the Leray projection.

    The output spectrum lies in 7λ/8 <= |m| <= 9λ/8.

    Raises:
        BandExceedsGrid: If 9λ/8 exceeds the dealias radius.
    """
    grid = f.grid
    grid.require_band(9.0 * lam / 8.0, what="band projector")
    symbol = band_symbol(grid.m1, grid.m2, k, lam)
    return leray_project(VectorField(grid, f.coeffs * symbol))


def annulus_project(f: Field, lam: float) -> Field:
    """
    P̃_{≈λ}: radial multiplier supported in [λ/4, 4λ] with plateau [3λ/8, 3λ].

    Raises:
        BandExceedsGrid: If 4λ exceeds the dealias radius.
    """
    grid = f.grid
    grid.require_band(4.0 * lam, what="annulus projector")
    return f._new(f.coeffs * annulus_symbol(grid.modulus, lam))


def spectral_mass_outside(f: Field, low: float, high: float) -> float:
    """Sum of |f̂(m)|² over lattice modes with |m| outside [low, high]."""
    mod = f.grid.modulus
    outside = (mod < low) | (mod > high)
    return float(np.sum(np.abs(f.coeffs[..., outside]) ** 2))


def pressure_poisson(G: VectorField) -> ScalarField:
    """Mean-zero p with Δp = div G, i.e. the gradient part of G is ∇p."""
    g = G.grid
    inv = _inverse_square(g)
    return ScalarField(g, -1j * (g.m1 * G.coeffs[0] + g.m2 * G.coeffs[1]) * inv)
