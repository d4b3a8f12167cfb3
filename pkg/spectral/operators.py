"""
Spectral differential operators on periodic grids.

All derivatives are computed in Fourier space; every derivative result has
its Nyquist modes zeroed. Nonlinear products use 2/3-rule truncation.
"""

import logging

import numpy as np

from spectral.fields import Field, VectorField, SpectralError

logger = logging.getLogger(__name__)


def _clean(field_grid, spectrum: np.ndarray) -> Field:
    return Field.from_spectrum(field_grid, spectrum * field_grid.nyquist_mask())


def partial(f: Field, axis: int) -> Field:
    """Spectral derivative of f along one axis."""
    k = f.grid.wavenumbers()[axis]
    return _clean(f.grid, 1j * k * f.spectrum)


def gradient(f: Field) -> VectorField:
    """
    Spectral gradient of a scalar field.
    
    Args:
        f: Scalar field
        
    Returns:
        VectorField whose component k is the inverse transform of i*xi_k*f_hat
    """
    return VectorField(tuple(partial(f, axis) for axis in range(f.grid.dim)))


def divergence(v: VectorField) -> Field:
    """Spectral divergence of a vector field."""
    grid = v.grid
    spectrum = sum(1j * k * c.spectrum for k, c in zip(grid.wavenumbers(), v.components))
    return _clean(grid, spectrum)


def laplacian(f: Field) -> Field:
    return _clean(f.grid, -f.grid.wavenumber_squared() * f.spectrum)


def lame_apply(u: VectorField, mu: float, lam_plus_mu: float) -> VectorField:
    """
    Apply the Lame operator mu*Laplacian(u) + (mu+lambda)*grad(div u).
    
    Args:
        u: Velocity field
        mu: Shear viscosity (>= 0)
        lam_plus_mu: Sum mu + lambda (>= 0)
        
    Returns:
        The Lame operator applied to u
        
    Raises:
        SpectralError: If a coefficient is negative
    """
    if mu < 0 or lam_plus_mu < 0:
        raise SpectralError(f"Lame coefficients must be nonnegative, got mu={mu}, mu+lambda={lam_plus_mu}")

    grid = u.grid
    ks = grid.wavenumbers()
    k2 = grid.wavenumber_squared()
    div_hat = sum(k * c.spectrum for k, c in zip(ks, u.components))
    return VectorField(tuple(
        _clean(grid, -mu * k2 * c.spectrum - lam_plus_mu * k * div_hat)
        for k, c in zip(ks, u.components)
    ))


def lame_exponential(u: VectorField, mu: float, lam_plus_mu: float, tau: float) -> VectorField:
    """Exact flow exp(tau * A_{mu,lambda}) applied to u, mode by mode."""
    grid = u.grid
    ks = grid.wavenumbers()
    k2 = grid.wavenumber_squared()
    safe_k2 = np.where(k2 > 0, k2, 1.0)
    div_hat = sum(k * c.spectrum for k, c in zip(ks, u.components))

    transverse_decay = np.exp(-mu * k2 * tau)
    longitudinal_decay = np.exp(-(mu + lam_plus_mu) * k2 * tau)
    components = []
    for k, c in zip(ks, u.components):
        longitudinal = np.where(k2 > 0, k * div_hat / safe_k2, 0.0)
        transverse = c.spectrum - longitudinal
        components.append(_clean(grid, transverse_decay * transverse + longitudinal_decay * longitudinal))
    return VectorField(tuple(components))


def dealias(f: Field) -> Field:
    """Zero every mode outside the 2/3 band."""
    return Field.from_spectrum(f.grid, f.spectrum * f.grid.dealias_mask())


def dealiased_product(f: Field, g: Field) -> Field:
    """
    Pointwise product with 2/3-rule truncation.
    
    Both factors are truncated to the retained band before multiplying, so
    every alias of the product lands outside the band and is removed by the
    final truncation.
    
    Args:
        f: First factor
        g: Second factor (same grid)
        
    Returns:
        Dealiased product field
    """
    return dealias(dealias(f) * dealias(g))


def advection(u: VectorField, f: Field) -> Field:
    """Transport term u . grad f evaluated pointwise."""
    return Field(f.grid, np.sum(u.as_array() * gradient(f).as_array(), axis=0))
