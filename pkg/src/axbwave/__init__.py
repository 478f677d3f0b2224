"""axbwave — spectral multiplier and wave kernels on the ax+b groups ℝ ⋉ ℝⁿ."""

__version__ = "0.1.0"
