"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: ValidationError -> 2,
ResourceLimitError -> 3, BracketingError and property counterexamples -> 1.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """A model, weight vector, configuration, or parameter fails its validity rules."""

    def __init__(self, message: str, violations: tuple = ()):
        super().__init__(message)
        self.violations = violations


class ResourceLimitError(RuntimeError):
    """An enumeration or work estimate exceeds the combination cap."""

    def __init__(self, message: str, required: int | None = None, cap: int | None = None,
                 partial=None):
        super().__init__(message)
        self.required = required
        self.cap = cap
        # Partially completed report, attached when a long run is cut short so the
        # CLI can flush what exists before exiting with the resource status.
        self.partial = partial


class BracketingError(RuntimeError):
    """A scan over [0, 1] found no sign change / no weight attaining the target.

    Carries the scan profile (list of (weight, value) pairs) for diagnosis.
    """

    def __init__(self, message: str, profile=()):
        super().__init__(message)
        self.profile = tuple(profile)
