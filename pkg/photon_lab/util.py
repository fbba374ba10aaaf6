"""This module contains general purpose utility functions."""

from dataclasses import dataclass
from dataclasses import field
from typing import Dict
from typing import List
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one numerical check.

    A check without ``tolerance`` is informational and always passes.

    """

    name: str
    residual: float
    tolerance: Optional[float]
    values: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if self.tolerance is None:
            return True
        return bool(self.residual <= self.tolerance)

    @staticmethod
    def informational(
        name: str, residual: float, **values: object
    ) -> "CheckResult":
        return CheckResult(
            name=name, residual=residual, tolerance=None, values=values
        )


def relative_difference(a, b) -> float:
    """:math:`\\|a - b\\| / \\max(\\|a\\|, \\|b\\|)`, 0 if both vanish."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - b)) / scale


def failed_checks(checks: List[CheckResult]) -> List[CheckResult]:
    return [check for check in checks if not check.passed]
