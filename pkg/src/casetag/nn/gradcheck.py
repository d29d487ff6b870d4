"""Central finite-difference gradient checking for any scalar-loss closure."""

from __future__ import annotations

from typing import Callable

import numpy as np

from casetag.nn.tensor import Tensor, no_grad


class GradCheckReport:
    def __init__(self, errors: dict[str, float]):
        self.errors = errors

    @property
    def max_error(self) -> float:
        return max(self.errors.values()) if self.errors else 0.0

    def __repr__(self):
        rows = ", ".join(f"{k}={v:.3g}" for k, v in self.errors.items())
        return f"GradCheckReport(max={self.max_error:.3g}: {rows})"


def gradient_check(loss_fn: Callable[[], Tensor],
                   named_params: list[tuple[str, Tensor]],
                   step: float = 1e-4) -> GradCheckReport:
    """Compare analytic grads of loss_fn against central finite differences.

    loss_fn must rebuild the forward pass on every call (it is re-evaluated
    with perturbed parameters).  Relative error uses a small floor so that
    near-zero gradients compare absolutely.
    """
    for _, p in named_params:
        p.grad = None
    loss = loss_fn()
    loss.backward()
    analytic = {name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
                for name, p in named_params}

    errors: dict[str, float] = {}
    with no_grad():
        for name, p in named_params:
            worst = 0.0
            flat = p.data.reshape(-1)
            a_flat = analytic[name].reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + step
                up = loss_fn().item()
                flat[i] = orig - step
                down = loss_fn().item()
                flat[i] = orig
                fd = (up - down) / (2.0 * step)
                a = a_flat[i]
                rel = abs(a - fd) / max(abs(a), abs(fd), 1e-3)
                if rel > worst:
                    worst = rel
            errors[name] = worst
    for _, p in named_params:
        p.grad = None
    return GradCheckReport(errors)
