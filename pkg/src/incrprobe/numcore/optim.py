"""Adam with the AMSGrad running-max correction."""

from __future__ import annotations

import numpy as np

from .tensor import Parameter


class OptimizerError(RuntimeError):
    """Non-finite gradient or other unusable optimizer input."""


class AdamAmsgrad:
    """Adam update where the bias-corrected second moment is replaced by a
    running elementwise maximum of the raw second moment.

    Per step, for each parameter with gradient g:

        m <- b1*m + (1-b1)*g
        v <- b2*v + (1-b2)*g^2
        vhat_max <- max(vhat_max, v)
        theta <- theta - lr * (m / (1-b1^t)) / (sqrt(vhat_max / (1-b2^t)) + eps)

    Gradients are zeroed after a successful step. A non-finite gradient
    aborts the step before any state is touched.
    """

    def __init__(self, params, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params: list[Parameter] = list(params)
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)

    def step(self):
        for p in self.params:
            if not np.isfinite(p.grad).all():
                raise OptimizerError(f"non-finite gradient in parameter {p.name!r}; step aborted")
        for p in self.params:
            p.step_count += 1
            t = p.step_count
            g = p.grad
            p.m *= self.beta1
            p.m += (1.0 - self.beta1) * g
            p.v *= self.beta2
            p.v += (1.0 - self.beta2) * (g * g)
            np.maximum(p.vhat_max, p.v, out=p.vhat_max)
            m_hat = p.m / (1.0 - self.beta1**t)
            v_hat = p.vhat_max / (1.0 - self.beta2**t)
            p.value -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
        self.zero_grad()

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()
