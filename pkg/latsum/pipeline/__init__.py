"""
latsum core pipeline.

Dispatches a method name to the summation modules and returns one
``MethodValue``: shell table → spherical means, block sums, or the
periodized-kernel oracle.
"""
import logging
from typing import Optional

from latsum.errors import DomainError
from latsum.pipeline.greens import periodized_green, periodized_green_zero_a
from latsum.pipeline.rectangles import block_global_sum
from latsum.pipeline.series import build_phase_shells, cesaro_sum, fourier_cesaro_eval
from latsum.pipeline.shellcount import build_shell_table
from latsum.schemas import (
    PI_POINT,
    CesaroConfig,
    KernelParams,
    MethodValue,
    Point3,
    ShellCountTable,
    SumParams,
)

logger = logging.getLogger(__name__)


def evaluate_method(
    method: str,
    params: SumParams,
    *,
    kappa: float = 0.0,
    max_n: Optional[int] = None,
    x: Point3 = PI_POINT,
    tol: float = 1e-8,
    radius: int = 200,
    table: Optional[ShellCountTable] = None,
    threads: Optional[int] = None,
) -> MethodValue:
    """Evaluate one estimate of the lattice sum.

    ``method`` is plain | cesaro | fourier | blocks | greens; ``tol`` is the
    block tail tolerance for blocks and the truncation tolerance for greens.
    """
    logger.info("Pipeline — %s (a=%g, s=%g)", method, params.a, params.s)

    if method in ("plain", "cesaro"):
        if not max_n:
            raise DomainError(f"method {method} needs max_n >= 1")
        order = 0.0 if method == "plain" else kappa
        if table is None or table.max_n < max_n or table.dim != params.dim:
            table = build_shell_table(params.dim, max_n, threads)
        value = cesaro_sum(table, params, CesaroConfig(kappa=order, max_n=max_n))
        return MethodValue(method=method, value=value, detail={"kappa": order, "max_n": max_n})

    if method == "fourier":
        if not max_n:
            raise DomainError("method fourier needs max_n >= 1")
        phase = build_phase_shells(x, max_n, threads)
        value = fourier_cesaro_eval(phase, params, CesaroConfig(kappa=kappa, max_n=max_n))
        return MethodValue(
            method=method, value=value, detail={"kappa": kappa, "max_n": max_n, "x": list(x)}
        )

    if method == "blocks":
        if params.dim != 3:
            raise DomainError("block sums are three-dimensional")
        block = block_global_sum(params, tol, threads)
        return MethodValue(
            method=method,
            value=block.value,
            detail={"radius": block.radius, "tail_bound": block.tail_bound},
        )

    if method == "greens":
        if params.dim != 3:
            raise DomainError("the Green-function oracle is three-dimensional")
        if params.a == 0:
            evaluation = periodized_green_zero_a(params.s, x, radius, threads)
        else:
            kernel = KernelParams(a=abs(params.a), s=params.s)
            evaluation = periodized_green(kernel, x, tol, threads)
        return MethodValue(
            method=method,
            value=evaluation.value,
            detail={
                "radius": evaluation.truncation_radius,
                "error_estimate": evaluation.error_estimate,
            },
        )

    raise DomainError(f"unknown method {method!r}")
