"""Benchmark the coupled Cauchy-kernel sum: compiled extension vs fallback.

The double-contour variance quadrature spends almost all of its time in one
kernel, a dense sum of weighted difference quotients over two node sets with
a coincident-node branch.  This script times the Cython implementation (when
built) against the chunked NumPy fallback on raw kernel calls of increasing
size, checks they agree, and then times one realistic end-to-end variance
integral under each implementation.

Usage:
    python benchmarks/bench_backends.py [--sizes 256,512,1024,2048]
                                        [--repeats 5] [--seed 0]
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from specglht import backend
from specglht._quadfallback import coupled_cauchy_sum as fallback_sum
from specglht.contour import delta_hat_numeric
from specglht.shrinkage import Ridge
from specglht.spectrum import SpectralSummary

try:
    from specglht._quadcore import coupled_cauchy_sum as compiled_sum
except ImportError:  # pragma: no cover - depends on the build environment
    compiled_sum = None


def _contiguous_complex(rng: np.random.Generator, size: int) -> np.ndarray:
    values = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return np.ascontiguousarray(values, dtype=np.complex128)


def kernel_inputs(rng: np.random.Generator, size: int) -> tuple:
    """Random kernel operands with a handful of coincident node pairs so the
    difference-quotient guard stays on the measured path."""
    z1 = _contiguous_complex(rng, size)
    a1 = _contiguous_complex(rng, size)
    g1 = _contiguous_complex(rng, size)
    gp1 = _contiguous_complex(rng, size)
    z2 = _contiguous_complex(rng, size)
    a2 = _contiguous_complex(rng, size)
    g2 = _contiguous_complex(rng, size)
    shared = min(8, size)
    z2[:shared] = z1[:shared]
    g2[:shared] = g1[:shared]
    return z1, a1, g1, gp1, z2, a2, g2


def best_of(fun, args: tuple, repeats: int) -> tuple[float, complex]:
    best = float("inf")
    value = 0j
    for _ in range(repeats):
        start = time.perf_counter()
        value = fun(*args)
        best = min(best, time.perf_counter() - start)
    return best, value


def bench_raw_kernel(sizes: list[int], repeats: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    print(f"active backend: {backend.backend_name()}")
    print()
    header = f"{'nodes/side':>10} {'fallback':>12} {'compiled':>12} {'speedup':>8} {'rel diff':>10}"
    print(header)
    print("-" * len(header))
    for size in sizes:
        args = kernel_inputs(rng, size)
        t_fb, v_fb = best_of(fallback_sum, args, repeats)
        if compiled_sum is None:
            print(f"{size:>10} {t_fb * 1e3:>10.2f}ms {'n/a':>12} {'n/a':>8} {'n/a':>10}")
            continue
        t_cc, v_cc = best_of(compiled_sum, args, repeats)
        rel = abs(v_cc - v_fb) / max(abs(v_fb), 1e-300)
        print(
            f"{size:>10} {t_fb * 1e3:>10.2f}ms {t_cc * 1e3:>10.2f}ms "
            f"{t_fb / t_cc:>7.1f}x {rel:>10.2e}"
        )


def bench_end_to_end(repeats: int, seed: int) -> None:
    """Time one realistic variance integral (default 2048 nodes per side)
    under each kernel implementation by swapping the backend attribute."""
    rng = np.random.default_rng(seed)
    p, n = 150, 297
    eigs = np.sort(rng.uniform(0.05, 3.0, size=p))[::-1].copy()
    spec = SpectralSummary(eigs, n)
    f = Ridge(-1.0)

    print()
    print("end-to-end variance integral (p=150, default contour):")
    original = backend.coupled_cauchy_sum
    try:
        for label, impl in (("fallback", fallback_sum), ("compiled", compiled_sum)):
            if impl is None:
                print(f"  {label:>9}: not built")
                continue
            backend.coupled_cauchy_sum = impl
            elapsed, _ = best_of(lambda: delta_hat_numeric(spec, f, f), (), repeats)
            print(f"  {label:>9}: {elapsed * 1e3:8.1f}ms")
    finally:
        backend.coupled_cauchy_sum = original


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes",
        default="256,512,1024,2048",
        help="comma-separated kernel sizes (nodes per contour side)",
    )
    parser.add_argument("--repeats", type=int, default=5, help="take the best of N runs")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    bench_raw_kernel(sizes, args.repeats, args.seed)
    bench_end_to_end(max(2, args.repeats // 2), args.seed)


if __name__ == "__main__":
    main()
