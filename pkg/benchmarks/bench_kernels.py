"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import timeit

from seqscan import _backend
from seqscan.maxobs import bounded_table
from seqscan.stats_core import TestSpec, TunedParams, _side_caps

SPEC = TestSpec(0.1, 0.15, 0.1, 0.1)
PARAMS = TunedParams(0.0584151351108776, 0.045599436759948736)


def cases():
    plan = bounded_table(SPEC, PARAMS).to_plan()
    n_max = plan.horizon
    cap, floor = _side_caps(n_max, SPEC)
    bounds = (n_max, SPEC.p0, SPEC.p1, PARAMS.benign_threshold, PARAMS.scanner_threshold, cap, floor)
    csr = (plan.row_ptr, plan.run_start, plan.run_label, plan.horizon)
    return {
        "new_test_bounds (n_max=1027)": lambda k: k.new_test_bounds(*bounds),
        "forward_dp (horizon 1027)": lambda k: k.forward_dp(*csr, 0.1, plan.n_labels, 0.0),
        "simulate_runs (1e5 runs)": lambda k: k.simulate_runs(*csr, 0.1, 100_000, 1),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("python", _backend.python_kernels)]
    if _backend.compiled_kernels is not None:
        backends.insert(0, ("cython", _backend.compiled_kernels))
    print(f"{'kernel':32s}" + "".join(f"{name:>12s}" for name, _ in backends) + "     speedup")
    for label, fn in cases().items():
        times = [min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) for _, k in backends]
        cells = "".join(f"{t * 1e3:10.1f}ms" for t in times)
        speed = f"{times[-1] / times[0]:10.1f}x" if len(times) > 1 else ""
        print(f"{label:32s}{cells}{speed}")


if __name__ == "__main__":
    main()
